#pragma once

#include "qoptics5/geometry.hpp"

#include <cmath>
#include <random>

namespace testutil {

using namespace qoptics5;

inline Mat4 eta4() {
  Mat4 e = Mat4::Identity();
  e(0, 0) = -1.0;
  return e;
}

inline Mat4 random_symmetric4(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> U(-scale, scale);
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) m(i, j) = m(j, i) = U(rng);
  return m;
}

/// Smooth x⁵-independent foliation: g = η + S0 + Σ x_k S_k (small), A affine, Φ > 0.
struct RandomFoliation {
  Mat4 S0;
  std::array<Mat4, 4> S;
  Vec4 a0;
  Mat4 B;
  Vec4 w;
  double phi0 = 1.0;
  double q = 1.0;

  explicit RandomFoliation(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    S0 = random_symmetric4(rng, 0.05);
    for (auto& s : S) s = random_symmetric4(rng, 0.02);
    for (int i = 0; i < 4; ++i) {
      a0[i] = U(rng);
      w[i] = U(rng);
      for (int j = 0; j < 4; ++j) B(i, j) = 0.3 * U(rng);
    }
    phi0 = 1.0 + 0.3 * U(rng);
    q = 0.5 + std::abs(U(rng)) * 1.5;
  }

  Mat4 g(const Vec4& x) const {
    Mat4 m = eta4() + S0;
    for (int k = 0; k < 4; ++k) m += x[k] * S[k];
    return m;
  }
  Vec4 A(const Vec4& x) const { return a0 + B * x; }
  double Phi(const Vec4& x) const { return phi0 + 0.2 * std::sin(w.dot(x)); }

  FoliationX5 foliation(const Units& u = {}) const {
    FoliationX5 f;
    f.g = [*this](const Vec4& x) { return g(x); };
    f.A = [*this](const Vec4& x) { return A(x); };
    f.Phi = [*this](const Vec4& x) { return Phi(x); };
    f.q = q;
    f.units = u;
    return f;
  }
};

/// Independent restatement of the Kaluza-Klein block form.
inline Mat5 kk_oracle(const Mat4& g, const Vec4& A, double Phi, double q, double c = 1.0) {
  const double k = q / (c * c);
  Mat5 h;
  h.topLeftCorner<4, 4>() = g + k * k * Phi * Phi * A * A.transpose();
  h.block<4, 1>(0, 4) = k * Phi * Phi * A;
  h.block<1, 4>(4, 0) = (k * Phi * Phi * A).transpose();
  h(4, 4) = Phi * Phi;
  return h;
}

inline Vec4 random_point(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> U(-scale, scale);
  return Vec4(U(rng), U(rng), U(rng), U(rng));
}

/// Circumradius of three points in a plane.
inline double circumradius(double ax, double ay, double bx, double by, double cx, double cy) {
  const double a = std::hypot(bx - cx, by - cy);
  const double b = std::hypot(ax - cx, ay - cy);
  const double c = std::hypot(ax - bx, ay - by);
  const double area2 = std::abs((bx - ax) * (cy - ay) - (cx - ax) * (by - ay));
  return a * b * c / (2.0 * area2);
}

}  // namespace testutil
