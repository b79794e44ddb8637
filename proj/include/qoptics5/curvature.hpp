#pragma once

#include "qoptics5/geometry.hpp"

#include <array>
#include <functional>

namespace qoptics5 {

template <int N>
using VecN = Eigen::Matrix<double, N, 1>;
template <int N>
using MatN = Eigen::Matrix<double, N, N>;
template <int N>
using MetricFn = std::function<MatN<N>(const VecN<N>&)>;

/// Γ^a_{bc} stored as gamma[a](b, c).
template <int N>
struct Christoffel {
  std::array<MatN<N>, N> gamma;

  double max_abs() const {
    double m = 0.0;
    for (const auto& g : gamma) m = std::max(m, g.cwiseAbs().maxCoeff());
    return m;
  }
  double max_asymmetry() const {
    double m = 0.0;
    for (const auto& g : gamma) m = std::max(m, (g - g.transpose()).cwiseAbs().maxCoeff());
    return m;
  }
};

/// dg[d](a, b) = ∂_d g_ab by central differences.
template <int N>
std::array<MatN<N>, N> metric_gradient(const MetricFn<N>& g, const VecN<N>& x, double step) {
  std::array<MatN<N>, N> dg;
  for (int d = 0; d < N; ++d) {
    VecN<N> e = VecN<N>::Zero();
    e[d] = step;
    dg[d] = (g(x + e) - g(x - e)) / (2.0 * step);
  }
  return dg;
}

inline void require_invertible(double det, double scale) {
  if (!std::isfinite(det) || std::abs(det) <= 1e-14 * scale)
    throw SingularError("metric is singular at a finite-difference stencil point");
}

template <int N>
MatN<N> checked_inverse(const MatN<N>& g) {
  const double scale = std::pow(std::max(1e-300, g.cwiseAbs().maxCoeff()), N);
  require_invertible(g.determinant(), scale);
  return g.inverse();
}

template <int N>
Christoffel<N> christoffel(const MetricFn<N>& g, const VecN<N>& x, double step = 1e-4) {
  const MatN<N> gi = checked_inverse<N>(g(x));
  const auto dg = metric_gradient<N>(g, x, step);
  // lowered[d](b, c) = ½(∂_b g_dc + ∂_c g_db − ∂_d g_bc)
  std::array<MatN<N>, N> lowered;
  for (int d = 0; d < N; ++d)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        lowered[d](b, c) = 0.5 * (dg[b](d, c) + dg[c](d, b) - dg[d](b, c));
  Christoffel<N> G;
  for (int a = 0; a < N; ++a) {
    G.gamma[a].setZero();
    for (int d = 0; d < N; ++d) G.gamma[a] += gi(a, d) * lowered[d];
  }
  return G;
}

/// R_bc = ∂_a Γ^a_bc − ∂_c Γ^a_ab + Γ^a_ad Γ^d_bc − Γ^a_cd Γ^d_ab.
/// Derivatives of Γ are nested central differences with the same step.
template <int N>
MatN<N> ricci(const MetricFn<N>& g, const VecN<N>& x, double step = 1e-3) {
  const Christoffel<N> G0 = christoffel<N>(g, x, step);
  std::array<Christoffel<N>, N> dG;  // dG[e].gamma[a](b,c) = ∂_e Γ^a_bc
  for (int e = 0; e < N; ++e) {
    VecN<N> de = VecN<N>::Zero();
    de[e] = step;
    const auto Gp = christoffel<N>(g, x + de, step);
    const auto Gm = christoffel<N>(g, x - de, step);
    for (int a = 0; a < N; ++a) dG[e].gamma[a] = (Gp.gamma[a] - Gm.gamma[a]) / (2.0 * step);
  }
  MatN<N> R = MatN<N>::Zero();
  for (int b = 0; b < N; ++b)
    for (int c = 0; c < N; ++c) {
      double s = 0.0;
      for (int a = 0; a < N; ++a) {
        s += dG[a].gamma[a](b, c) - dG[c].gamma[a](a, b);
        for (int d = 0; d < N; ++d)
          s += G0.gamma[a](a, d) * G0.gamma[d](b, c) - G0.gamma[a](c, d) * G0.gamma[d](a, b);
      }
      R(b, c) = s;
    }
  return 0.5 * (R + R.transpose());
}

template <int N>
double ricci_scalar(const MetricFn<N>& g, const VecN<N>& x, double step = 1e-3) {
  return (checked_inverse<N>(g(x)).cwiseProduct(ricci<N>(g, x, step))).sum();
}

inline MetricFn<5> as_fn(const MetricField5& h) {
  return [h](const Vec5& x) { return h(x); };
}

inline MetricFn<4> as_fn(const MatrixField4& m) { return m; }

/// Residuals of the conformally transformed field equations, LHS − RHS.
struct FieldEqResidual {
  Mat4 einstein = Mat4::Zero();
  Vec4 maxwell = Vec4::Zero();
  double phi = 0.0;

  double max_abs() const {
    return std::max({einstein.cwiseAbs().maxCoeff(), maxwell.cwiseAbs().maxCoeff(),
                     std::abs(phi)});
  }
};

/// Intermediate tensors, exposed so tests can check pieces separately.
struct FieldEqTerms {
  Mat4 gt, gt_inv;
  Mat4 ricci_t;
  double ricci_scalar_t = 0.0;
  Mat4 F;       ///< F_μν = ∂_μ A_ν − ∂_ν A_μ
  Mat4 F_up;    ///< F^μν raised with g̃
  Mat4 T_em;    ///< g̃_βμ F_αλ F^λμ + ¼ g̃_αβ F_μλ F^μλ
  Mat4 T_phi;
  Vec4 divF;    ///< ∇̃^μ F_μν
  Vec4 dPhi;
  double box_phi = 0.0;
  double Phi = 1.0;
};

FieldEqTerms field_equation_terms(const FoliationX5& fol, const Vec4& x, double step = 1e-3);
FieldEqResidual field_equation_residual(const FoliationX5& fol, const Vec4& x, double step = 1e-3);

}  // namespace qoptics5
