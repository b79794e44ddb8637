#include "qoptics5/sr5.hpp"

#include <cmath>
#include <sstream>

namespace qoptics5 {

namespace {

int axis_index(int a) {
  if (a == 1 || a == 2 || a == 3) return a;
  if (a == 5) return kX5;
  throw PreconditionError("axis must be one of 1, 2, 3, 5");
}

/// Pure 4D boost with velocity β (in units of c) acting on (p⁰, p⃗); p⁵ untouched.
Mat5 boost4(const Eigen::Vector3d& beta) {
  Mat5 L = Mat5::Identity();
  const double b2 = beta.squaredNorm();
  if (b2 == 0.0) return L;
  if (!(b2 < 1.0)) throw PreconditionError("boost velocity must be below c");
  const double g = 1.0 / std::sqrt(1.0 - b2);
  L(0, 0) = g;
  for (int i = 0; i < 3; ++i) {
    L(0, i + 1) = L(i + 1, 0) = g * beta[i];
    for (int j = 0; j < 3; ++j) L(i + 1, j + 1) = (i == j ? 1.0 : 0.0) + (g - 1.0) * beta[i] * beta[j] / b2;
  }
  return L;
}

}  // namespace

const Mat5& eta5() {
  static const Mat5 e = [] {
    Mat5 m = Mat5::Identity();
    m(0, 0) = -1.0;
    return m;
  }();
  return e;
}

double null_invariant(const Vec5& p) { return p.dot(eta5() * p); }

FiveMomentum make_null_momentum(double E, const Eigen::Vector3d& direction, double m, const Units& u) {
  const double c = u.c;
  const double k2 = E * E / (c * c) - m * m * c * c;
  if (k2 < -1e-14 * E * E / (c * c)) {
    std::ostringstream os;
    os << "E^2 = " << E * E << " is below m^2c^4 = " << m * m * c * c * c * c;
    throw ThresholdError(os.str());
  }
  const double k = std::sqrt(std::max(k2, 0.0));
  FiveMomentum f;
  f.p[0] = E / c;
  f.p[kX5] = m * c;
  if (k > 0.0) {
    const double n = direction.norm();
    if (!(n > 0.0)) throw PreconditionError("moving null momentum needs a nonzero direction");
    f.p.segment<3>(1) = k * direction / n;
  }
  return f;
}

PairCreation pair_creation(const FiveMomentum& p1, const FiveMomentum& p2, double mX, const Units& u,
                           double null_tol) {
  const double c = u.c;
  for (const auto* ph : {&p1, &p2}) {
    if (std::abs(ph->p[kX5]) > null_tol) throw PreconditionError("pair creation inputs must be 4D photons (m = 0)");
    if (std::abs(null_invariant(ph->p)) > null_tol * std::max(1.0, ph->p[0] * ph->p[0]))
      throw PreconditionError("pair creation input is not null");
  }
  if (!(mX > 0.0)) throw PreconditionError("pair creation needs m_X > 0");
  const Vec5 P = p1.p + p2.p;
  PairCreation r;
  r.invariant_mass_sq = P[0] * P[0] - P.segment<3>(1).squaredNorm();
  const double thr = 4.0 * mX * mX * c * c;
  if (!(r.invariant_mass_sq > 0.0) || r.invariant_mass_sq < thr * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "below pair threshold: s = " << r.invariant_mass_sq << " < (2 m_X c)^2 = " << thr;
    throw ThresholdError(os.str());
  }
  const Eigen::Vector3d beta = P.segment<3>(1) / P[0];
  const Mat5 to_lab = boost4(beta);
  const Mat5 to_cm = boost4(-beta);
  const Vec5 q1 = to_cm * p1.p;
  const double half = 0.5 * std::sqrt(r.invariant_mass_sq);
  const double k = std::sqrt(std::max(half * half - mX * mX * c * c, 0.0));
  Eigen::Vector3d dir = q1.segment<3>(1);
  dir /= dir.norm();
  Vec5 x_cm;
  x_cm << half, k * dir, mX * c;
  r.X.p = to_lab * x_cm;
  r.Xbar.p = P - r.X.p;
  r.Xbar.p[kX5] = -mX * c;  // exact in floating point, since P⁵ = 0
  r.conservation_residual = (r.X.p + r.Xbar.p - P).cwiseAbs().maxCoeff();
  r.null_residual = std::max(std::abs(null_invariant(r.X.p)), std::abs(null_invariant(r.Xbar.p)));
  return r;
}

std::string to_string(TransformKind k) {
  switch (k) {
    case TransformKind::identity: return "identity";
    case TransformKind::rotation: return "rotation";
    case TransformKind::boost: return "boost";
    case TransformKind::x5_rotation: return "x5_rotation";
    case TransformKind::x5_boost: return "x5_boost";
    case TransformKind::C: return "C";
    case TransformKind::P: return "P";
    case TransformKind::T: return "T";
    case TransformKind::composite: return "composite";
  }
  return "unknown";
}

Transform5 make_rotation(int i, int j, double angle) {
  const int a = axis_index(i), b = axis_index(j);
  if (a == b) throw PreconditionError("rotation plane needs two distinct axes");
  Transform5 T;
  T.kind = (a == kX5 || b == kX5) ? TransformKind::x5_rotation : TransformKind::rotation;
  const double cs = std::cos(angle), sn = std::sin(angle);
  T.L(a, a) = cs;
  T.L(b, b) = cs;
  T.L(a, b) = -sn;
  T.L(b, a) = sn;
  return T;
}

Transform5 make_boost(int axis, double rapidity) {
  const int a = axis_index(axis);
  Transform5 T;
  T.kind = a == kX5 ? TransformKind::x5_boost : TransformKind::boost;
  T.L(0, 0) = T.L(a, a) = std::cosh(rapidity);
  T.L(0, a) = T.L(a, 0) = std::sinh(rapidity);
  return T;
}

Transform5 make_C() {
  Transform5 T;
  T.kind = TransformKind::C;
  T.L(kX5, kX5) = -1.0;
  return T;
}

Transform5 make_P() {
  Transform5 T;
  T.kind = TransformKind::P;
  for (int i = 1; i <= 3; ++i) T.L(i, i) = -1.0;
  return T;
}

Transform5 make_T() {
  Transform5 T;
  T.kind = TransformKind::T;
  T.L(0, 0) = -1.0;
  return T;
}

Transform5 compose(const Transform5& a, const Transform5& b) {
  Transform5 T;
  T.L = a.L * b.L;
  T.kind = TransformKind::composite;
  return T;
}

double pseudo_orthogonality_error(const Mat5& L) {
  return (L.transpose() * eta5() * L - eta5()).cwiseAbs().maxCoeff();
}

Vec5 apply_transform(const Transform5& T, const Vec5& p, double tol) {
  const double err = pseudo_orthogonality_error(T.L);
  if (!(err <= tol)) {
    std::ostringstream os;
    os << "transform is not in O(4,1): |L^T eta L - eta| = " << err;
    throw PreconditionError(os.str());
  }
  return T.L * p;
}

Transform5 random_o41(std::mt19937_64& rng, double max_rapidity, bool discrete) {
  std::uniform_real_distribution<double> ang(-3.141592653589793, 3.141592653589793);
  std::uniform_real_distribution<double> rap(-max_rapidity, max_rapidity);
  std::uniform_int_distribution<int> coin(0, 1);
  const int axes[4] = {1, 2, 3, 5};
  Transform5 T;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) T = compose(make_rotation(axes[i], axes[j], ang(rng)), T);
  for (int a : axes) T = compose(make_boost(a, rap(rng)), T);
  if (discrete) {
    if (coin(rng)) T = compose(make_C(), T);
    if (coin(rng)) T = compose(make_P(), T);
    if (coin(rng)) T = compose(make_T(), T);
  }
  T.kind = TransformKind::composite;
  return T;
}

DualityReport duality_pictures(const std::vector<FiveMomentum>& ps, double kappa_M, double kappa_e,
                               const Units& u, double rest_tol) {
  if (!(kappa_M > 0.0) || !(kappa_e > 0.0)) throw PreconditionError("duality constants must be positive");
  DualityReport r;
  const double c = u.c;
  for (const auto& f : ps) {
    const double k = f.spatial().norm();
    if (k > rest_tol * std::max(1.0, std::abs(f.p[0]))) {
      std::ostringstream os;
      os << "duality pictures need a momentum at rest, |p| = " << k;
      throw PreconditionError(os.str());
    }
    DualityPicture d;
    const double E = f.energy(u), m = f.mass(u);
    d.M = kappa_M * m;
    d.e = kappa_e * E;
    d.qm << E / c, k, m * c;
    d.sm << d.M * c, k, d.e / c;
    d.degenerate = m == 0.0;
    r.pictures.push_back(d);
  }
  if (r.pictures.empty()) return r;
  const auto& p0 = r.pictures.front();
  for (size_t i = 0; i < r.pictures.size(); ++i) {
    const auto& d = r.pictures[i];
    const double mr = p0.degenerate ? 0.0 : ps[i].mass(u) / ps[0].mass(u);
    const double Mr = p0.degenerate ? 0.0 : d.M / p0.M;
    r.m_ratio.push_back(mr);
    r.M_ratio.push_back(Mr);
    r.e_over_E.push_back(ps[i].energy(u) != 0.0 ? d.e / ps[i].energy(u) : 0.0);
    r.max_ratio_mismatch = std::max(r.max_ratio_mismatch, std::abs(Mr - mr));
  }
  return r;
}

}  // namespace qoptics5
