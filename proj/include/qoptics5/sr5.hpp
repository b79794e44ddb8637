#pragma once

#include "qoptics5/core.hpp"

#include <random>
#include <string>
#include <vector>

namespace qoptics5 {

/// p = (E/c, p¹, p², p³, mc).
struct FiveMomentum {
  Vec5 p = Vec5::Zero();
  double energy(const Units& u = {}) const { return p[0] * u.c; }
  double mass(const Units& u = {}) const { return p[kX5] / u.c; }
  Eigen::Vector3d spatial() const { return p.segment<3>(1); }
};

const Mat5& eta5();
/// η_AB p^A p^B.
double null_invariant(const Vec5& p);

/// |p⃗| = √(E²/c² − m²c²) along `direction`. Throws ThresholdError when E² < m²c⁴.
FiveMomentum make_null_momentum(double E, const Eigen::Vector3d& direction, double m,
                                const Units& u = {});

struct PairCreation {
  FiveMomentum X, Xbar;
  double conservation_residual = 0.0;  ///< max |p_X + p_X̄ − p₁ − p₂|
  double null_residual = 0.0;          ///< max |η(p, p)| over X and X̄
  double invariant_mass_sq = 0.0;      ///< s = (P⁰)² − |P⃗|²
};

/// Two massless inputs to a pair with m_X̄ = −m_X, solved in the centre-of-momentum frame
/// with X emitted along photon 1. Throws ThresholdError below s = (2 m_X c)² and
/// PreconditionError for massive or non-null inputs.
PairCreation pair_creation(const FiveMomentum& photon1, const FiveMomentum& photon2, double mX,
                           const Units& u = {}, double null_tol = 1e-10);

enum class TransformKind { identity, rotation, boost, x5_rotation, x5_boost, C, P, T, composite };
std::string to_string(TransformKind k);

struct Transform5 {
  Mat5 L = Mat5::Identity();
  TransformKind kind = TransformKind::identity;
};

/// Rotation in the (i, j) plane, indices in 1, 2, 3, 5 (5 means the x⁵ axis).
Transform5 make_rotation(int i, int j, double angle);
/// Boost along spatial axis 1, 2, 3 or 5 with the given rapidity.
Transform5 make_boost(int axis, double rapidity);
Transform5 make_C();
Transform5 make_P();
Transform5 make_T();
Transform5 compose(const Transform5& a, const Transform5& b);
/// max |ΛᵀηΛ − η|.
double pseudo_orthogonality_error(const Mat5& L);
/// Throws PreconditionError when Λ is not in O(4,1) to tol.
Vec5 apply_transform(const Transform5& T, const Vec5& p, double tol = 1e-12);
/// Product of random rotations and boosts, optionally with discrete factors.
Transform5 random_o41(std::mt19937_64& rng, double max_rapidity = 1.0, bool discrete = true);

struct DualityPicture {
  Eigen::Vector3d qm;  ///< (E/c, |p⃗|, mc)
  Eigen::Vector3d sm;  ///< (Mc, |p⃗|, e/c)
  double M = 0.0, e = 0.0;
  bool degenerate = false;
};

struct DualityReport {
  std::vector<DualityPicture> pictures;
  std::vector<double> M_ratio;  ///< M_i/M_0
  std::vector<double> m_ratio;  ///< m_i/m_0
  std::vector<double> e_over_E;
  double max_ratio_mismatch = 0.0;  ///< max |M_i/M_0 − m_i/m_0|
};

/// M = κ_M m and e = κ_e E with arbitrary positive constants; only ratios are meaningful.
/// Throws PreconditionError for inputs with p⃗ ≠ 0.
DualityReport duality_pictures(const std::vector<FiveMomentum>& ps, double kappa_M = 1.0,
                               double kappa_e = 1.0, const Units& u = {}, double rest_tol = 1e-12);

}  // namespace qoptics5
