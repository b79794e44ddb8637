#pragma once

#include "qoptics5/curvature.hpp"
#include "qoptics5/geometry.hpp"

#include <vector>

namespace qoptics5 {

enum class Parametrization {
  affine_h,          ///< affine parameter of h_AB
  affine_conformal,  ///< affine parameter of h_AB/Φ² (or h_AB/φ²)
  proper_time,       ///< dτ² = −g̃ dx dx
  fermat_time,       ///< dτ² = G̃ dx dx
  coordinate_time,
};

struct GeodesicConfig {
  double step = 1e-3;
  int max_steps = 1000;
  /// Re-project the velocity onto the null cone every this many steps; 0 disables.
  int reproject_interval = 1;
  double fd_step = 1e-4;
  double null_tol = 1e-10;
};

struct Path5 {
  std::vector<double> s;
  std::vector<Vec5> x;
  std::vector<Vec5> v;
  std::vector<double> null_residual;
  Parametrization param = Parametrization::affine_h;
  double max_null_residual = 0.0;
};

struct Path4 {
  std::vector<double> s;
  std::vector<Vec4> x;
  std::vector<Vec4> u;
  Parametrization param = Parametrization::proper_time;
  /// |g̃ u u ± 1| for the normalization of the chosen parametrization.
  double max_norm_residual = 0.0;
};

/// RK4 for ẍ^A = −Γ^A_BC ẋ^B ẋ^C with Christoffels from central differences of h.
/// Throws PreconditionError if v0 is not null to cfg.null_tol.
Path5 integrate_null_geodesic_5d(const MetricField5& h, const Vec5& x0, const Vec5& v0,
                                 const GeodesicConfig& cfg,
                                 Parametrization tag = Parametrization::affine_h);

/// v5 that puts (v^0..v^3, v5) on the null cone of h at x, choosing the root nearest `hint`.
double null_v5(const Mat5& h, const Vec5& v, double hint);

/// One trajectory per initial condition, computed on `threads` workers.
std::vector<Path5> integrate_null_geodesic_batch(const MetricField5& h,
                                                 const std::vector<std::pair<Vec5, Vec5>>& inits,
                                                 const GeodesicConfig& cfg, int threads = 1);

/// ẍ^τ = −Γ̃^τ_μν ẋ^μ ẋ^ν + s (q/c²) g̃^τσ F_σρ ẋ^ρ with s = +1 for Branch::plus, −1 for minus.
/// This is the Euler-Lagrange equation of D_s = ∫(s dτ − (q/c²) A dx).
Path4 integrate_charged_geodesic_4d(const MatrixField4& gt, const VectorField4& A, double q,
                                    const Vec4& x0, const Vec4& u0, const GeodesicConfig& cfg,
                                    Branch branch = Branch::minus, const Units& units = {});

struct Projection4 {
  Path4 path;
  std::vector<double> dtau_dsigma;
  std::vector<double> other5d_residual;  ///< |(ẋ⁵ + (q/c²)A_μ ẋ^μ)² − 1| in τ
  double max_other5d_residual = 0.0;
  /// Sign of ẋ⁵ + (q/c²)A·ẋ, which selects the 4D branch the projection obeys.
  Branch branch = Branch::minus;
};

/// Drops x⁵ and re-parametrizes by τ (cumulative trapezoid over σ samples).
Projection4 project_to_4d(const Path5& p5, const FoliationX5& fol);

struct ChargeSeries {
  std::vector<double> values;
  double mean = 0.0;
  double max_deviation = 0.0;
};

/// m̄ = (h_5B/Φ²) dx^B/dσ' with σ' the affine parameter of h/Φ². For a path tagged
/// affine_h this equals h_5B v^B. The metric must be flagged independent of x⁵.
ChargeSeries conserved_mbar(const Path5& p5, const MetricField5& h);
ChargeSeries conserved_mbar(const Path5& p5, const FoliationX5& fol);

/// x⁰ analog: M̄ = (h_0B/φ²) dx^B/dσ'. Needs the x⁰-independence flag.
ChargeSeries conserved_Mbar(const Path5& p5, const MetricField5& h);

struct ZeroKelvinPath {
  Path4 path;               ///< y = (x1, x2, x3, x5) against Fermat time τ
  std::vector<double> x0;   ///< physical time x⁰ = ∫(√(G̃ẏẏ) − (Q/c²) a·ẏ) dτ
  ChargeSeries Mbar;        ///< −(ẋ⁰ + (Q/c²) a·ẏ) along the path
};

/// ÿ^τ + Γ̃^τ_μν ẏ^μ ẏ^ν + (Q/c²) G̃^τσ f_σρ ẏ^ρ = 0 with f = da; G̃ positive definite and
/// G̃ u0 u0 = 1. x0 is the initial physical time.
ZeroKelvinPath integrate_zero_kelvin(const MatrixField4& Gt, const VectorField4& a, double Q,
                                     const Vec4& y0, const Vec4& u0, const GeodesicConfig& cfg,
                                     double x0 = 0.0, const Units& units = {});

}  // namespace qoptics5
