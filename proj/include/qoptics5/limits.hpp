#pragma once

#include "qoptics5/core.hpp"
#include "qoptics5/geometry.hpp"

#include <vector>

namespace qoptics5 {

// ---------------------------------------------------------------------------
// Nonrelativistic expansion of the 4D action
// ---------------------------------------------------------------------------

struct NonrelExpansion {
  double leading = 0.0;              ///< ∓λ⁻¹ c (t₂ − t₁)
  std::vector<double> bracket;       ///< per-segment integrand of the bracket (midpoint)
  double total = 0.0;                ///< leading − s λ⁻¹ c ∫ dt [bracket]
  double truncation_estimate = 0.0;  ///< λ⁻¹ c ∫ dt ε²/8 with ε = 2V/mc² − v²/c²
  double exact = 0.0;                ///< λ⁻¹ D_s on the same polygon with g̃₀₀ = −1 − 2V/mc²
};

struct NonrelFields {
  ScalarField4 V;   ///< potential energy, argument (x⁰ = ct, x, y, z)
  ScalarField4 A0;
  VectorField4 A;   ///< only components 1..3 are read
};

/// Path samples are (t, x, y, z) in coordinate time. Throws when max |v|/c ≥ vmax.
NonrelExpansion nonrel_action(const std::vector<Vec4>& path_t, const NonrelFields& f, double m,
                              double q, Branch branch = Branch::minus, const Units& u = {},
                              double vmax = 0.1);

// ---------------------------------------------------------------------------
// Time-sliced continuum propagator (1D)
// ---------------------------------------------------------------------------

/// V(x) = V0 + V1 x + ½ V2 x², constant A0 and A_x. The potential enters each slice at
/// its midpoint, or at its earlier endpoint when left_point is set. Both rules are first order
/// in the slice width once V'' ≠ 0.
struct SlicedFields {
  double V0 = 0.0, V1 = 0.0, V2 = 0.0;
  double A0 = 0.0, Ax = 0.0;
  bool left_point = false;
};

/// Exact Gaussian evaluation of the sliced path integral with per-slice factor
/// (m/(2π i s ħ ε))^{1/2} exp{i s [S_slice/ħ − mc²ε/ħ]} and midpoint potential.
/// s = +1 for Branch::minus, −1 for plus (where q is also reversed).
cplx sliced_propagator(double m, double q, double t, double x1, double x2, int slices,
                       const SlicedFields& f = {}, Branch branch = Branch::minus,
                       const Units& u = {});

/// (m/(2π i s ħ t))^{1/2} exp{i s [m Δx²/(2ħt) − (mq/c) A_x Δx/ħ − mqA0 t/ħ − V0 t/ħ − mc²t/ħ]}.
cplx free_propagator(double m, double q, double t, double x1, double x2, const SlicedFields& f = {},
                     Branch branch = Branch::minus, const Units& u = {});

/// Mehler kernel of V = ½ m ω² x² including the rest-energy phase; q = 0. Needs 0 < ωt < π.
cplx harmonic_propagator(double m, double omega, double t, double x1, double x2,
                         Branch branch = Branch::minus, const Units& u = {});

struct SchrodingerCheck {
  cplx sliced;
  cplx analytic;
  double relative_error = 0.0;
};

SchrodingerCheck schrodinger_free_check(double m, double t, double x1, double x2, int slices,
                                        const Units& u = {});

/// ∫ dx K(t₂; x₂, x) K(t₁; x, x₁) along the steepest-descent line through the
/// stationary point, compared with K(t₁ + t₂; x₂, x₁). Returns the relative error.
double free_convolution_residual(double m, double t1, double t2, double x1, double x2,
                                 const Units& u = {});

// ---------------------------------------------------------------------------
// Fokker-Planck reduction
// ---------------------------------------------------------------------------

struct FokkerPlanckCheck {
  double walk = 0.0;
  double analytic = 0.0;
  double ratio = 0.0;
  double relative_error = 0.0;
  double normalization = 0.0;   ///< Σ walk · cell · e^{+cu/Λ}
  double second_moment = 0.0;   ///< per axis
  double expected_moment = 0.0; ///< cΛu
  double step_x5 = 0.0;
  double step_transverse = 0.0;
};

/// Directed walk along x⁵ = cu with n steps a = cu/n; each step moves every transverse
/// axis by ±√(Λa) and carries weight e^{−aΛ⁻¹}. dims is 1 or 2.
FokkerPlanckCheck fokker_planck_check(double Lambda, double u, double x1, double x2, int steps,
                                      int dims = 1, const Units& un = {});

// ---------------------------------------------------------------------------
// Thermal map
// ---------------------------------------------------------------------------

struct ThermalMap {
  double beta = 0.0, zeta = 0.0, m = 0.0;
  double gamma = 0.0;         ///< ζ/m
  double D = 0.0;             ///< 1/(βζ)
  double Lambda = 0.0;        ///< 2D/c
  double Lambda_inv = 0.0;    ///< βζc/2
  double M = 0.0;             ///< ħγβm/2
  double u_quantum = 0.0;     ///< 2/γ
};

ThermalMap thermal_map(double beta, double zeta, double m, const Units& u = {});
/// β recovered from Λ and ζ.
double beta_from_Lambda(double Lambda, double zeta, const Units& u = {});

/// e_a u/ħ for e_a = (M/m) E_a; equals β E_a under the map.
double sm_exponent(const ThermalMap& tm, double E_a, const Units& u = {});

/// Physical wavefunctions have nonnegative position-basis coefficients.
bool is_physical_sm_state(const std::vector<double>& coefficients);

struct SpectrumCheck {
  std::vector<double> e_generator;  ///< ħ × decay rates of the discrete generator, ascending
  std::vector<double> e_closed;     ///< ħ²k²_lat/2M + Mc², ascending
  double walk_rate_e0 = 0.0;        ///< ħ × long-u decay of the walk kernel
  double walk_rate_e1 = 0.0;        ///< ħ × decay of the first Fourier mode
  double rel_error_e0 = 0.0;
  double rel_error_e1 = 0.0;
  double max_closed_form_error = 0.0;
  bool monotone = true;
  double M = 0.0;
};

/// Periodic ring of `sites` points with spacing h; generator (cΛ/2)Δ_h − c/Λ.
SpectrumCheck stationary_fp_spectrum_check(double Lambda, int sites, double h, double u_total,
                                           int walk_steps, const Units& u = {});

// ---------------------------------------------------------------------------
// x³ foliation, ultrarelativistic transverse kernel
// ---------------------------------------------------------------------------

struct X3Params {
  double pz = 10.0;
  double m = 1.0;
  double q = 0.0;
  double V = 0.0;   ///< constant
  double A0 = 0.0;  ///< constant
  int n_transverse = 12;  ///< grid points per transverse axis
  double h = 0.5;         ///< transverse spacing
  int n5 = 8;             ///< grid points along x⁵
  int mode5 = 1;          ///< the x⁵ grid mode identified with mc/ħ; fixes the x⁵ spacing
  double t = 0.3;
  Branch branch = Branch::plus;
  double p_transverse = 0.0;  ///< transverse momentum scale for the validity ratio
  Units units;
};

struct X3Report {
  std::vector<cplx> reduced;    ///< 2D kernel on the transverse grid, row-major
  std::vector<cplx> projected;  ///< x⁵-projected 3D kernel on the same grid
  double max_abs_diff = 0.0;
  double max_abs = 0.0;
  double offset = 0.0;          ///< (c/2p_z)(mc + p_z qA0/c²)² + p_z V/(mc) + p_z c
  double h5 = 0.0;
  double validity_ratio = 0.0;
  bool warning = false;
};

/// Spectral (plane-wave) evaluation on a periodic (x, y, x⁵) box. Throws when the
/// validity ratio p_z / max(mc, p_transverse) is below 1, warns below 10.
X3Report x3_foliation_kernel(const X3Params& p);

/// Energy offset of the reduced equation for the given parameters.
double x3_offset(const X3Params& p);

/// Width growth of a Gaussian packet under the reduced transverse propagator:
/// √(σ(t)² − σ₀²)/t along x, evaluated spectrally on a periodic grid.
double x3_spreading_rate(const X3Params& p, double sigma0, int grid, double spacing);

}  // namespace qoptics5
