#pragma once

#include "qoptics5/geometry.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace qoptics5 {

/// 128-bit integers for exact sums of products of 64-bit counts.
__extension__ using int128 = __int128;
__extension__ using uint128 = unsigned __int128;

// ---------------------------------------------------------------------------
// 4D action along a polygonal path
// ---------------------------------------------------------------------------

/// D_s = Σ_segments (s·o·√(−g̃ Δx Δx) − (q/c²) A·Δx), fields at segment midpoints.
/// o = sign(Δx⁰) orients the proper length by the cone the segment lies in, so
/// reversing a path flips the sign of D.
double action_D(const std::vector<Vec4>& path, const MatrixField4& gt, const VectorField4& A,
                double q, Branch branch, const Units& u = {});

// ---------------------------------------------------------------------------
// Null-step lattice in (t, x, x5)
// ---------------------------------------------------------------------------

enum class KernelMethod { exhaustive, transfer_matrix, sampled, sliced, closed_form };
std::string to_string(KernelMethod m);

/// Every step advances t by a and moves by ±a along exactly one of the active
/// spatial axes. With dims == 2 both x and x5 are active, with dims == 1 only x5.
struct LatticePathModel {
  int dims = 2;
  double a = 1.0;
  int steps = 0;  ///< N
  int dx = 0;     ///< endpoint separation along x in lattice units
};

struct MicroCount {
  std::uint64_t count = 0;
  bool parity_ok = true;
  std::string flag;  ///< explanation when the count is structurally zero
};

/// Number of lattice paths with the model's endpoints and Δx⁵ = dx5 (lattice units),
/// by transfer matrix with overflow-checked integer arithmetic.
MicroCount count_null_paths_micro(const LatticePathModel& model, int dx5);

/// Same count by explicit enumeration of all 2·dims^N step sequences. N ≤ 24.
MicroCount count_null_paths_enumerate(const LatticePathModel& model, int dx5);

/// Counts for every Δx⁵ in [−N, N]; entry i holds Δx⁵ = i − N.
std::vector<std::uint64_t> micro_histogram(const LatticePathModel& model);

/// Closed-form multinomial sum, used as a third route in tests and the CLI.
std::uint64_t count_multinomial(int steps, int dx, int dx5, int dims = 2);

struct SelfConsistency {
  int128 lhs = 0;
  int128 rhs = 0;
  std::int64_t residual = 0;
  int endpoints_checked = 0;
};

/// Σ_{x3, D'} R(N1; x3, D') R(N − N1; Δx − x3, D − D') against R(N; Δx, D). When
/// model.dx is used alone (`all_endpoints` false) only that endpoint and D = dx5 are
/// checked; otherwise every reachable (Δx, D) is.
SelfConsistency microcanonical_selfconsistency(const LatticePathModel& model, int split,
                                               bool all_endpoints = true, int dx5 = 0);

/// Link values ∫A·dx on lattice links. Coordinates are t = n·a, x = j·a.
struct LatticeGauge {
  std::function<double(double t, double x)> A0;
  std::function<double(double t, double x)> A1;
  /// Optional gauge function; adds χ(end) − χ(start) to every link.
  std::function<double(double t, double x)> chi;
  double q = 0.0;
  Units units;

  bool trivial() const { return !A0 && !A1 && !chi; }
  double link(double t, double x, double dt, double dx) const;
};

struct KernelEstimate {
  cplx value{0.0, 0.0};
  KernelMethod method = KernelMethod::transfer_matrix;
  int steps = 0;
  double spacing = 0.0;
  double stat_error = 0.0;
};

/// K_s(λ⁻¹) = Σ_paths exp{iλ⁻¹ D_s}, D_s = Σ_steps (s·Δx⁵ − (q/c²) link).
KernelEstimate canonical_kernel_qm(double lambda_inv, const LatticePathModel& model,
                                   Branch branch = Branch::minus, const LatticeGauge& gauge = {});

/// Amplitudes at every x after model.steps steps from x = 0 (vector index j + N).
std::vector<cplx> propagate_qm(double lambda_inv, const LatticePathModel& model, Branch branch,
                               const LatticeGauge& gauge, int start_step = 0,
                               const std::vector<cplx>* init = nullptr);

/// Brute force over step sequences; same value as canonical_kernel_qm. N ≤ 24.
KernelEstimate canonical_kernel_qm_enumerate(double lambda_inv, const LatticePathModel& model,
                                             Branch branch = Branch::minus,
                                             const LatticeGauge& gauge = {});

/// Explicit Fourier sum over the microcanonical histogram (A = 0 only).
cplx fourier_of_counts(double lambda_inv, const LatticePathModel& model, Branch branch);

struct GaugeReport {
  cplx open_before, open_after;
  cplx predicted_phase;   ///< exp{−iλ⁻¹ (q/c²)[χ(2) − χ(1)]}
  cplx measured_phase;    ///< open_after / open_before
  double phase_error = 0.0;
  cplx loop_before, loop_after;
  double loop_delta = 0.0;
};

/// Open kernel from (0,0) to (N a, dx a) and loop kernel through split step
/// `loop_split` with and without the gauge function χ.
GaugeReport gauge_transform_kernel(double lambda_inv, const LatticePathModel& model,
                                   Branch branch, const LatticeGauge& gauge,
                                   std::function<double(double, double)> chi, int loop_split);

struct LoopIdentity {
  cplx loop;        ///< Σ_3 K_back(1←3) K(3←1) with reversed-action backward propagation
  cplx sum_sq;      ///< Σ_3 |K(3←1)|²
  double residual = 0.0;
};

/// Quantum-event kernel at base point (0,0) with the turning slice at `split` steps.
LoopIdentity quantum_probability_identity(double lambda_inv, int split, int dims, Branch branch,
                                          const LatticeGauge& gauge = {});

// ---------------------------------------------------------------------------
// Riemannian random-walk lattice (statistical ensembles)
// ---------------------------------------------------------------------------

enum class Boundary { periodic, open };

struct StatLattice {
  int dims = 1;  ///< 1 or 2
  int side = 2;
  Boundary boundary = Boundary::open;
  double a = 1.0;
  int max_steps = 1;
  double d_min = 0.0;

  int sites() const { return dims == 1 ? side : side * side; }
};

/// ρ(n; i → j) for n = 0..max_steps, exact integers (as double) by transfer matrix.
std::vector<double> rho_series(const StatLattice& lat, int from, int to);

/// k₊ = Σ_{n: n a ≥ d_min} e^{−n a Λ⁻¹} ρ(n; i → j).
KernelEstimate canonical_kernel_sm(double Lambda_inv, const StatLattice& lat, int from, int to);

/// Explicit Laplace sum of a ρ series; used as the cross-check route.
double laplace_of_counts(double Lambda_inv, const StatLattice& lat, const std::vector<double>& rho);

/// Importance-weighted random-walk estimate of k₊. Sample i draws from
/// mt19937_64(seed_seq{seed, i}) so the result does not depend on `threads`.
KernelEstimate canonical_kernel_sm_sampled(double Lambda_inv, const StatLattice& lat, int from,
                                           int to, std::uint64_t samples, std::uint64_t seed,
                                           int threads = 1);

struct ThermoValue {
  double value = 0.0;
  bool degenerate = false;  ///< true when the underlying sum is zero (value = −∞)
};

/// S₊(n) = k_B ln Σ_sites ρ(n; i → i).
ThermoValue entropy_micro(const StatLattice& lat, int n, const Units& u = {});

/// Ψ₊ = k_B ln Σ_sites k₊(Λ⁻¹, i, i).
ThermoValue massieu_canonical(const StatLattice& lat, double Lambda_inv, const Units& u = {});

/// Ψ₊ recomputed as k_B ln Σ_n e^{−n a Λ⁻¹} e^{S₊(n)/k_B}.
ThermoValue massieu_from_entropy(const StatLattice& lat, double Lambda_inv, const Units& u = {});

}  // namespace qoptics5
