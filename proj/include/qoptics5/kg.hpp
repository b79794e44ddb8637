#pragma once

#include "qoptics5/core.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <vector>

namespace qoptics5 {

/// Periodic hypercubic lattice with per-step weight t = e^{−aℒ⁻¹} and spacing h.
struct KGLattice {
  int dims = 5;
  int side = 3;
  double t = 0.05;
  double h = 1.0;
  int sites() const;
  int degree() const { return 2 * dims; }
};

/// Adjacency A with multi-edges kept on rings of side ≤ 2.
Eigen::SparseMatrix<double> kg_adjacency(const KGLattice& lat);

struct ResolventKernel {
  KGLattice lattice;
  Eigen::MatrixXd K;  ///< (I − tA)⁻¹, dense
};

/// Dense inverse. Throws PreconditionError when t·2·dims ≥ 1 or the lattice is too large.
ResolventKernel lattice_resolvent(const KGLattice& lat, int max_sites = 4096);

/// Column (I − tA)⁻¹ e_source by conjugate gradients.
Eigen::VectorXd resolvent_column(const KGLattice& lat, int source, double tol = 1e-15,
                                 int* iterations = nullptr);

/// Σ_{n ≤ nmax} tⁿ Aⁿ.
Eigen::MatrixXd neumann_partial(const KGLattice& lat, int nmax);

/// Number of lattice walks of exactly n steps from i to j, by depth-first enumeration.
std::uint64_t count_walks_enumerate(const KGLattice& lat, int from, int to, int n);

/// max |(I − tA)K − I| over all entries.
double resolvent_identity_residual(const ResolventKernel& k);
/// max |(I − tA)⁻¹ − I − tA(I − tA)⁻¹|.
double resolvent_selfconsistency_residual(const ResolventKernel& k);

/// Physical setup for the projection check: box length ℓ, screening μ0², x⁵ mode index.
struct KGSetup {
  int side = 5;
  double box = 6.0;
  double mu0_sq = 0.5;
  int mode5 = 1;
};

struct KGResidual {
  KGLattice lattice;
  double identity_residual = 0.0;    ///< max |(I − tA)K e₀ − e₀|
  double projected_residual = 0.0;   ///< discrete KG with μ² = μ0² + k̂5², off source, relative
  double continuum_residual = 0.0;   ///< same operator with exact k5², off source, relative
  double k5 = 0.0;                   ///< 2π·mode5/ℓ, playing the role of mc/ħ
  double k5_lattice_sq = 0.0;        ///< (4/h²) sin²(k5 h/2)
  double mu_eff_sq = 0.0;
  int cg_iterations = 0;
};

/// t is chosen so that (1 − 2·dims·t)/(t h²) = μ0² with h = ℓ/side.
KGLattice kg_lattice_for(const KGSetup& s);
KGResidual kg_residual(const KGSetup& s);

struct MomentConstants {
  double A_inv = 0.0;                ///< ∫d⁵η e^{−|η|/ℒ}
  double A_inv_closed = 0.0;         ///< Ω₄ · 4! · ℒ⁵
  double second_moment = 0.0;        ///< ∫d⁵η |η|² e^{−|η|/ℒ}
  double second_moment_closed = 0.0; ///< Ω₄ · 6! · ℒ⁷
  std::vector<double> per_axis;      ///< ∫ η_i² e^{−|η|/ℒ} on a product grid
  double per_axis_closed = 0.0;      ///< second_moment_closed / 5
  double isotropy_spread = 0.0;      ///< (max − min)/mean over axes
};

/// Radial Gauss-Legendre quadrature for the totals; product grid with `grid` nodes per
/// axis for the per-axis moments (0 skips the product grid).
MomentConstants moment_constants(double L, int grid = 0);

}  // namespace qoptics5
