#include "qoptics5/kg.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qoptics5 {

namespace {

constexpr double kPi = std::numbers::pi;

void check_lattice(const KGLattice& lat) {
  if (lat.dims < 1 || lat.dims > 5) throw PreconditionError("KG lattice dims must be 1..5");
  if (lat.side < 1) throw PreconditionError("KG lattice side must be >= 1");
  if (!(lat.h > 0.0)) throw PreconditionError("KG lattice spacing must be positive");
  if (!(lat.t >= 0.0) || !(lat.t * lat.degree() < 1.0)) {
    std::ostringstream os;
    os << "Neumann series diverges: t*degree = " << lat.t * lat.degree() << " >= 1";
    throw PreconditionError(os.str());
  }
}

std::vector<int> coords(const KGLattice& lat, int idx) {
  std::vector<int> c(lat.dims);
  for (int d = lat.dims - 1; d >= 0; --d) {
    c[d] = idx % lat.side;
    idx /= lat.side;
  }
  return c;
}

int index_of(const KGLattice& lat, const std::vector<int>& c) {
  int idx = 0;
  for (int d = 0; d < lat.dims; ++d) idx = idx * lat.side + ((c[d] % lat.side) + lat.side) % lat.side;
  return idx;
}

std::vector<std::vector<int>> neighbor_lists(const KGLattice& lat) {
  std::vector<std::vector<int>> nb(lat.sites());
  for (int i = 0; i < lat.sites(); ++i) {
    auto c = coords(lat, i);
    for (int d = 0; d < lat.dims; ++d)
      for (int s : {-1, 1}) {
        auto n = c;
        n[d] += s;
        nb[i].push_back(index_of(lat, n));
      }
  }
  return nb;
}

Eigen::SparseMatrix<double> screened_operator(const KGLattice& lat) {
  Eigen::SparseMatrix<double> I(lat.sites(), lat.sites());
  I.setIdentity();
  return I - lat.t * kg_adjacency(lat);
}

// Gauss-Legendre nodes on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

/// Composite Gauss-Legendre on [0, R] with `panels` panels of `order` nodes.
double radial_integral(double p, double L, double R, int panels, int order) {
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  double acc = 0.0;
  const double ph = R / panels;
  for (int k = 0; k < panels; ++k) {
    const double a = k * ph;
    for (int i = 0; i < order; ++i) {
      const double r = a + 0.5 * ph * (x[i] + 1.0);
      acc += 0.5 * ph * w[i] * std::pow(r, p) * std::exp(-r / L);
    }
  }
  return acc;
}

}  // namespace

int KGLattice::sites() const {
  int n = 1;
  for (int d = 0; d < dims; ++d) n *= side;
  return n;
}

Eigen::SparseMatrix<double> kg_adjacency(const KGLattice& lat) {
  if (lat.dims < 1 || lat.dims > 5 || lat.side < 1) throw PreconditionError("invalid KG lattice shape");
  const auto nb = neighbor_lists(lat);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(lat.sites()) * lat.degree());
  for (int i = 0; i < lat.sites(); ++i)
    for (int j : nb[i]) trip.emplace_back(i, j, 1.0);
  Eigen::SparseMatrix<double> A(lat.sites(), lat.sites());
  A.setFromTriplets(trip.begin(), trip.end());  // duplicates add, keeping multi-edges
  return A;
}

ResolventKernel lattice_resolvent(const KGLattice& lat, int max_sites) {
  check_lattice(lat);
  if (lat.sites() > max_sites) {
    std::ostringstream os;
    os << "dense resolvent limited to " << max_sites << " sites, lattice has " << lat.sites();
    throw PreconditionError(os.str());
  }
  ResolventKernel k;
  k.lattice = lat;
  const Eigen::MatrixXd M = Eigen::MatrixXd(screened_operator(lat));
  k.K = M.partialPivLu().inverse();
  return k;
}

Eigen::VectorXd resolvent_column(const KGLattice& lat, int source, double tol, int* iterations) {
  check_lattice(lat);
  if (source < 0 || source >= lat.sites()) throw PreconditionError("source site out of range");
  const auto M = screened_operator(lat);
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(10 * lat.sites());
  cg.compute(M);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(lat.sites());
  b[source] = 1.0;
  Eigen::VectorXd x = cg.solve(b);
  if (iterations) *iterations = static_cast<int>(cg.iterations());
  // CG stalls near round-off; accept anything within a few ulps of the requested tolerance
  if (cg.info() != Eigen::Success && cg.error() > 1e3 * std::max(tol, 1e-16))
    throw ConvergenceError("conjugate gradients did not converge for the resolvent column");
  return x;
}

Eigen::MatrixXd neumann_partial(const KGLattice& lat, int nmax) {
  check_lattice(lat);
  const Eigen::MatrixXd A = Eigen::MatrixXd(kg_adjacency(lat));
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(lat.sites(), lat.sites());
  Eigen::MatrixXd sum = term;
  for (int n = 1; n <= nmax; ++n) {
    term = lat.t * (A * term);
    sum += term;
  }
  return sum;
}

std::uint64_t count_walks_enumerate(const KGLattice& lat, int from, int to, int n) {
  if (n < 0) throw PreconditionError("walk length must be >= 0");
  const auto nb = neighbor_lists(lat);
  std::uint64_t count = 0;
  auto dfs = [&](auto&& self, int site, int left) -> void {
    if (left == 0) {
      count += site == to;
      return;
    }
    for (int j : nb[site]) self(self, j, left - 1);
  };
  dfs(dfs, from, n);
  return count;
}

double resolvent_identity_residual(const ResolventKernel& k) {
  const Eigen::MatrixXd M = Eigen::MatrixXd(screened_operator(k.lattice));
  return (M * k.K - Eigen::MatrixXd::Identity(k.K.rows(), k.K.cols())).cwiseAbs().maxCoeff();
}

double resolvent_selfconsistency_residual(const ResolventKernel& k) {
  const Eigen::MatrixXd A = Eigen::MatrixXd(kg_adjacency(k.lattice));
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(k.K.rows(), k.K.cols());
  return (k.K - I - k.lattice.t * A * k.K).cwiseAbs().maxCoeff();
}

KGLattice kg_lattice_for(const KGSetup& s) {
  if (s.side < 3) throw PreconditionError("KG setup needs side >= 3");
  if (!(s.box > 0.0) || !(s.mu0_sq > 0.0)) throw PreconditionError("KG setup needs box > 0 and mu0^2 > 0");
  if (s.mode5 < 1 || 2 * s.mode5 >= s.side) throw PreconditionError("KG mode5 must be below Nyquist");
  KGLattice lat;
  lat.dims = 5;
  lat.side = s.side;
  lat.h = s.box / s.side;
  lat.t = 1.0 / (lat.degree() + s.mu0_sq * lat.h * lat.h);
  return lat;
}

KGResidual kg_residual(const KGSetup& s) {
  KGResidual r;
  r.lattice = kg_lattice_for(s);
  const KGLattice& lat = r.lattice;
  const int L = lat.side, S = lat.sites();
  const Eigen::VectorXd col = resolvent_column(lat, 0, 1e-15, &r.cg_iterations);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(S);
  b[0] = 1.0;
  r.identity_residual = (screened_operator(lat) * col - b).cwiseAbs().maxCoeff();

  const double h = lat.h;
  r.k5 = 2 * kPi * s.mode5 / s.box;
  const double sn = std::sin(r.k5 * h / 2);
  r.k5_lattice_sq = 4.0 / (h * h) * sn * sn;
  r.mu_eff_sq = s.mu0_sq + r.k5_lattice_sq;
  // project the last axis (x⁵) onto exp(i k5 x5)
  const int S4 = S / L;
  std::vector<cplx> phi(S4, 0.0);
  for (int i = 0; i < S4; ++i)
    for (int j = 0; j < L; ++j)
      phi[i] += h * std::exp(cplx(0.0, -r.k5 * j * h)) * col[i * L + j];
  KGLattice lat4 = lat;
  lat4.dims = 4;
  const auto nb4 = neighbor_lists(lat4);
  double scale = 0.0, res_lat = 0.0, res_cont = 0.0;
  for (int i = 0; i < S4; ++i) scale = std::max(scale, r.mu_eff_sq * std::abs(phi[i]));
  for (int i = 1; i < S4; ++i) {
    cplx lap = 0.0;
    for (int j : nb4[i]) lap += (phi[j] - phi[i]) / (h * h);
    res_lat = std::max(res_lat, std::abs(lap - r.mu_eff_sq * phi[i]));
    res_cont = std::max(res_cont, std::abs(lap - (s.mu0_sq + r.k5 * r.k5) * phi[i]));
  }
  r.projected_residual = res_lat / scale;
  r.continuum_residual = res_cont / scale;
  return r;
}

MomentConstants moment_constants(double L, int grid) {
  if (!(L > 0.0)) throw PreconditionError("moment constants need L > 0");
  MomentConstants m;
  const double omega4 = 8.0 * kPi * kPi / 3.0;
  const double R = 80.0 * L;  // e^{−80} r⁶ tail is far below double precision relative to the total
  m.A_inv = omega4 * radial_integral(4.0, L, R, 64, 16);
  m.second_moment = omega4 * radial_integral(6.0, L, R, 64, 16);
  m.A_inv_closed = omega4 * 24.0 * std::pow(L, 5);
  m.second_moment_closed = omega4 * 720.0 * std::pow(L, 7);
  m.per_axis_closed = m.second_moment_closed / 5.0;
  const double check = radial_integral(4.0, L, R, 128, 16);
  if (std::abs(check * omega4 - m.A_inv) > 1e-10 * m.A_inv)
    throw ConvergenceError("radial quadrature did not converge");
  if (grid > 0) {
    std::vector<double> x, w;
    gauss_legendre(grid, x, w);
    // η = ℒ sinh(s) on s ∈ [−4, 4] clusters nodes near the kink of e^{−|η|/ℒ} at the origin
    const double smax = 4.0;
    std::vector<double> eta_n(grid), w_n(grid);
    for (int k = 0; k < grid; ++k) {
      eta_n[k] = L * std::sinh(smax * x[k]);
      w_n[k] = L * smax * w[k] * std::cosh(smax * x[k]);
    }
    m.per_axis.assign(5, 0.0);
    const long total = static_cast<long>(std::pow(grid, 5));
    for (long n = 0; n < total; ++n) {
      long k = n;
      double r2 = 0.0, wt = 1.0;
      double eta[5];
      for (int d = 0; d < 5; ++d) {
        const int id = static_cast<int>(k % grid);
        k /= grid;
        eta[d] = eta_n[id];
        wt *= w_n[id];
        r2 += eta[d] * eta[d];
      }
      const double f = wt * std::exp(-std::sqrt(r2) / L);
      for (int d = 0; d < 5; ++d) m.per_axis[d] += f * eta[d] * eta[d];
    }
    const auto [mn, mx] = std::minmax_element(m.per_axis.begin(), m.per_axis.end());
    double mean = 0.0;
    for (double v : m.per_axis) mean += v / 5.0;
    m.isotropy_spread = (*mx - *mn) / mean;
  }
  return m;
}

}  // namespace qoptics5
