#include <doctest.h>

#include "qoptics5/kg.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace qoptics5;

namespace {

const double kPi = std::numbers::pi;

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

/// Walks of n steps on a ring of L sites covering displacement d, by unfolding onto Z.
double ring_walks(int L, int d, int n) {
  double s = 0.0;
  for (int w = -n; w <= n; ++w) {
    const int disp = d + w * L;
    if ((n + disp) % 2 != 0 || std::abs(disp) > n) continue;
    s += binom(n, (n + disp) / 2);
  }
  return s;
}

}  // namespace

TEST_SUITE("kg") {

TEST_CASE("t = 0 gives the identity") {
  KGLattice lat;
  lat.dims = 2;
  lat.side = 3;
  lat.t = 0.0;
  const auto k = lattice_resolvent(lat);
  CHECK((k.K - Eigen::MatrixXd::Identity(9, 9)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ring of four: walk counts, Neumann series and resolvent") {
  KGLattice lat;
  lat.dims = 1;
  lat.side = 4;
  lat.t = 0.1;
  for (int n = 0; n <= 8; ++n)
    for (int j = 0; j < 4; ++j)
      CHECK(static_cast<double>(count_walks_enumerate(lat, 0, j, n)) == ring_walks(4, j, n));
  const auto k = lattice_resolvent(lat);
  const auto N = neumann_partial(lat, 60);
  CHECK((k.K - N).cwiseAbs().maxCoeff() < 1e-14);
  // closed form on C4: eigenvalues 2cos(πk/2) ⇒ K₀₀ = ¼ Σ 1/(1 − 2t cos(πk/2))
  double k00 = 0.0;
  for (int m = 0; m < 4; ++m) k00 += 0.25 / (1 - 2 * 0.1 * std::cos(kPi * m / 2));
  CHECK(k.K(0, 0) == doctest::Approx(k00).epsilon(1e-14));
}

TEST_CASE("resolvent is symmetric, positive and self consistent") {
  KGLattice lat;
  lat.dims = 3;
  lat.side = 4;
  lat.t = 0.1;
  const auto k = lattice_resolvent(lat);
  CHECK((k.K - k.K.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(k.K.minCoeff() > 0.0);
  CHECK(resolvent_identity_residual(k) < 1e-13);
  CHECK(resolvent_selfconsistency_residual(k) < 1e-13);
  const Eigen::VectorXd col = resolvent_column(lat, 5);
  CHECK((col - k.K.col(5)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("divergent weight is rejected") {
  KGLattice lat;
  lat.dims = 2;
  lat.side = 3;
  lat.t = 0.25;
  CHECK_THROWS_AS(lattice_resolvent(lat), PreconditionError);
  lat.t = 0.1;
  CHECK_THROWS_AS(lattice_resolvent(lat, 4), PreconditionError);
}

TEST_CASE("x5 projection solves the discrete KG equation, continuum error shrinks") {
  double prev = 1e9;
  for (int side : {3, 5, 7}) {
    KGSetup s;
    s.side = side;
    const auto r = kg_residual(s);
    CHECK(r.identity_residual < 1e-12);
    CHECK(r.projected_residual < 1e-10);
    CHECK(r.continuum_residual < prev);
    prev = r.continuum_residual;
    const double h = s.box / side;
    CHECK(r.k5 == doctest::Approx(2 * kPi / s.box));
    CHECK(r.k5_lattice_sq == doctest::Approx(4 / (h * h) * std::pow(std::sin(r.k5 * h / 2), 2)));
    const auto lat = kg_lattice_for(s);
    CHECK((1 - 10 * lat.t) / (lat.t * h * h) == doctest::Approx(s.mu0_sq));
  }
}

TEST_CASE("moment constants in five dimensions") {
  const auto mc = moment_constants(1.0, 16);
  CHECK(mc.A_inv_closed == doctest::Approx(64 * kPi * kPi));
  CHECK(mc.A_inv == doctest::Approx(64 * kPi * kPi).epsilon(1e-10));
  CHECK(mc.second_moment == doctest::Approx(1920 * kPi * kPi).epsilon(1e-10));
  CHECK(mc.per_axis.size() == 5);
  for (double v : mc.per_axis) CHECK(v == doctest::Approx(384 * kPi * kPi).epsilon(1e-4));
  CHECK(mc.isotropy_spread < 1e-10);
  const auto m2 = moment_constants(2.0);
  CHECK(m2.A_inv / mc.A_inv == doctest::Approx(32.0).epsilon(1e-10));
  CHECK(m2.second_moment / mc.second_moment == doctest::Approx(128.0).epsilon(1e-10));
  CHECK_THROWS_AS(moment_constants(-1.0), PreconditionError);
}

}  // TEST_SUITE
