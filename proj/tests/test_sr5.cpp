#include <doctest.h>

#include "qoptics5/sr5.hpp"

#include <cmath>
#include <random>

using namespace qoptics5;

namespace {

const Eigen::Vector3d ex(1, 0, 0);

double oracle_invariant(const Vec5& p) {
  return -p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3] + p[4] * p[4];
}

FiveMomentum rest(double m) { return make_null_momentum(m, ex, m); }

}  // namespace

TEST_SUITE("sr5") {

TEST_CASE("null momenta") {
  const auto g = make_null_momentum(1.0, ex, 0.0);
  CHECK(g.p[1] == doctest::Approx(1.0));
  CHECK(g.p[kX5] == 0.0);
  const auto r = rest(2.0);
  CHECK((r.p - Vec5(2, 0, 0, 0, 2)).norm() < 1e-15);
  CHECK(r.energy() == doctest::Approx(2.0));
  CHECK(r.mass() == doctest::Approx(2.0));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 5.0);
  for (int i = 0; i < 200; ++i) {
    const double m = U(rng), E = m + U(rng);
    const auto p = make_null_momentum(E, Eigen::Vector3d(U(rng), U(rng) - 2.5, 1.0), m);
    CHECK(std::abs(oracle_invariant(p.p)) < 1e-12 * E * E);
    CHECK(null_invariant(p.p) == doctest::Approx(oracle_invariant(p.p)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(make_null_momentum(0.5, ex, 1.0), ThresholdError);
}

TEST_CASE("pair creation at threshold and above") {
  const double mX = 1.5;
  {
    const auto pc = pair_creation(make_null_momentum(mX, ex, 0), make_null_momentum(mX, -ex, 0), mX);
    CHECK((pc.X.p - Vec5(mX, 0, 0, 0, mX)).norm() < 1e-12);
    CHECK((pc.Xbar.p - Vec5(mX, 0, 0, 0, -mX)).norm() < 1e-12);
  }
  {
    const auto pc = pair_creation(make_null_momentum(2 * mX, ex, 0), make_null_momentum(2 * mX, -ex, 0), mX);
    CHECK(pc.X.spatial().norm() == doctest::Approx(std::sqrt(3.0) * mX));
    CHECK(pc.X.energy() == doctest::Approx(2 * mX));
    CHECK(pc.Xbar.energy() == doctest::Approx(2 * mX));
    CHECK(pc.conservation_residual == 0.0);
  }
  CHECK_THROWS_AS(pair_creation(make_null_momentum(0.4 * mX, ex, 0), make_null_momentum(0.4 * mX, -ex, 0), mX),
                  ThresholdError);
  // collinear photons have s = 0
  CHECK_THROWS_AS(pair_creation(make_null_momentum(5, ex, 0), make_null_momentum(5, ex, 0), mX), ThresholdError);
  CHECK_THROWS_AS(pair_creation(rest(1.0), make_null_momentum(5, ex, 0), 0.1), PreconditionError);
}

TEST_CASE("pair creation with random photons: conservation, nullity, opposite masses") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  int made = 0;
  for (int i = 0; i < 200; ++i) {
    const auto p1 = make_null_momentum(1 + 4 * std::abs(U(rng)), Eigen::Vector3d(U(rng), U(rng), U(rng)), 0);
    const auto p2 = make_null_momentum(1 + 4 * std::abs(U(rng)), Eigen::Vector3d(U(rng), U(rng), U(rng)), 0);
    const double mX = 0.1 + std::abs(U(rng));
    const Vec5 P = p1.p + p2.p;
    const double s = P[0] * P[0] - P.segment<3>(1).squaredNorm();
    if (s < 4 * mX * mX) {
      CHECK_THROWS_AS(pair_creation(p1, p2, mX), ThresholdError);
      continue;
    }
    const auto pc = pair_creation(p1, p2, mX);
    ++made;
    CHECK((pc.X.p + pc.Xbar.p - P).cwiseAbs().maxCoeff() < 1e-12 * P[0]);
    CHECK(std::abs(oracle_invariant(pc.X.p)) < 1e-12 * P[0] * P[0]);
    CHECK(std::abs(oracle_invariant(pc.Xbar.p)) < 1e-12 * P[0] * P[0]);
    CHECK(pc.Xbar.mass() == doctest::Approx(-pc.X.mass()));
    CHECK(pc.X.mass() == doctest::Approx(mX));
  }
  CHECK(made > 50);
}

TEST_CASE("discrete transformations") {
  const Vec5 p(3, 1, 2, 0.5, std::sqrt(9 - 1 - 4 - 0.25));
  CHECK((compose(make_C(), make_C()).L - Mat5::Identity()).norm() == 0.0);
  const Vec5 c = apply_transform(make_C(), p);
  CHECK(c[kX5] == -p[kX5]);
  CHECK(c.head<4>() == p.head<4>());
  const Vec5 pp = apply_transform(make_P(), p);
  CHECK(pp.segment<3>(1) == -p.segment<3>(1));
  const Vec5 t = apply_transform(make_T(), p);
  CHECK(t[0] == -p[0]);
  Transform5 bad;
  bad.L(0, 1) = 0.5;
  CHECK(pseudo_orthogonality_error(bad.L) > 0.1);
  CHECK_THROWS_AS(apply_transform(bad, p), PreconditionError);
}

TEST_CASE("an x5 boost turns a 4D photon into a massive momentum") {
  const auto g = make_null_momentum(2.0, ex, 0.0);
  const Vec5 b = apply_transform(make_boost(5, 0.7), g.p);
  CHECK(std::abs(b[kX5]) > 0.1);
  CHECK(std::abs(oracle_invariant(b)) < 1e-12);
  const Vec5 r = apply_transform(make_rotation(1, 5, 0.4), g.p);
  CHECK(r[kX5] == doctest::Approx(std::sin(0.4) * 2.0));
  CHECK(make_boost(5, 0.7).kind == TransformKind::x5_boost);
  CHECK(make_rotation(1, 5, 0.4).kind == TransformKind::x5_rotation);
}

TEST_CASE("random O(4,1) elements preserve the null cone") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const auto T = random_o41(rng, 1.0, true);
    CHECK(pseudo_orthogonality_error(T.L) < 1e-12);
    const double m = U(rng);
    const auto p = make_null_momentum(m + U(rng), Eigen::Vector3d(U(rng), 1, U(rng)), m);
    const Vec5 q = apply_transform(T, p.p);
    CHECK(std::abs(oracle_invariant(q)) < 1e-12 * std::max(1.0, q.squaredNorm()));
  }
}

TEST_CASE("duality pictures: ratios only") {
  const auto rep = duality_pictures({rest(1.0), rest(2.0), rest(0.5)}, 3.7, 0.2);
  CHECK(rep.M_ratio[1] == doctest::Approx(2.0));
  CHECK(rep.M_ratio[2] == doctest::Approx(0.5));
  CHECK(rep.max_ratio_mismatch < 1e-14);
  CHECK(rep.e_over_E[0] == doctest::Approx(rep.e_over_E[1]));
  CHECK(rep.pictures[0].qm[1] == 0.0);
  // O(3) rotation fixes a rest momentum
  const auto rotated = apply_transform(make_rotation(1, 2, 0.9), rest(2.0).p);
  CHECK((rotated - rest(2.0).p).norm() < 1e-15);
  const auto zero = duality_pictures({make_null_momentum(0.0, ex, 0.0)});
  CHECK(zero.pictures[0].degenerate);
  CHECK_THROWS_AS(duality_pictures({make_null_momentum(3.0, ex, 1.0)}), PreconditionError);
}

TEST_CASE("transform kind names") {
  CHECK(to_string(TransformKind::x5_boost) == "x5_boost");
  CHECK(to_string(TransformKind::C) == "C");
}

}  // TEST_SUITE
