#include <doctest.h>

#include "helpers.hpp"
#include "qoptics5/geodesics.hpp"

#include <cmath>

using namespace qoptics5;

namespace {

Vec5 null_start(const MetricField5& h, const FoliationX5& f, const Vec4& u4, Branch br) {
  Vec5 v;
  v << u4, 0.0;
  const double k = f.q / (f.units.c * f.units.c);
  v[kX5] = null_v5(h(Vec5::Zero()), v, sign_of(br) - k * f.A(Vec4::Zero()).dot(u4));
  return v;
}

}  // namespace

TEST_SUITE("geodesics") {

TEST_CASE("flat straight line stays null") {
  const auto f = builtin_foliation("flat5", {});
  const auto h = assemble_kk_metric(f);
  const Vec4 u(std::sqrt(1 + 0.25), 0.5, 0, 0);
  GeodesicConfig cfg;
  cfg.max_steps = 200;
  const auto p = integrate_null_geodesic_5d(h, Vec5::Zero(), null_start(h, f, u, Branch::minus), cfg);
  CHECK(p.x.back()[1] == doctest::Approx(0.5 * 0.2).epsilon(1e-12));
  CHECK(p.max_null_residual < 1e-13);
}

TEST_CASE("non-null start is rejected") {
  const auto h = assemble_kk_metric(builtin_foliation("flat5", {}));
  CHECK_THROWS_AS(integrate_null_geodesic_5d(h, Vec5::Zero(), Vec5(1, 0, 0, 0, 0.5), {}),
                  PreconditionError);
}

TEST_CASE("null_v5 picks the root nearest the hint") {
  Mat5 h = Vec5(-1, 1, 1, 1, 1).asDiagonal();
  Vec5 v(1, 0, 0, 0, 0);
  CHECK(null_v5(h, v, 0.9) == doctest::Approx(1.0));
  CHECK(null_v5(h, v, -0.3) == doctest::Approx(-1.0));
  v = Vec5(0, 1, 0, 0, 0);  // spacelike 4D part cannot be completed
  CHECK_THROWS_AS(null_v5(h, v, 0.0), SingularError);
}

TEST_CASE("cyclotron motion in constant B, both branches") {
  BuiltinParams bp;
  bp.B = 2.0;
  bp.q = 1.0;
  const auto f = builtin_foliation("constant-B", bp);
  const Vec4 x0 = Vec4::Zero();
  const double ux = 0.4;
  const Vec4 u(std::sqrt(1 + ux * ux), ux, 0, 0);
  GeodesicConfig cfg;
  cfg.step = 1e-3;
  cfg.max_steps = 2000;
  for (Branch br : {Branch::minus, Branch::plus}) {
    const auto p = integrate_charged_geodesic_4d(tilde_of(f).g, f.A, f.q, x0, u, cfg, br);
    const auto& a = p.x.front();
    const auto& b = p.x[p.x.size() / 2];
    const auto& c = p.x.back();
    const double r = testutil::circumradius(a[1], a[2], b[1], b[2], c[1], c[2]);
    CHECK(r == doctest::Approx(ux / (bp.q * bp.B)).epsilon(1e-8));
    // the minus branch turns counterclockwise for q B > 0
    const double turn = p.x[10][2];
    CHECK((br == Branch::minus ? turn > 0 : turn < 0));
    CHECK(p.max_norm_residual < 1e-10);
  }
}

TEST_CASE("hyperbolic motion from rest in constant E") {
  BuiltinParams bp;
  bp.E = 0.5;
  const auto f = builtin_foliation("constant-E", bp);
  GeodesicConfig cfg;
  cfg.step = 1e-3;
  cfg.max_steps = 1000;
  const double acc = bp.q * bp.E;
  for (Branch br : {Branch::minus, Branch::plus}) {
    const auto p = integrate_charged_geodesic_4d(tilde_of(f).g, f.A, f.q, Vec4::Zero(),
                                                 Vec4(1, 0, 0, 0), cfg, br);
    const double tau = p.s.back();
    const double expect = -sign_of(br) * (std::cosh(acc * tau) - 1) / acc;
    CHECK(p.x.back()[1] == doctest::Approx(expect).epsilon(1e-10));
    CHECK(p.u.back()[0] == doctest::Approx(std::cosh(acc * tau)).epsilon(1e-10));
  }
}

TEST_CASE("projection of the 5D null geodesic follows the 4D branch it selects") {
  BuiltinParams bp;
  bp.B = 1.0;
  bp.Phi = 1.5;
  const auto f = builtin_foliation("constant-B", bp);
  const auto h = assemble_kk_metric(f);
  const double ux = 0.3;
  // g̃ = η so u is g̃-normalized; h(v,v) = Φ²(g̃(u,u) + w²) vanishes for w = ±1
  const Vec4 u(std::sqrt(1 + ux * ux), ux, 0, 0);
  GeodesicConfig cfg;
  cfg.max_steps = 500;
  for (Branch br : {Branch::minus, Branch::plus}) {
    Vec5 v;
    v << u, 0.0;
    v[kX5] = null_v5(h(Vec5::Zero()), v, sign_of(br) - f.A(Vec4::Zero()).dot(u));
    const auto p5 = integrate_null_geodesic_5d(h, Vec5::Zero(), v, cfg);
    const auto pr = project_to_4d(p5, f);
    CHECK(pr.branch == br);
    CHECK(pr.max_other5d_residual < 1e-10);
    GeodesicConfig c4 = cfg;
    c4.step = cfg.step * pr.dtau_dsigma.front();
    const auto p4 = integrate_charged_geodesic_4d(tilde_of(f).g, f.A, f.q, Vec4::Zero(),
                                                  pr.path.u.front(), c4, br);
    double dev = 0.0;
    for (size_t i = 0; i < p4.x.size(); ++i) dev = std::max(dev, (p4.x[i] - pr.path.x[i]).norm());
    CHECK(dev < 1e-8);
    const auto mb = conserved_mbar(p5, h);
    CHECK(mb.max_deviation < 1e-10);
    // m̄ = Φ² w for the h-affine parameter at unit dτ/dσ scaled back to σ
    CHECK(std::abs(mb.mean) > 0.0);
  }
}

TEST_CASE("charges need the matching symmetry flag") {
  const auto f = builtin_foliation("flat5", {});
  const auto h = assemble_kk_metric(f);
  GeodesicConfig cfg;
  cfg.max_steps = 5;
  const auto p = integrate_null_geodesic_5d(h, Vec5::Zero(), Vec5(1, 0, 0, 0, 1), cfg);
  CHECK_NOTHROW(conserved_mbar(p, h));
  CHECK_THROWS_AS(conserved_Mbar(p, h), SymmetryError);
  MetricField5 unflagged([&](const Vec5& x) { return h(x); }, {});
  CHECK_THROWS_AS(conserved_mbar(p, unflagged), SymmetryError);
}

TEST_CASE("x0-Killing charge is conserved on an x0-independent metric") {
  FoliationX0 f;
  f.G = [](const Vec4& y) {
    Mat4 m = Mat4::Identity();
    m(0, 0) = 1.0 + 0.1 * y[1];
    return m;
  };
  f.a = [](const Vec4& y) { return Vec4(0, 0.2 * y[0], 0, 0); };
  f.phi = [](const Vec4& y) { return 1.0 + 0.05 * y[2]; };
  f.Q = 1.0;
  const auto h = assemble_x0_metric(f);
  Vec5 v(0, 0.3, 0.1, 0.0, 0.2);
  const Mat5 h0 = h(Vec5::Zero());
  // solve for v0 on the null cone
  const double a = h0(0, 0), b = 2 * h0.block<1, 4>(0, 1).dot(v.tail<4>());
  const double c = v.tail<4>().dot(h0.block<4, 4>(1, 1) * v.tail<4>());
  v[0] = (-b - std::sqrt(b * b - 4 * a * c)) / (2 * a);
  GeodesicConfig cfg;
  cfg.max_steps = 400;
  const auto p = integrate_null_geodesic_5d(h, Vec5::Zero(), v, cfg);
  CHECK(conserved_Mbar(p, h).max_deviation < 1e-9);
}

TEST_CASE("batch integration is deterministic and thread-count independent") {
  BuiltinParams bp;
  bp.B = 1.0;
  const auto f = builtin_foliation("constant-B", bp);
  const auto h = assemble_kk_metric(f);
  std::vector<std::pair<Vec5, Vec5>> inits;
  for (int i = 0; i < 6; ++i) {
    const double ux = 0.1 * i;
    inits.emplace_back(Vec5::Zero(), null_start(h, f, Vec4(std::sqrt(1 + ux * ux), ux, 0, 0), Branch::minus));
  }
  GeodesicConfig cfg;
  cfg.max_steps = 50;
  const auto a = integrate_null_geodesic_batch(h, inits, cfg, 1);
  const auto b = integrate_null_geodesic_batch(h, inits, cfg, 4);
  for (size_t i = 0; i < a.size(); ++i) CHECK((a[i].x.back() - b[i].x.back()).norm() == 0.0);
}

TEST_CASE("Zero Kelvin: free Fermat path and the physical-time integrand") {
  MatrixField4 G = [](const Vec4&) { return Mat4(Mat4::Identity()); };
  VectorField4 a0 = [](const Vec4&) { return Vec4::Zero().eval(); };
  GeodesicConfig cfg;
  cfg.max_steps = 100;
  cfg.step = 0.01;
  const Vec4 u(0.6, 0.8, 0, 0);
  const auto z = integrate_zero_kelvin(G, a0, 1.0, Vec4::Zero(), u, cfg);
  CHECK(z.path.x.back()[1] == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(z.x0.back() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(z.Mbar.mean == doctest::Approx(-1.0));
  // a constant shift a changes physical time by −(Q/c²) a·Δy
  VectorField4 a1 = [](const Vec4&) { return Vec4(0.5, 0, 0, 0); };
  const auto z1 = integrate_zero_kelvin(G, a1, 1.0, Vec4::Zero(), u, cfg);
  CHECK(z1.x0.back() == doctest::Approx(1.0 - 0.5 * 0.6).epsilon(1e-12));
  MatrixField4 bad = [](const Vec4&) { return testutil::eta4(); };
  CHECK_THROWS_AS(integrate_zero_kelvin(bad, a0, 1.0, Vec4::Zero(), u, cfg), SignatureError);
}

}  // TEST_SUITE
