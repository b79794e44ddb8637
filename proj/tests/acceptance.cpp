// Acceptance runner: one PASS/FAIL line per criterion with the measured numbers.
// Exit status is nonzero only when a criterion fails that is not a documented limitation.

#include "helpers.hpp"
#include "qoptics5/convergence.hpp"
#include "qoptics5/geodesics.hpp"
#include "qoptics5/kernels.hpp"
#include "qoptics5/kg.hpp"
#include "qoptics5/limits.hpp"
#include "qoptics5/scenarios.hpp"
#include "qoptics5/sr5.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace qoptics5;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
  bool known_limitation = false;
};

std::string fmt(const char* f, double a) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

int failures = 0;

void run(int id, const std::string& name, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && dt > budget_s) {
    v.pass = false;
    v.detail += "; over time budget";
  }
  std::printf("%s %2d %-24s %7.3fs  %s%s\n", v.pass ? "PASS" : "FAIL", id, name.c_str(), dt,
              v.detail.c_str(), (!v.pass && v.known_limitation) ? " [known limitation]" : "");
  std::fflush(stdout);
  if (!v.pass && !v.known_limitation) ++failures;
}

// ---------------------------------------------------------------------------

Verdict foliation_roundtrip() {
  std::mt19937_64 rng(101);
  double err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const testutil::RandomFoliation rf(rng);
    const auto f = rf.foliation();
    const auto h = assemble_kk_metric(f);
    const auto back = extract_foliation_x5(h, rf.q);
    for (int k = 0; k < 4; ++k) {
      const Vec4 x = testutil::random_point(rng);
      const Mat5 hx = h(lift_x5(x));
      err = std::max(err, (back.g(x) - rf.g(x)).cwiseAbs().maxCoeff());
      err = std::max(err, (back.A(x) - rf.A(x)).cwiseAbs().maxCoeff());
      err = std::max(err, std::abs(back.Phi(x) - rf.Phi(x)));
      const Mat5 again = assemble_kk_point(back.g(x), back.A(x), back.Phi(x), rf.q);
      err = std::max(err, (again - hx).cwiseAbs().maxCoeff());
    }
  }
  return {err < 1e-12, fmt("max_err=%.3g", err)};
}

Verdict geodesic_equivalence() {
  double dev = 0, nres = 0, drift = 0, rad = 0;
  for (const char* metric : {"constant-E", "constant-B"}) {
    BuiltinParams bp;
    bp.E = 0.05;
    bp.B = 0.5;
    const auto fol = builtin_foliation(metric, bp);
    const auto h = assemble_kk_metric(fol);
    GeodesicConfig cfg;
    cfg.step = 1e-3;
    cfg.max_steps = 1000;
    for (Branch br : {Branch::minus, Branch::plus}) {
      const double ux = 0.3;
      const Vec4 u(std::sqrt(1 + ux * ux), ux, 0, 0);
      Vec5 v;
      v << u, 0.0;
      v[kX5] = null_v5(h(Vec5::Zero()), v, sign_of(br) - fol.q * fol.A(Vec4::Zero()).dot(u));
      const auto p5 = integrate_null_geodesic_5d(h, Vec5::Zero(), v, cfg);
      const auto pr = project_to_4d(p5, fol);
      if (pr.branch != br) return {false, "projection selected the wrong branch"};
      GeodesicConfig c4 = cfg;
      c4.step = cfg.step * pr.dtau_dsigma.front();
      const auto p4 = integrate_charged_geodesic_4d(tilde_of(fol).g, fol.A, fol.q, Vec4::Zero(),
                                                    pr.path.u.front(), c4, br);
      for (size_t i = 0; i < p4.x.size(); ++i) dev = std::max(dev, (p4.x[i] - pr.path.x[i]).cwiseAbs().maxCoeff());
      nres = std::max(nres, p5.max_null_residual);
      drift = std::max(drift, conserved_mbar(p5, h).max_deviation);
      if (std::string(metric) == "constant-B") {
        // Lorentz circle over a longer arc: r = |u⊥|/(|q| B)
        GeodesicConfig lc = c4;
        lc.max_steps = 4000;
        const auto lp = integrate_charged_geodesic_4d(tilde_of(fol).g, fol.A, fol.q, Vec4::Zero(), u, lc, br);
        const auto& a = lp.x.front();
        const auto& b = lp.x[lp.x.size() / 2];
        const auto& c = lp.x.back();
        const double r = testutil::circumradius(a[1], a[2], b[1], b[2], c[1], c[2]);
        rad = std::max(rad, std::abs(r / (ux / (fol.q * bp.B)) - 1));
      }
    }
  }
  const bool ok = dev < 1e-6 && nres < 1e-8 && drift < 1e-7 && rad < 1e-6;
  return {ok, fmt("dev=%.3g", dev) + fmt(" null=%.3g", nres) + fmt(" mbar_drift=%.3g", drift) +
                  fmt(" radius_rel=%.3g", rad)};
}

/// Exhaustive enumeration of all (2 dims)^N step sequences, histogrammed by (Δx, Δx⁵).
std::map<std::pair<int, int>, std::uint64_t> brute(int N, int dims) {
  std::map<std::pair<int, int>, std::uint64_t> out;
  const int width = 2 * N + 1;
  std::vector<std::uint64_t> h(static_cast<size_t>(width) * width, 0);
  std::function<void(int, int, int)> rec = [&](int left, int x, int x5) {
    if (left == 0) {
      ++h[static_cast<size_t>(x + N) * width + (x5 + N)];
      return;
    }
    rec(left - 1, x, x5 + 1);
    rec(left - 1, x, x5 - 1);
    if (dims == 2) {
      rec(left - 1, x + 1, x5);
      rec(left - 1, x - 1, x5);
    }
  };
  rec(N, 0, 0);
  for (int x = -N; x <= N; ++x)
    for (int d = -N; d <= N; ++d)
      if (const auto c = h[static_cast<size_t>(x + N) * width + (d + N)]) out[{x, d}] = c;
  return out;
}

Verdict micro_identities() {
  long checked = 0, bad = 0;
  for (int dims : {1, 2})
    for (int N = 0; N <= 12; ++N) {
      const auto b = brute(N, dims);
      const int xr = dims == 2 ? N : 0;
      for (int dx = -xr; dx <= xr; ++dx) {
        LatticePathModel m;
        m.dims = dims;
        m.steps = N;
        m.dx = dx;
        for (int d5 = -N; d5 <= N; ++d5) {
          const auto it = b.find({dx, d5});
          const std::uint64_t expect = it == b.end() ? 0 : it->second;
          ++checked;
          if (count_null_paths_micro(m, d5).count != expect) ++bad;
        }
      }
    }
  long sc_bad = 0;
  for (int N : {4, 6, 8})
    for (int split = 0; split <= N; ++split) {
      LatticePathModel m;
      m.steps = N;
      if (microcanonical_selfconsistency(m, split, true).residual != 0) ++sc_bad;
    }
  return {bad == 0 && sc_bad == 0, "counts_checked=" + std::to_string(checked) + " mismatches=" +
                                       std::to_string(bad) + " selfconsistency_failures=" + std::to_string(sc_bad)};
}

Verdict ensemble_transforms() {
  double qm = 0.0, sm = 0.0;
  for (int N = 0; N <= 12; ++N) {
    const auto b = brute(N, 2);
    LatticePathModel m;
    m.steps = N;
    m.dx = N % 2;
    for (int i = 0; i < 20; ++i) {
      const double li = 0.05 + 0.15 * i;
      for (Branch br : {Branch::minus, Branch::plus}) {
        cplx oracle = 0.0;
        for (const auto& [key, cnt] : b)
          if (key.first == m.dx) oracle += static_cast<double>(cnt) * std::polar(1.0, li * sign_of(br) * key.second);
        const cplx t = canonical_kernel_qm(li, m, br).value;
        qm = std::max(qm, std::abs(t - oracle) / std::max(1.0, std::abs(oracle)));
      }
    }
  }
  StatLattice lat;
  lat.dims = 2;
  lat.side = 4;
  lat.boundary = Boundary::periodic;
  lat.max_steps = 12;
  const auto rho = rho_series(lat, 0, 5);
  for (int i = 0; i < 20; ++i) {
    const double Li = 0.05 + 0.15 * i;
    double oracle = 0.0;
    for (size_t n = 0; n < rho.size(); ++n) oracle += std::exp(-static_cast<double>(n) * Li) * rho[n];
    sm = std::max(sm, std::abs(canonical_kernel_sm(Li, lat, 0, 5).value.real() - oracle) / oracle);
  }
  return {qm < 1e-12 && sm < 1e-12, fmt("qm_rel=%.3g", qm) + fmt(" sm_rel=%.3g", sm)};
}

Verdict gauge_behaviour() {
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double phase = 0.0, loop = 0.0;
  LatticePathModel m;
  m.steps = 8;
  m.dx = 2;
  for (int i = 0; i < 10; ++i) {
    const double a = U(rng), b = U(rng), c = U(rng), d = 0.3 * U(rng), e = U(rng);
    LatticeGauge g;
    g.q = 0.5 + std::abs(U(rng));
    g.A1 = [](double t, double x) { return 0.2 * std::sin(0.3 * t - x); };
    g.A0 = [](double t, double x) { return 0.1 * t * x; };
    auto chi = [=](double t, double x) { return a * std::cos(b * t + c) + d * x * x + std::sin(e * x); };
    const double li = 0.4 + 0.1 * i;
    const auto r = gauge_transform_kernel(li, m, Branch::minus, g, chi, 4);
    const cplx predicted = std::polar(1.0, -li * g.q * (chi(8.0, 2.0) - chi(0.0, 0.0)));
    phase = std::max(phase, std::abs(r.measured_phase - predicted));
    loop = std::max(loop, r.loop_delta);
  }
  return {phase < 1e-12 && loop < 1e-12, fmt("phase_err=%.3g", phase) + fmt(" loop_delta=%.3g", loop)};
}

Verdict schrodinger() {
  // the relativistic rest phase is part of the oracle
  auto oracle = [](double m, double t, double dx) {
    return std::sqrt(cplx(0.0, -m / (2 * std::numbers::pi * t))) *
           std::exp(cplx(0.0, m * dx * dx / (2 * t) - m * t));
  };
  const cplx exact = oracle(1.0, 1.0, 0.5);
  double err128 = 0.0;
  std::vector<std::pair<double, double>> s;
  for (int n : {8, 16, 32, 64, 128}) {
    const double e = std::abs(sliced_propagator(1.0, 0.0, 1.0, 0.0, 0.5, n) - exact) / std::abs(exact);
    s.emplace_back(n, std::max(e, 1e-300));
    if (n == 128) err128 = e;
  }
  const auto tab = emit_convergence_table(s);
  // supplementary: first-order splitting on the oscillator
  SlicedFields f;
  f.V2 = 1.0;
  f.left_point = true;
  const cplx mehler = harmonic_propagator(1.0, 1.0, 1.0, 0.2, 0.7);
  std::vector<std::pair<double, double>> t;
  for (int n : {16, 32, 64, 128})
    t.emplace_back(n, std::abs(sliced_propagator(1.0, 0.0, 1.0, 0.2, 0.7, n, f) - mehler) / std::abs(mehler));
  const double trotter = emit_convergence_table(t).order;
  const bool order_ok = std::abs(tab.order - 1.0) <= 0.3;
  Verdict v{err128 < 1e-3 && order_ok,
            fmt("rel_err@128=%.3g", err128) + fmt(" fitted_order=%.3g", tab.order) +
                fmt(" (oscillator left-point order=%.3f)", trotter)};
  // the free slicing is exact, so the error is round-off and carries no order
  v.known_limitation = err128 < 1e-3 && !order_ok && std::abs(trotter - 1.0) <= 0.3;
  return v;
}

Verdict fokker_planck() {
  const auto r = fokker_planck_check(1.0, 1.0, 0.0, 0.0, 1000);
  const double mom = std::abs(r.second_moment / r.expected_moment - 1);
  const double norm = std::abs(r.normalization - 1);
  return {r.relative_error < 0.02 && mom < 0.01 && norm < 1e-6,
          fmt("kernel_rel=%.3g", r.relative_error) + fmt(" moment_rel=%.3g", mom) + fmt(" norm_err=%.3g", norm)};
}

Verdict klein_gordon() {
  KGLattice lat;
  lat.side = 3;
  lat.t = 0.08;
  const auto k = lattice_resolvent(lat);
  const double id = resolvent_identity_residual(k);
  double proj = 0.0;
  for (int side : {3, 5, 7}) {
    KGSetup s;
    s.side = side;
    proj = std::max(proj, kg_residual(s).projected_residual);
  }
  const auto mc = moment_constants(1.0);
  const double closed = 64 * std::numbers::pi * std::numbers::pi;
  const double rel = std::abs(mc.A_inv / closed - 1);
  return {id < 1e-12 && proj < 1e-10 && rel < 1e-3,
          fmt("identity=%.3g", id) + fmt(" projected=%.3g", proj) + fmt(" A_inv_rel=%.3g", rel)};
}

Verdict pair_creation_check() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double cons = 0.0, null = 0.0, msum = 0.0;
  int made = 0, rejected = 0, wrong = 0;
  for (int i = 0; i < 500; ++i) {
    const auto p1 = make_null_momentum(0.2 + 3 * std::abs(U(rng)), Eigen::Vector3d(U(rng), U(rng), U(rng)), 0);
    const auto p2 = make_null_momentum(0.2 + 3 * std::abs(U(rng)), Eigen::Vector3d(U(rng), U(rng), U(rng)), 0);
    const double mX = 0.2 + std::abs(U(rng));
    const Vec5 P = p1.p + p2.p;
    const double s = P[0] * P[0] - P.segment<3>(1).squaredNorm();
    const bool above = std::sqrt(std::max(s, 0.0)) >= 2 * mX;
    try {
      const auto pc = pair_creation(p1, p2, mX);
      if (!above) ++wrong;
      ++made;
      cons = std::max(cons, (pc.X.p + pc.Xbar.p - P).cwiseAbs().maxCoeff() / P[0]);
      null = std::max(null, std::max(std::abs(null_invariant(pc.X.p)), std::abs(null_invariant(pc.Xbar.p))) / (P[0] * P[0]));
      msum = std::max(msum, std::abs(pc.X.mass() + pc.Xbar.mass()));
    } catch (const ThresholdError&) {
      if (above) ++wrong;
      ++rejected;
    }
  }
  const bool ok = cons < 1e-12 && null < 1e-12 && msum < 1e-12 && wrong == 0 && made > 0 && rejected > 0;
  return {ok, fmt("conservation=%.3g", cons) + fmt(" null=%.3g", null) + fmt(" mass_sum=%.3g", msum) +
                  " made=" + std::to_string(made) + " rejected=" + std::to_string(rejected) +
                  " misclassified=" + std::to_string(wrong)};
}

Verdict x3_foliation() {
  X3Params p;
  const auto r = x3_foliation_kernel(p);
  const double diff = r.max_abs_diff / r.max_abs;
  p.pz = 10.0;
  const double r10 = x3_spreading_rate(p, 1.0, 256, 0.25);
  p.pz = 20.0;
  const double r20 = x3_spreading_rate(p, 1.0, 256, 0.25);
  const double scaling = std::abs(r10 / r20 / 2.0 - 1);
  return {diff < 1e-12 && scaling < 0.01, fmt("kernel_rel_diff=%.3g", diff) + fmt(" scaling_err=%.3g", scaling)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "qoptics5_acceptance";
  fs::remove_all(root);
  int files = 0, bad = 0;
  std::string which;
  for (const auto& name : scenario_names()) {
    auto cfg = make_config();
    cfg.set("run.scenario", name);
    const auto out = run_scenario(name, cfg);
    const fs::path dir = root / name;
    write_outputs(dir.string(), cfg, out);
    const auto rep = rerun_from_manifest((dir / "manifest.ini").string(), (dir / "rerun").string());
    for (const auto& [file, body] : out.files) {
      ++files;
      if (slurp(dir / "rerun" / file) != body) {
        ++bad;
        which += " " + name + "/" + file;
      }
    }
    if (!rep.ok()) {
      ++bad;
      which += " " + name + "(manifest)";
    }
  }
  fs::remove_all(root);
  return {bad == 0, "scenarios=" + std::to_string(scenario_names().size()) + " files=" + std::to_string(files) +
                        " mismatches=" + std::to_string(bad) + which};
}

}  // namespace

int main() {
  std::printf("qoptics5 %s acceptance\n", version());
  run(1, "foliation-roundtrip", 1.0, foliation_roundtrip);
  run(2, "geodesic-equivalence", 10.0, geodesic_equivalence);
  run(3, "microcanonical", 30.0, micro_identities);
  run(4, "ensemble-transforms", 0.0, ensemble_transforms);
  run(5, "gauge", 0.0, gauge_behaviour);
  run(6, "schrodinger", 0.0, schrodinger);
  run(7, "fokker-planck", 0.0, fokker_planck);
  run(8, "klein-gordon", 0.0, klein_gordon);
  run(9, "pair-creation", 0.0, pair_creation_check);
  run(10, "x3-foliation", 0.0, x3_foliation);
  run(11, "determinism", 0.0, determinism);
  std::printf("%d unexpected failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
