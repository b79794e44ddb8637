#include "qoptics5/scenarios.hpp"

#include "qoptics5/convergence.hpp"
#include "qoptics5/curvature.hpp"
#include "qoptics5/geodesics.hpp"
#include "qoptics5/geometry.hpp"
#include "qoptics5/kernels.hpp"
#include "qoptics5/kg.hpp"
#include "qoptics5/limits.hpp"
#include "qoptics5/sr5.hpp"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#ifndef QOPTICS5_VERSION
#define QOPTICS5_VERSION "0.0.0"
#endif

namespace qoptics5 {

namespace {

using R = ValueKind;

std::string fd(double v) { return format_double(v); }

/// CSV builder with fixed formatting.
class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
  }
  template <class... T>
  void row(const T&... v) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(v), first = false), ...);
    os_ << '\n';
  }
  std::string str() const { return os_.str(); }

 private:
  static std::string cell(double v) { return fd(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(std::uint64_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
  std::ostringstream os_;
};

Units units_of(const Config& c) {
  return Units{c.real("units.c"), c.real("units.hbar"), c.real("units.kB")};
}

Branch branch_of(const std::string& s) { return s == "plus" ? Branch::plus : Branch::minus; }

int nonneg_int(const Config& c, const std::string& key) {
  const long v = c.integer(key);
  if (v < 0) throw ConfigError(key, "must be >= 0");
  return static_cast<int>(v);
}

/// Solves g̃(u, u) = −1 for u⁰ > 0 given the spatial components.
Vec4 timelike_velocity(const Mat4& g, const Eigen::Vector3d& us) {
  const double a = g(0, 0);
  const double b = 2.0 * g.block<1, 3>(0, 1).dot(us.transpose());
  const double c = us.dot(g.block<3, 3>(1, 1) * us) + 1.0;
  const double disc = b * b - 4 * a * c;
  if (!(a < 0.0) || disc < 0.0) throw SingularError("cannot build a timelike initial velocity");
  const double r1 = (-b + std::sqrt(disc)) / (2 * a), r2 = (-b - std::sqrt(disc)) / (2 * a);
  Vec4 u;
  u << std::max(r1, r2), us;
  return u;
}

// ---------------------------------------------------------------------------

ScenarioOutput run_geodesic(const Config& c) {
  const Units u = units_of(c);
  ScenarioOutput out;
  BuiltinParams bp;
  bp.E = c.real("geodesic.E");
  bp.B = c.real("geodesic.B");
  bp.gacc = c.real("geodesic.gacc");
  bp.m = c.real("geodesic.m");
  bp.q = c.real("geodesic.q");
  bp.Phi = c.real("geodesic.Phi");
  const auto fol = builtin_foliation(c.text("geodesic.metric"), bp, u);
  const auto h = assemble_kk_metric(fol);
  const Branch br = branch_of(c.text("geodesic.branch"));
  GeodesicConfig gc;
  gc.step = c.real("geodesic.step");
  gc.max_steps = static_cast<int>(c.integer("geodesic.steps"));
  gc.reproject_interval = nonneg_int(c, "geodesic.reproject");

  const Eigen::Vector3d us(c.real("geodesic.u1"), c.real("geodesic.u2"), c.real("geodesic.u3"));
  const Vec4 x4 = Vec4::Zero();
  const Mat4 gt0 = tilde_of(fol).g(x4);
  const Vec4 u4 = timelike_velocity(gt0, us);
  const double k = fol.q / (u.c * u.c);
  Vec5 v;
  v << u4, 0.0;
  v[kX5] = null_v5(h(lift_x5(x4)), v, sign_of(br) - k * fol.A(x4).dot(u4));
  const Path5 p5 = integrate_null_geodesic_5d(h, lift_x5(x4), v, gc);
  const auto proj = project_to_4d(p5, fol);
  const auto mbar = conserved_mbar(p5, h);

  GeodesicConfig g4 = gc;
  g4.step = gc.step * proj.dtau_dsigma.front();
  const Vec4 u_init = proj.path.u.front();
  const Path4 p4 = integrate_charged_geodesic_4d(tilde_of(fol).g, fol.A, fol.q, x4, u_init, g4, proj.branch, u);

  Csv csv({"s", "x0", "x1", "x2", "x3", "x5", "v5", "null_residual", "mbar", "dev_4d"});
  double max_dev = 0.0;
  for (size_t i = 0; i < p5.s.size(); ++i) {
    const double dev = (proj.path.x[i] - p4.x[i]).cwiseAbs().maxCoeff();
    max_dev = std::max(max_dev, dev);
    const Vec5& x = p5.x[i];
    csv.row(p5.s[i], x[0], x[1], x[2], x[3], x[4], p5.v[i][kX5], p5.null_residual[i], mbar.values[i], dev);
  }
  out.files.emplace_back("geodesic.csv", csv.str());

  // Refinement suite on the 4D equation over a fixed proper-time span against a run
  // with four times the finest resolution.
  const auto levels = c.int_list("geodesic.refine");
  const double span = gc.step * gc.max_steps * proj.dtau_dsigma.front();
  std::vector<std::pair<double, double>> series;
  auto endpoint = [&](long n) {
    GeodesicConfig r = g4;
    r.max_steps = static_cast<int>(n);
    r.step = span / n;
    return integrate_charged_geodesic_4d(tilde_of(fol).g, fol.A, fol.q, x4, u_init, r, proj.branch, u).x.back();
  };
  if (levels.size() >= 3) {
    long finest = 0;
    for (long n : levels) {
      if (n <= 0) throw ConfigError("geodesic.refine", "entries must be positive");
      finest = std::max(finest, n);
    }
    const Vec4 ref = endpoint(4 * finest);
    for (long n : levels) series.emplace_back(static_cast<double>(n), (endpoint(n) - ref).norm());
    const auto tab = emit_convergence_table(series);
    out.files.emplace_back("geodesic_convergence.csv", tab.csv);
    out.tolerances.emplace_back("geodesic.fitted_order", fd(tab.order));
    if (tab.warning) out.warnings.push_back(tab.message);
  }
  out.tolerances.emplace_back("geodesic.null_tol", fd(gc.null_tol));
  out.tolerances.emplace_back("geodesic.max_null_residual", fd(p5.max_null_residual));
  out.tolerances.emplace_back("geodesic.mbar_max_deviation", fd(mbar.max_deviation));
  out.tolerances.emplace_back("geodesic.max_dev_4d", fd(max_dev));
  out.tolerances.emplace_back("geodesic.projection_branch", sign_of(proj.branch) > 0 ? "plus" : "minus");
  return out;
}

// ---------------------------------------------------------------------------

ScenarioOutput run_kernel(const Config& c) {
  const Units u = units_of(c);
  ScenarioOutput out;
  const std::string ens = c.text("kernel.ensemble");
  LatticePathModel m;
  m.dims = static_cast<int>(c.integer("kernel.dims"));
  m.steps = nonneg_int(c, "kernel.steps");
  m.dx = static_cast<int>(c.integer("kernel.dx"));
  m.a = c.real("kernel.a");
  if (ens == "micro") {
    Csv csv({"dx5", "transfer_matrix", "enumeration", "multinomial"});
    const bool enumerate = m.steps <= 16;
    for (int d = -m.steps; d <= m.steps; ++d) {
      const auto t = count_null_paths_micro(m, d);
      const std::string e = enumerate ? std::to_string(count_null_paths_enumerate(m, d).count) : "";
      csv.row(d, t.count, e, count_multinomial(m.steps, m.dx, d, m.dims));
    }
    out.files.emplace_back("micro_counts.csv", csv.str());
  } else if (ens == "qm") {
    const Branch br = branch_of(c.text("kernel.branch"));
    Csv csv({"lambda_inv", "re_transfer", "im_transfer", "re_fourier", "im_fourier", "abs_diff"});
    double worst = 0.0;
    for (double li : c.real_list("kernel.lambda_inv")) {
      const cplx t = canonical_kernel_qm(li, m, br).value;
      const cplx f = fourier_of_counts(li, m, br);
      worst = std::max(worst, std::abs(t - f));
      csv.row(li, t.real(), t.imag(), f.real(), f.imag(), std::abs(t - f));
    }
    out.files.emplace_back("qm_kernel.csv", csv.str());
    out.tolerances.emplace_back("kernel.max_abs_diff", fd(worst));
  } else {
    StatLattice lat;
    lat.dims = static_cast<int>(c.integer("kernel.sm_dims"));
    lat.side = static_cast<int>(c.integer("kernel.side"));
    lat.boundary = c.text("kernel.boundary") == "periodic" ? Boundary::periodic : Boundary::open;
    lat.a = m.a;
    lat.max_steps = nonneg_int(c, "kernel.max_steps");
    const int from = nonneg_int(c, "kernel.from"), to = nonneg_int(c, "kernel.to");
    const auto rho = rho_series(lat, from, to);
    const auto samples = static_cast<std::uint64_t>(c.integer("kernel.samples"));
    const auto seed = static_cast<std::uint64_t>(c.integer("run.seed"));
    const int threads = static_cast<int>(c.integer("run.threads"));
    Csv csv({"Lambda_inv", "k_transfer", "k_laplace", "k_sampled", "stat_error", "massieu", "massieu_from_entropy"});
    for (double li : c.real_list("kernel.Lambda_inv")) {
      const double t = canonical_kernel_sm(li, lat, from, to).value.real();
      const double l = laplace_of_counts(li, lat, rho);
      const auto s = canonical_kernel_sm_sampled(li, lat, from, to, samples, seed, threads);
      const auto psi = massieu_canonical(lat, li, u);
      const auto psi2 = massieu_from_entropy(lat, li, u);
      csv.row(li, t, l, s.value.real(), s.stat_error, psi.value, psi2.value);
    }
    out.files.emplace_back("sm_kernel.csv", csv.str());
    Csv rc({"n", "rho"});
    for (size_t n = 0; n < rho.size(); ++n) rc.row(static_cast<int>(n), rho[n]);
    out.files.emplace_back("sm_rho.csv", rc.str());
  }
  return out;
}

// ---------------------------------------------------------------------------

ScenarioOutput run_limits(const Config& c) {
  const Units u = units_of(c);
  ScenarioOutput out;
  const double m = c.real("limits.m"), t = c.real("limits.t");
  const double x1 = c.real("limits.x1"), x2 = c.real("limits.x2");
  const auto slices = c.int_list("limits.slices");
  Csv sch({"slices", "re_sliced", "im_sliced", "re_analytic", "im_analytic", "relative_error"});
  std::vector<std::pair<double, double>> free_series, trotter_series;
  for (long n : slices) {
    if (n <= 0) throw ConfigError("limits.slices", "entries must be positive");
    const auto r = schrodinger_free_check(m, t, x1, x2, static_cast<int>(n), u);
    sch.row(n, r.sliced.real(), r.sliced.imag(), r.analytic.real(), r.analytic.imag(), r.relative_error);
    // exact slicing leaves round-off only; floor keeps the log-log fit defined
    free_series.emplace_back(static_cast<double>(n), std::max(r.relative_error, 1e-300));
  }
  out.files.emplace_back("schrodinger.csv", sch.str());
  if (free_series.size() >= 3) {
    const auto tab = emit_convergence_table(free_series);
    out.files.emplace_back("schrodinger_convergence.csv", tab.csv);
    out.tolerances.emplace_back("limits.free_fitted_order", fd(tab.order));
    if (tab.warning) out.warnings.push_back("free slicing: " + tab.message);
  }
  // first-order splitting suite on the harmonic oscillator
  const double w = c.real("limits.omega");
  SlicedFields ho;
  ho.V2 = m * w * w;
  ho.left_point = true;
  const cplx exact = harmonic_propagator(m, w, t, x1, x2, Branch::minus, u);
  Csv tr({"slices", "relative_error"});
  for (long n : slices) {
    const cplx s = sliced_propagator(m, 0.0, t, x1, x2, static_cast<int>(n), ho, Branch::minus, u);
    const double e = std::abs(s - exact) / std::abs(exact);
    tr.row(n, e);
    trotter_series.emplace_back(static_cast<double>(n), e);
  }
  out.files.emplace_back("trotter_oscillator.csv", tr.str());
  if (trotter_series.size() >= 3) {
    const auto tab = emit_convergence_table(trotter_series);
    out.files.emplace_back("trotter_convergence.csv", tab.csv);
    out.tolerances.emplace_back("limits.trotter_fitted_order", fd(tab.order));
  }
  // Fokker-Planck walk
  const double Lam = c.real("limits.Lambda"), uu = c.real("limits.u");
  Csv fp({"steps", "walk", "analytic", "relative_error", "normalization", "second_moment", "expected_moment"});
  for (long n : c.int_list("limits.fp_steps")) {
    if (n <= 0) throw ConfigError("limits.fp_steps", "entries must be positive");
    const auto r = fokker_planck_check(Lam, uu, x1, x1, static_cast<int>(n), 1, u);
    fp.row(n, r.walk, r.analytic, r.relative_error, r.normalization, r.second_moment, r.expected_moment);
  }
  out.files.emplace_back("fokker_planck.csv", fp.str());
  // x³ reduction
  X3Params xp;
  xp.m = m;
  xp.units = u;
  xp.t = c.real("limits.x3_t");
  Csv x3({"pz", "max_abs_diff", "max_abs", "spreading_rate", "rate_times_pz"});
  for (double pz : c.real_list("limits.x3_pz")) {
    xp.pz = pz;
    const auto r = x3_foliation_kernel(xp);
    const double rate = x3_spreading_rate(xp, 1.0, 256, 0.25);
    x3.row(pz, r.max_abs_diff, r.max_abs, rate, rate * pz);
    if (r.warning) out.warnings.push_back("x3 reduction near its validity bound at p_z = " + fd(pz));
  }
  out.files.emplace_back("x3_kernel.csv", x3.str());
  return out;
}

// ---------------------------------------------------------------------------

ScenarioOutput run_kg(const Config& c) {
  ScenarioOutput out;
  Csv csv({"side", "h", "t", "identity_residual", "projected_residual", "continuum_residual", "cg_iterations"});
  for (long side : c.int_list("kg.sides")) {
    KGSetup s;
    s.side = static_cast<int>(side);
    s.box = c.real("kg.box");
    s.mu0_sq = c.real("kg.mu0_sq");
    s.mode5 = static_cast<int>(c.integer("kg.mode5"));
    const auto r = kg_residual(s);
    csv.row(s.side, r.lattice.h, r.lattice.t, r.identity_residual, r.projected_residual,
            r.continuum_residual, r.cg_iterations);
  }
  out.files.emplace_back("kg.csv", csv.str());
  const auto mc = moment_constants(c.real("kg.L"), static_cast<int>(c.integer("kg.grid")));
  Csv mcsv({"quantity", "numerical", "closed_form"});
  mcsv.row("A_inv", mc.A_inv, mc.A_inv_closed);
  mcsv.row("second_moment", mc.second_moment, mc.second_moment_closed);
  for (size_t i = 0; i < mc.per_axis.size(); ++i)
    mcsv.row("axis" + std::to_string(i), mc.per_axis[i], mc.per_axis_closed);
  out.files.emplace_back("kg_moments.csv", mcsv.str());
  out.tolerances.emplace_back("kg.cg_tol", fd(1e-15));
  return out;
}

// ---------------------------------------------------------------------------

ScenarioOutput run_pair(const Config& c) {
  const Units u = units_of(c);
  ScenarioOutput out;
  const double mX = c.real("pair.mX");
  const long n = c.integer("pair.samples");
  std::mt19937_64 rng(static_cast<std::uint64_t>(c.integer("run.seed")));
  std::uniform_real_distribution<double> en(c.real("pair.E_min"), c.real("pair.E_max"));
  std::uniform_real_distribution<double> cosd(-1.0, 1.0), phid(0.0, 2 * std::numbers::pi);
  std::ostringstream os;
  auto emit = [&](const FiveMomentum& a, const FiveMomentum& b) {
    nlohmann::ordered_json j;
    j["photon1"] = std::vector<double>(a.p.data(), a.p.data() + 5);
    j["photon2"] = std::vector<double>(b.p.data(), b.p.data() + 5);
    try {
      const auto r = pair_creation(a, b, mX, u);
      j["status"] = "ok";
      j["X"] = std::vector<double>(r.X.p.data(), r.X.p.data() + 5);
      j["Xbar"] = std::vector<double>(r.Xbar.p.data(), r.Xbar.p.data() + 5);
      j["s"] = r.invariant_mass_sq;
      j["conservation_residual"] = r.conservation_residual;
      j["null_residual"] = r.null_residual;
    } catch (const ThresholdError& e) {
      j["status"] = "below_threshold";
      j["message"] = e.what();
    }
    os << j.dump() << '\n';
  };
  // the configured head-on pair first, then random ones
  const double E1 = c.real("pair.E1"), E2 = c.real("pair.E2");
  emit(make_null_momentum(E1, {1, 0, 0}, 0.0, u), make_null_momentum(E2, {-1, 0, 0}, 0.0, u));
  for (long i = 0; i < n; ++i) {
    const double ea = en(rng), eb = en(rng);
    const double ct = cosd(rng), ph = phid(rng);
    const double st = std::sqrt(std::max(0.0, 1 - ct * ct));
    const Eigen::Vector3d d2(st * std::cos(ph), st * std::sin(ph), ct);
    emit(make_null_momentum(ea, {0, 0, 1}, 0.0, u), make_null_momentum(eb, d2, 0.0, u));
  }
  out.files.emplace_back("pairs.jsonl", os.str());
  return out;
}

// ---------------------------------------------------------------------------

ScenarioOutput run_curvature(const Config& c) {
  const Units u = units_of(c);
  ScenarioOutput out;
  BuiltinParams bp;
  bp.E = c.real("curvature.E");
  bp.B = c.real("curvature.B");
  bp.gacc = c.real("curvature.gacc");
  bp.m = c.real("curvature.m");
  bp.q = c.real("curvature.q");
  bp.Phi = c.real("curvature.Phi");
  const auto fol = builtin_foliation(c.text("curvature.metric"), bp, u);
  const double step = c.real("curvature.step"), scale = c.real("curvature.probe_scale");
  std::mt19937_64 rng(static_cast<std::uint64_t>(c.integer("run.seed")));
  std::uniform_real_distribution<double> U(-scale, scale);
  const auto gt = tilde_of(fol).g;
  Csv csv({"probe", "x0", "x1", "x2", "x3", "ricci_scalar_tilde", "einstein", "maxwell", "scalar", "max_abs"});
  double worst = 0.0;
  for (long i = 0; i < c.integer("curvature.probes"); ++i) {
    Vec4 x;
    for (int k = 0; k < 4; ++k) x[k] = U(rng);
    const double R = ricci_scalar<4>(as_fn(gt), x, step);
    const auto res = field_equation_residual(fol, x, step);
    worst = std::max(worst, res.max_abs());
    csv.row(static_cast<int>(i), x[0], x[1], x[2], x[3], R, res.einstein.cwiseAbs().maxCoeff(),
            res.maxwell.cwiseAbs().maxCoeff(), res.phi, res.max_abs());
  }
  out.files.emplace_back("curvature.csv", csv.str());
  out.tolerances.emplace_back("curvature.max_residual", fd(worst));
  return out;
}

void dir_ok(const std::string& d) {
  std::error_code ec;
  std::filesystem::create_directories(d, ec);
  if (ec) throw ConfigError("--out", "cannot create output directory " + d + ": " + ec.message());
}

}  // namespace

const char* version() { return QOPTICS5_VERSION; }

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> n = {"geodesic",  "kernel",      "limit-check",
                                             "kg-check",  "pair-create", "curvature-check"};
  return n;
}

Config make_config() {
  const std::vector<std::string> metrics = builtin_metric_names();
  std::vector<KeySpec> s = {
      {"run.scenario", R::text, "geodesic", scenario_names(), "scenario recorded in manifests"},
      {"run.seed", R::integer, "42", {}, "seed for every random draw"},
      {"run.threads", R::positive_integer, "1", {}, "worker threads; outputs do not depend on it"},
      {"units.c", R::positive_real, "1", {}, "speed of light"},
      {"units.hbar", R::positive_real, "1", {}, "reduced Planck constant"},
      {"units.kB", R::positive_real, "1", {}, "Boltzmann constant"},

      {"geodesic.metric", R::text, "constant-B", metrics, "built-in metric"},
      {"geodesic.E", R::real, "0.1", {}, "constant-E field strength"},
      {"geodesic.B", R::real, "0.5", {}, "constant-B field strength"},
      {"geodesic.gacc", R::real, "0.01", {}, "weak-field acceleration"},
      {"geodesic.m", R::positive_real, "1", {}, "mass in V = m g x3"},
      {"geodesic.q", R::real, "1", {}, "charge"},
      {"geodesic.Phi", R::positive_real, "1", {}, "constant lapse"},
      {"geodesic.branch", R::text, "minus", {"minus", "plus"}, "x5 orientation"},
      {"geodesic.u1", R::real, "0.3", {}, "initial spatial 4-velocity"},
      {"geodesic.u2", R::real, "0", {}, ""},
      {"geodesic.u3", R::real, "0", {}, ""},
      {"geodesic.step", R::positive_real, "0.001", {}, "affine step"},
      {"geodesic.steps", R::positive_integer, "1000", {}, "number of steps"},
      {"geodesic.reproject", R::integer, "1", {}, "null re-projection interval, 0 disables"},
      {"geodesic.refine", R::int_list, "10,20,40,80", {}, "4D refinement suite step counts"},

      {"kernel.ensemble", R::text, "micro", {"micro", "qm", "sm"}, "ensemble"},
      {"kernel.dims", R::positive_integer, "2", {}, "null lattice active axes (1 or 2)"},
      {"kernel.steps", R::integer, "4", {}, "N"},
      {"kernel.dx", R::integer, "0", {}, "endpoint separation"},
      {"kernel.a", R::positive_real, "1", {}, "lattice spacing"},
      {"kernel.branch", R::text, "minus", {"minus", "plus"}, ""},
      {"kernel.lambda_inv", R::real_list, "0.1,0.5,1,2", {}, "quantum ensemble parameters"},
      {"kernel.Lambda_inv", R::real_list, "0.5,1,2", {}, "statistical ensemble parameters"},
      {"kernel.sm_dims", R::positive_integer, "1", {}, "random-walk lattice dims"},
      {"kernel.side", R::positive_integer, "4", {}, "random-walk lattice side"},
      {"kernel.boundary", R::text, "periodic", {"periodic", "open"}, ""},
      {"kernel.max_steps", R::integer, "12", {}, "longest walk"},
      {"kernel.from", R::integer, "0", {}, ""},
      {"kernel.to", R::integer, "0", {}, ""},
      {"kernel.samples", R::positive_integer, "2000", {}, "sampled estimator size"},

      {"limits.m", R::positive_real, "1", {}, "mass"},
      {"limits.t", R::positive_real, "1", {}, "propagation time"},
      {"limits.x1", R::real, "0", {}, ""},
      {"limits.x2", R::real, "0.5", {}, ""},
      {"limits.slices", R::int_list, "8,16,32,64,128", {}, "slice counts"},
      {"limits.omega", R::positive_real, "1", {}, "oscillator frequency for the splitting suite"},
      {"limits.Lambda", R::positive_real, "1", {}, "diffusion length"},
      {"limits.u", R::positive_real, "1", {}, "statistical evolution parameter"},
      {"limits.fp_steps", R::int_list, "100,1000", {}, "walk step counts"},
      {"limits.x3_pz", R::real_list, "10,20", {}, "longitudinal momenta"},
      {"limits.x3_t", R::positive_real, "0.3", {}, "x3 propagation time"},

      {"kg.sides", R::int_list, "3,5,7", {}, "periodic lattice sides"},
      {"kg.box", R::positive_real, "6", {}, "physical box length"},
      {"kg.mu0_sq", R::positive_real, "0.5", {}, "screening term"},
      {"kg.mode5", R::positive_integer, "1", {}, "x5 mode index"},
      {"kg.L", R::positive_real, "1", {}, "length scale of the moment integrals"},
      {"kg.grid", R::integer, "16", {}, "product-grid nodes per axis, 0 skips"},

      {"pair.mX", R::positive_real, "1", {}, "produced mass"},
      {"pair.E1", R::positive_real, "2", {}, "head-on photon energy"},
      {"pair.E2", R::positive_real, "2", {}, ""},
      {"pair.samples", R::integer, "8", {}, "random photon pairs"},
      {"pair.E_min", R::positive_real, "0.2", {}, ""},
      {"pair.E_max", R::positive_real, "5", {}, ""},

      {"curvature.metric", R::text, "constant-B", metrics, "built-in metric"},
      {"curvature.E", R::real, "0.1", {}, ""},
      {"curvature.B", R::real, "0.5", {}, ""},
      {"curvature.gacc", R::real, "0.01", {}, ""},
      {"curvature.m", R::positive_real, "1", {}, ""},
      {"curvature.q", R::real, "1", {}, ""},
      {"curvature.Phi", R::positive_real, "1", {}, ""},
      {"curvature.probes", R::positive_integer, "4", {}, "random probe points"},
      {"curvature.probe_scale", R::positive_real, "1", {}, "probe coordinate range"},
      {"curvature.step", R::positive_real, "0.001", {}, "finite-difference step"},
  };
  return Config(std::move(s), {"manifest"});
}

ScenarioOutput run_scenario(const std::string& scenario, const Config& cfg) {
  ScenarioOutput out;
  if (scenario == "geodesic") out = run_geodesic(cfg);
  else if (scenario == "kernel") out = run_kernel(cfg);
  else if (scenario == "limit-check") out = run_limits(cfg);
  else if (scenario == "kg-check") out = run_kg(cfg);
  else if (scenario == "pair-create") out = run_pair(cfg);
  else if (scenario == "curvature-check") out = run_curvature(cfg);
  else throw ConfigError("run.scenario", "unknown scenario '" + scenario + "'");
  out.scenario = scenario;
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

std::string manifest_text(const Config& cfg, const ScenarioOutput& out) {
  Config echo = cfg;
  echo.set("run.scenario", out.scenario);
  std::ostringstream os;
  os << echo.to_ini() << "\n[manifest]\n";
  os << "version = " << version() << '\n';
  for (const auto& [k, v] : out.tolerances) os << "tolerance." << k << " = " << v << '\n';
  for (const auto& [name, body] : out.files) os << "hash." << name << " = " << hex64(fnv1a64(body)) << '\n';
  return os.str();
}

void write_outputs(const std::string& dir, const Config& cfg, const ScenarioOutput& out) {
  dir_ok(dir);
  auto put = [&](const std::string& name, const std::string& body) {
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError("--out", "cannot write " + path.string());
    f << body;
  };
  for (const auto& [name, body] : out.files) put(name, body);
  put("manifest.ini", manifest_text(cfg, out));
}

RerunReport rerun_from_manifest(const std::string& manifest_path, const std::string& dir) {
  std::ifstream f(manifest_path, std::ios::binary);
  if (!f) throw ConfigError("--manifest", "cannot open " + manifest_path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  Config cfg = make_config();
  cfg.parse(text, manifest_path);
  // recorded hashes from the passive block
  std::vector<std::pair<std::string, std::string>> hashes;
  {
    std::istringstream in(text);
    std::string line;
    bool inside = false;
    while (std::getline(in, line)) {
      if (line.rfind("[", 0) == 0) inside = line == "[manifest]";
      if (!inside || line.rfind("hash.", 0) != 0) continue;
      const auto eq = line.find(" = ");
      if (eq == std::string::npos) continue;
      hashes.emplace_back(line.substr(5, eq - 5), line.substr(eq + 3));
    }
  }
  RerunReport rep;
  rep.scenario = cfg.text("run.scenario");
  const auto out = run_scenario(rep.scenario, cfg);
  write_outputs(dir, cfg, out);
  for (const auto& [name, h] : hashes) {
    bool found = false;
    for (const auto& [fname, body] : out.files)
      if (fname == name) {
        found = true;
        if (hex64(fnv1a64(body)) != h) rep.mismatched.push_back(name);
      }
    if (!found) rep.missing.push_back(name);
  }
  return rep;
}

}  // namespace qoptics5
