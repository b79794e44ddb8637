#include "qoptics5/geodesics.hpp"

#include <cmath>
#include <sstream>
#include <thread>

namespace qoptics5 {

namespace {

template <int N>
VecN<N> geodesic_accel(const Christoffel<N>& G, const VecN<N>& v) {
  VecN<N> a;
  for (int i = 0; i < N; ++i) a[i] = -v.dot(G.gamma[i] * v);
  return a;
}

template <int N, class Accel>
void rk4_step(VecN<N>& x, VecN<N>& v, double h, const Accel& acc) {
  const VecN<N> k1x = v, k1v = acc(x, v);
  const VecN<N> k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x, k2x);
  const VecN<N> k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x, k3x);
  const VecN<N> k4x = v + h * k3v, k4v = acc(x + h * k3x, k4x);
  x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
  v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
  if (!x.allFinite() || !v.allFinite())
    throw EvaluationError("integration produced a non-finite state near " + format_point(x));
}

void check_config(const GeodesicConfig& cfg) {
  if (!(cfg.step > 0.0)) throw PreconditionError("geodesic step must be positive");
  if (cfg.max_steps < 1) throw PreconditionError("geodesic max_steps must be >= 1");
  if (!(cfg.fd_step > 0.0)) throw PreconditionError("finite-difference step must be positive");
}

Mat4 field_strength(const VectorField4& A, const Vec4& x, double h) {
  Mat4 dA;
  for (int m = 0; m < 4; ++m) {
    Vec4 e = Vec4::Zero();
    e[m] = h;
    dA.row(m) = ((A(x + e) - A(x - e)) / (2.0 * h)).transpose();
  }
  return dA - dA.transpose();
}

/// Shared 4D integrator: ẍ = −Γuu + coupling · g^{-1} F u.
Path4 integrate_4d(const MatrixField4& g, const VectorField4& A, double coupling, const Vec4& x0,
                   const Vec4& u0, const GeodesicConfig& cfg, double norm, Parametrization tag) {
  check_config(cfg);
  const double n0 = u0.dot(g(x0) * u0);
  if (std::abs(n0 - norm) > cfg.null_tol) {
    std::ostringstream os;
    os << "initial velocity has g u u = " << n0 << ", expected " << norm;
    throw PreconditionError(os.str());
  }
  auto acc = [&](const Vec4& x, const Vec4& v) -> Vec4 {
    const auto G = christoffel<4>(g, x, cfg.fd_step);
    Vec4 a = geodesic_accel<4>(G, v);
    if (coupling != 0.0)
      a += coupling * checked_inverse<4>(g(x)) * field_strength(A, x, cfg.fd_step) * v;
    return a;
  };
  Path4 p;
  p.param = tag;
  p.s.reserve(cfg.max_steps + 1);
  Vec4 x = x0, v = u0;
  p.s.push_back(0.0);
  p.x.push_back(x);
  p.u.push_back(v);
  for (int i = 1; i <= cfg.max_steps; ++i) {
    rk4_step<4>(x, v, cfg.step, acc);
    p.s.push_back(i * cfg.step);
    p.x.push_back(x);
    p.u.push_back(v);
    p.max_norm_residual = std::max(p.max_norm_residual, std::abs(v.dot(g(x) * v) - norm));
  }
  return p;
}

}  // namespace

double null_v5(const Mat5& h, const Vec5& v, double hint) {
  const double a = h(4, 4);
  const Vec4 v4 = v.head<4>();
  const double b = 2.0 * h.block<4, 1>(0, 4).dot(v4);
  const double c = v4.dot(h.topLeftCorner<4, 4>() * v4);
  if (!(a > 0.0)) throw SingularError("h_55 not positive during null re-projection");
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) throw SingularError("velocity cannot be re-projected onto the null cone");
  const double sq = std::sqrt(disc);
  // numerically stable pair of roots
  const double qv = -0.5 * (b + std::copysign(sq, b));
  double r1 = qv / a;
  double r2 = qv != 0.0 ? c / qv : -r1;
  return std::abs(r1 - hint) <= std::abs(r2 - hint) ? r1 : r2;
}

Path5 integrate_null_geodesic_5d(const MetricField5& h, const Vec5& x0, const Vec5& v0,
                                 const GeodesicConfig& cfg, Parametrization tag) {
  check_config(cfg);
  const double r0 = null_residual(h, x0, v0);
  if (r0 > cfg.null_tol) {
    std::ostringstream os;
    os << "initial 5-velocity is not null: |h v v| = " << r0;
    throw PreconditionError(os.str());
  }
  const auto fn = as_fn(h);
  auto acc = [&](const Vec5& x, const Vec5& v) -> Vec5 {
    return geodesic_accel<5>(christoffel<5>(fn, x, cfg.fd_step), v);
  };
  Path5 p;
  p.param = tag;
  p.s.reserve(cfg.max_steps + 1);
  Vec5 x = x0, v = v0;
  auto record = [&](double s) {
    p.s.push_back(s);
    p.x.push_back(x);
    p.v.push_back(v);
    const double r = null_residual(h, x, v);
    p.null_residual.push_back(r);
    p.max_null_residual = std::max(p.max_null_residual, r);
  };
  record(0.0);
  for (int i = 1; i <= cfg.max_steps; ++i) {
    rk4_step<5>(x, v, cfg.step, acc);
    if (cfg.reproject_interval > 0 && i % cfg.reproject_interval == 0)
      v[kX5] = null_v5(h(x), v, v[kX5]);
    record(i * cfg.step);
  }
  return p;
}

std::vector<Path5> integrate_null_geodesic_batch(const MetricField5& h,
                                                 const std::vector<std::pair<Vec5, Vec5>>& inits,
                                                 const GeodesicConfig& cfg, int threads) {
  std::vector<Path5> out(inits.size());
  std::vector<std::exception_ptr> errors(inits.size());
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(inits.size())));
  auto work = [&](int tid) {
    for (size_t i = tid; i < inits.size(); i += nt) {
      try {
        out[i] = integrate_null_geodesic_5d(h, inits[i].first, inits[i].second, cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work, t);
  work(0);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

Path4 integrate_charged_geodesic_4d(const MatrixField4& gt, const VectorField4& A, double q,
                                    const Vec4& x0, const Vec4& u0, const GeodesicConfig& cfg,
                                    Branch branch, const Units& units) {
  const double coupling = sign_of(branch) * q / (units.c * units.c);
  return integrate_4d(gt, A, coupling, x0, u0, cfg, -1.0, Parametrization::proper_time);
}

Projection4 project_to_4d(const Path5& p5, const FoliationX5& fol) {
  const auto gt = tilde_of(fol).g;
  const double k = fol.q / (fol.units.c * fol.units.c);
  const size_t n = p5.s.size();
  if (n < 2) throw PreconditionError("project_to_4d needs at least two samples");
  Projection4 pr;
  pr.path.param = Parametrization::proper_time;
  pr.dtau_dsigma.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const Vec4 y = leaf_x5(p5.x[i]);
    const Vec4 v4 = p5.v[i].head<4>();
    const double nn = -v4.dot(gt(y) * v4);
    if (!(nn > 0.0)) {
      std::ostringstream os;
      os << "4D projection is not timelike at sample " << i << " (−g̃vv = " << nn << ")";
      throw SingularError(os.str());
    }
    pr.dtau_dsigma[i] = std::sqrt(nn);
  }
  double tau = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (i > 0) tau += 0.5 * (pr.dtau_dsigma[i] + pr.dtau_dsigma[i - 1]) * (p5.s[i] - p5.s[i - 1]);
    const Vec4 y = leaf_x5(p5.x[i]);
    const Vec4 u = p5.v[i].head<4>() / pr.dtau_dsigma[i];
    const double w = p5.v[i][kX5] / pr.dtau_dsigma[i] + k * fol.A(y).dot(u);
    const double r = std::abs(w * w - 1.0);
    if (i == 0) pr.branch = w > 0 ? Branch::plus : Branch::minus;
    pr.path.s.push_back(tau);
    pr.path.x.push_back(y);
    pr.path.u.push_back(u);
    pr.path.max_norm_residual =
        std::max(pr.path.max_norm_residual, std::abs(u.dot(gt(y) * u) + 1.0));
    pr.other5d_residual.push_back(r);
    pr.max_other5d_residual = std::max(pr.max_other5d_residual, r);
  }
  return pr;
}

namespace {

ChargeSeries summarize(std::vector<double> vals) {
  ChargeSeries s;
  if (vals.empty()) return s;
  double sum = 0.0;
  for (double v : vals) sum += v;
  s.mean = sum / vals.size();
  for (double v : vals) s.max_deviation = std::max(s.max_deviation, std::abs(v - s.mean));
  s.values = std::move(vals);
  return s;
}

ChargeSeries killing_charge(const Path5& p5, const MetricField5& h, int axis) {
  std::vector<double> vals;
  vals.reserve(p5.x.size());
  for (size_t i = 0; i < p5.x.size(); ++i) {
    const Mat5 m = h(p5.x[i]);
    double val = m.row(axis).dot(p5.v[i]);
    // h-affine → conformal-affine: dσ' = dσ/Ω², which cancels the 1/Ω² of the metric
    if (p5.param == Parametrization::affine_conformal) val /= std::abs(m(axis, axis));
    vals.push_back(val);
  }
  return summarize(std::move(vals));
}

}  // namespace

ChargeSeries conserved_mbar(const Path5& p5, const MetricField5& h) {
  if (!h.symmetries().indep_x5)
    throw SymmetryError("conserved m-bar needs a metric independent of x5");
  return killing_charge(p5, h, kX5);
}

ChargeSeries conserved_mbar(const Path5& p5, const FoliationX5& fol) {
  return conserved_mbar(p5, assemble_kk_metric(fol));
}

ChargeSeries conserved_Mbar(const Path5& p5, const MetricField5& h) {
  if (!h.symmetries().indep_x0)
    throw SymmetryError("conserved M-bar needs a metric independent of x0");
  return killing_charge(p5, h, 0);
}

ZeroKelvinPath integrate_zero_kelvin(const MatrixField4& Gt, const VectorField4& a, double Q,
                                     const Vec4& y0, const Vec4& u0, const GeodesicConfig& cfg,
                                     double x0, const Units& units) {
  auto [neg, pos] = inertia(Gt(y0));
  if (neg != 0 || pos != 4) throw SignatureError("Zero Kelvin metric is not positive definite");
  const double k = Q / (units.c * units.c);
  ZeroKelvinPath z;
  z.path = integrate_4d(Gt, a, -k, y0, u0, cfg, 1.0, Parametrization::fermat_time);
  std::vector<double> mb;
  double t = x0;
  double prev = 0.0;
  for (size_t i = 0; i < z.path.s.size(); ++i) {
    const Vec4& y = z.path.x[i];
    const Vec4& u = z.path.u[i];
    const double root = std::sqrt(u.dot(Gt(y) * u));
    const double rate = root - k * a(y).dot(u);  // integrand of d_+
    if (i > 0) t += 0.5 * (rate + prev) * (z.path.s[i] - z.path.s[i - 1]);
    prev = rate;
    z.x0.push_back(t);
    mb.push_back(-root);
  }
  z.Mbar = summarize(std::move(mb));
  return z;
}

}  // namespace qoptics5
