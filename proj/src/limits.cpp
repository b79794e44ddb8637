#include "qoptics5/limits.hpp"

#include "qoptics5/kernels.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace qoptics5 {

namespace {
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);
}  // namespace

NonrelExpansion nonrel_action(const std::vector<Vec4>& path_t, const NonrelFields& f, double m,
                              double q, Branch branch, const Units& u, double vmax) {
  if (path_t.size() < 2) throw PreconditionError("nonrel_action needs at least two samples");
  if (!(m > 0.0)) throw PreconditionError("nonrel_action needs m > 0");
  const double c = u.c, c2 = c * c;
  const double lam_inv = m * c / u.hbar;
  const double s = sign_of(branch);
  NonrelExpansion e;
  const double T = path_t.back()[0] - path_t.front()[0];
  e.leading = s * lam_inv * c * T;
  double integral = 0.0, trunc = 0.0;
  std::vector<Vec4> path4;
  path4.reserve(path_t.size());
  for (const auto& p : path_t) path4.emplace_back(c * p[0], p[1], p[2], p[3]);
  for (size_t i = 0; i + 1 < path_t.size(); ++i) {
    const double dt = path_t[i + 1][0] - path_t[i][0];
    if (!(dt > 0.0)) throw PreconditionError("nonrel_action needs increasing time samples");
    const Eigen::Vector3d v = (path_t[i + 1] - path_t[i]).tail<3>() / dt;
    if (v.norm() / c >= vmax) {
      std::ostringstream os;
      os << "segment " << i << " has |v|/c = " << v.norm() / c << " >= " << vmax;
      throw PreconditionError(os.str());
    }
    const Vec4 mid = 0.5 * (path4[i] + path4[i + 1]);
    const double V = f.V ? f.V(mid) : 0.0;
    const double A0 = f.A0 ? f.A0(mid) : 0.0;
    const Eigen::Vector3d A = f.A ? Eigen::Vector3d(f.A(mid).tail<3>()) : Eigen::Vector3d::Zero();
    const double v2 = v.squaredNorm();
    // Both branches as −s·λ⁻¹c∫[…]; the plus branch reverses the sign of q.
    const double qs = -s * q;
    const double br = v2 / (2 * c2) - qs / (c2 * c) * A.dot(v) - qs / c2 * A0 - V / (m * c2);
    e.bracket.push_back(br);
    integral += br * dt;
    const double eps = 2 * V / (m * c2) - v2 / c2;
    trunc += eps * eps / 8.0 * dt;
  }
  e.total = e.leading - s * lam_inv * c * integral;
  e.truncation_estimate = lam_inv * c * trunc;
  // exact polygon action in the weak-field metric
  const double mc2 = m * c2;
  MatrixField4 gt = [&f, mc2](const Vec4& x) {
    Mat4 g = Mat4::Identity();
    g(0, 0) = -1.0 - (f.V ? 2.0 * f.V(x) / mc2 : 0.0);
    return g;
  };
  VectorField4 Afull = [&f](const Vec4& x) {
    Vec4 a = f.A ? f.A(x) : Vec4::Zero();
    a[0] = f.A0 ? f.A0(x) : 0.0;
    return a;
  };
  e.exact = lam_inv * action_D(path4, gt, Afull, q, branch, u);
  return e;
}

namespace {

struct SliceForm {
  // φ(x', x) = a x'² + b x' x + c x² + d x' + e x + f
  cplx a, b, c, d, e, f, lognorm;
};

SliceForm slice_form(double m, double q, double eps, const SlicedFields& F, Branch branch,
                     const Units& u) {
  const double s = branch == Branch::minus ? 1.0 : -1.0;
  const double qe = branch == Branch::minus ? q : -q;
  const cplx al = kI * s / u.hbar;
  SliceForm sf;
  if (F.left_point) {
    sf.a = al * (m / (2 * eps) - eps * F.V2 / 2.0);
    sf.b = al * (-m / eps);
    sf.c = al * (m / (2 * eps));
    sf.d = al * (m * qe / u.c * F.Ax - eps * F.V1);
    sf.e = al * (-m * qe / u.c * F.Ax);
  } else {
    sf.a = al * (m / (2 * eps) - eps * F.V2 / 8.0);
    sf.b = al * (-m / eps - eps * F.V2 / 4.0);
    sf.c = al * (m / (2 * eps) - eps * F.V2 / 8.0);
    sf.d = al * (m * qe / u.c * F.Ax - eps * F.V1 / 2.0);
    sf.e = al * (-m * qe / u.c * F.Ax - eps * F.V1 / 2.0);
  }
  sf.f = al * (-m * qe * F.A0 * eps - F.V0 * eps - m * u.c * u.c * eps);
  sf.lognorm = std::log(std::sqrt(cplx(m / (2 * kPi * u.hbar * eps)) / cplx(0.0, s)));
  return sf;
}

}  // namespace

cplx sliced_propagator(double m, double q, double t, double x1, double x2, int slices,
                       const SlicedFields& F, Branch branch, const Units& u) {
  if (!(t > 0.0)) throw PreconditionError("propagator needs t > 0");
  if (slices < 1) throw PreconditionError("propagator needs at least one slice");
  if (!(m > 0.0)) throw PreconditionError("propagator needs m > 0");
  const double eps = t / slices;
  const SliceForm sf = slice_form(m, q, eps, F, branch, u);
  // log ψ(x) = P x² + Q x + R after the first slice from the delta at x1
  cplx P = sf.c;
  cplx Q = sf.e + sf.b * x1;
  cplx R = sf.a * x1 * x1 + sf.d * x1 + sf.f + sf.lognorm;
  for (int k = 1; k < slices; ++k) {
    const cplx A = P + sf.a;
    const cplx Bq = Q + sf.d;  // coefficient of x' that does not depend on x
    // ∫dx' exp(A x'² + (Bq + b x) x') = √(π/(−A)) exp(−(Bq + b x)²/(4A))
    const cplx four_A = 4.0 * A;
    const cplx nP = sf.c - sf.b * sf.b / four_A;
    const cplx nQ = sf.e - 2.0 * sf.b * Bq / four_A;
    const cplx nR = R + sf.f - Bq * Bq / four_A + std::log(std::sqrt(kPi / (-A))) + sf.lognorm;
    P = nP;
    Q = nQ;
    R = nR;
  }
  return std::exp(P * x2 * x2 + Q * x2 + R);
}

cplx free_propagator(double m, double q, double t, double x1, double x2, const SlicedFields& F,
                     Branch branch, const Units& u) {
  if (!(t > 0.0)) throw PreconditionError("propagator needs t > 0");
  const double s = branch == Branch::minus ? 1.0 : -1.0;
  const double qe = branch == Branch::minus ? q : -q;
  const double dx = x2 - x1;
  const cplx norm = std::sqrt(cplx(m / (2 * kPi * u.hbar * t)) / cplx(0.0, s));
  const double S = m * dx * dx / (2 * t) - m * qe / u.c * F.Ax * dx - m * qe * F.A0 * t - F.V0 * t -
                   m * u.c * u.c * t;
  return norm * std::exp(kI * s * S / u.hbar);
}

cplx harmonic_propagator(double m, double omega, double t, double x1, double x2, Branch branch,
                         const Units& u) {
  if (!(omega > 0.0) || !(t > 0.0) || !(omega * t < kPi))
    throw PreconditionError("harmonic propagator needs 0 < omega t < pi");
  const double s = branch == Branch::minus ? 1.0 : -1.0;
  const double sn = std::sin(omega * t), cs = std::cos(omega * t);
  const cplx norm = std::sqrt(cplx(m * omega / (2 * kPi * u.hbar * sn)) / cplx(0.0, s));
  const double S = m * omega / (2 * sn) * ((x1 * x1 + x2 * x2) * cs - 2 * x1 * x2) - m * u.c * u.c * t;
  return norm * std::exp(kI * s * S / u.hbar);
}

SchrodingerCheck schrodinger_free_check(double m, double t, double x1, double x2, int slices,
                                        const Units& u) {
  SchrodingerCheck r;
  r.sliced = sliced_propagator(m, 0.0, t, x1, x2, slices, {}, Branch::minus, u);
  r.analytic = free_propagator(m, 0.0, t, x1, x2, {}, Branch::minus, u);
  r.relative_error = std::abs(r.sliced - r.analytic) / std::abs(r.analytic);
  return r;
}

double free_convolution_residual(double m, double t1, double t2, double x1, double x2,
                                 const Units& u) {
  if (!(t1 > 0.0 && t2 > 0.0)) throw PreconditionError("convolution needs positive times");
  const double c2 = u.c * u.c;
  // analytic continuation of the free kernel to complex intermediate points
  auto K = [&](double t, cplx xa, cplx xb) {
    const cplx norm = std::sqrt(cplx(m / (2 * kPi * u.hbar * t)) / kI);
    const cplx dx = xb - xa;
    return norm * std::exp(kI * (m * dx * dx / (2 * t) - m * c2 * t) / u.hbar);
  };
  const double xs = (x1 * t2 + x2 * t1) / (t1 + t2);
  const double curv = m / (2 * u.hbar) * (1 / t1 + 1 / t2);  // exponent −curv σ² on the rotated line
  const double width = 1.0 / std::sqrt(curv);
  const cplx rot = std::polar(1.0, kPi / 4);
  const int n = 4001;
  const double L = 14.0 * width, ds = 2 * L / (n - 1);
  cplx acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double sg = -L + i * ds;
    const cplx x = xs + rot * sg;
    const double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
    acc += w * K(t2, x, cplx(x2)) * K(t1, cplx(x1), x);
  }
  acc *= rot * ds;
  const cplx ref = K(t1 + t2, cplx(x1), cplx(x2));
  return std::abs(acc - ref) / std::abs(ref);
}

FokkerPlanckCheck fokker_planck_check(double Lambda, double u, double x1, double x2, int steps,
                                      int dims, const Units& un) {
  if (!(Lambda > 0.0)) throw PreconditionError("Fokker-Planck check needs Lambda > 0");
  if (!(u > 0.0)) throw PreconditionError("Fokker-Planck check needs u > 0");
  if (steps < 1) throw PreconditionError("Fokker-Planck check needs steps >= 1");
  if (dims != 1 && dims != 2) throw PreconditionError("Fokker-Planck check supports dims 1 or 2");
  const double c = un.c;
  FokkerPlanckCheck r;
  const int n = steps;
  const double a = c * u / n;
  const double delta = std::sqrt(Lambda * a);
  r.step_x5 = a;
  r.step_transverse = delta;
  const double decay = std::exp(-n * a / Lambda);
  const double cell = 2.0 * delta;  // spacing between reachable sites of fixed parity
  auto logp = [n](int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0);
  };
  // nearest reachable site to the requested separation, per axis
  const double X = x2 - x1;
  int k = static_cast<int>(std::lround((X / delta + n) / 2.0));
  k = std::clamp(k, 0, n);
  const double xs = (2 * k - n) * delta;
  const double p1 = std::exp(logp(k)) / cell;
  const double var = c * Lambda * u;
  const double h1 = std::exp(-xs * xs / (2 * var)) / std::sqrt(2 * kPi * var);
  // dims = 2 uses the same separation on both axes
  r.walk = decay * std::pow(p1, dims);
  r.analytic = decay * std::pow(h1, dims);
  r.ratio = r.walk / r.analytic;
  r.relative_error = std::abs(r.ratio - 1.0);
  double norm1 = 0.0, m2 = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double p = std::exp(logp(j));
    const double x = (2 * j - n) * delta;
    norm1 += p;
    m2 += p * x * x;
  }
  r.normalization = std::pow(norm1, dims);
  r.second_moment = m2 / norm1;
  r.expected_moment = var;
  return r;
}

ThermalMap thermal_map(double beta, double zeta, double m, const Units& u) {
  if (!(beta > 0.0) || !(zeta > 0.0) || !(m > 0.0))
    throw PreconditionError("thermal_map needs beta, zeta, m > 0");
  ThermalMap t;
  t.beta = beta;
  t.zeta = zeta;
  t.m = m;
  t.gamma = zeta / m;
  t.D = 1.0 / (beta * zeta);
  t.Lambda = 2.0 * t.D / u.c;
  t.Lambda_inv = beta * zeta * u.c / 2.0;
  t.M = u.hbar * t.gamma * beta * m / 2.0;
  t.u_quantum = 2.0 / t.gamma;
  return t;
}

double beta_from_Lambda(double Lambda, double zeta, const Units& u) {
  if (!(Lambda > 0.0) || !(zeta > 0.0)) throw PreconditionError("beta_from_Lambda needs positive inputs");
  return 2.0 / (Lambda * zeta * u.c);
}

double sm_exponent(const ThermalMap& tm, double E_a, const Units& u) {
  const double e_a = tm.M / tm.m * E_a;
  return e_a * tm.u_quantum / u.hbar;
}

bool is_physical_sm_state(const std::vector<double>& coefficients) {
  return std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c >= 0.0; });
}

SpectrumCheck stationary_fp_spectrum_check(double Lambda, int sites, double h, double u_total,
                                           int walk_steps, const Units& un) {
  if (!(Lambda > 0.0) || !(h > 0.0) || !(u_total > 0.0))
    throw PreconditionError("spectrum check needs positive Lambda, h, u");
  if (sites < 3) throw PreconditionError("spectrum check needs at least 3 sites");
  if (walk_steps < 2) throw PreconditionError("spectrum check needs at least 2 walk steps");
  const double c = un.c, hb = un.hbar;
  SpectrumCheck r;
  r.M = hb / (Lambda * c);
  const double diff = c * Lambda / 2.0;
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(sites, sites);
  for (int i = 0; i < sites; ++i) {
    G(i, i) = -2.0 * diff / (h * h) - c / Lambda;
    G(i, (i + 1) % sites) += diff / (h * h);
    G(i, (i + sites - 1) % sites) += diff / (h * h);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  for (int i = 0; i < sites; ++i) r.e_generator.push_back(-hb * es.eigenvalues()[i]);
  std::sort(r.e_generator.begin(), r.e_generator.end());
  for (int j = 0; j < sites; ++j) {
    const double k = 2 * kPi * j / (sites * h);
    const double s = std::sin(k * h / 2);
    const double klat2 = 4.0 / (h * h) * s * s;
    r.e_closed.push_back(hb * hb * klat2 / (2 * r.M) + r.M * c * c);
  }
  std::sort(r.e_closed.begin(), r.e_closed.end());
  for (int i = 0; i < sites; ++i)
    r.max_closed_form_error = std::max(r.max_closed_form_error,
                                       std::abs(r.e_generator[i] - r.e_closed[i]) / r.e_closed[i]);
  // mode-number ordering over the distinct branch j = 0..sites/2
  double prev = -1.0;
  for (int j = 0; j <= sites / 2; ++j) {
    const double k = 2 * kPi * j / (sites * h);
    const double s = std::sin(k * h / 2);
    const double e = hb * hb * 4.0 / (h * h) * s * s / (2 * r.M) + r.M * c * c;
    if (e < prev) r.monotone = false;
    prev = e;
  }
  // Lazy random walk on the ring with weight e^{−(c/Λ)du} per step.
  const double du = u_total / walk_steps;
  const double hop = diff * du / (h * h);
  if (2.0 * hop > 1.0) throw PreconditionError("walk hop probability exceeds 1/2; use more steps");
  const double w = std::exp(-c / Lambda * du);
  std::vector<double> psi(sites, 0.0), nxt(sites);
  psi[0] = 1.0;
  auto moments = [&](const std::vector<double>& p) {
    double tot = 0.0, m1 = 0.0;
    for (int i = 0; i < sites; ++i) {
      tot += p[i];
      m1 += p[i] * std::cos(2 * kPi * i / sites);
    }
    return std::pair<double, double>{tot, m1};
  };
  std::pair<double, double> half{};
  const int mid = walk_steps / 2;
  for (int step = 1; step <= walk_steps; ++step) {
    for (int i = 0; i < sites; ++i)
      nxt[i] = w * ((1.0 - 2.0 * hop) * psi[i] + hop * (psi[(i + 1) % sites] + psi[(i + sites - 1) % sites]));
    std::swap(psi, nxt);
    if (step == mid) half = moments(psi);
  }
  const auto full = moments(psi);
  const double span = (walk_steps - mid) * du;
  r.walk_rate_e0 = hb * std::log(half.first / full.first) / span;
  r.walk_rate_e1 = hb * std::log(half.second / full.second) / span;
  r.rel_error_e0 = std::abs(r.walk_rate_e0 - r.e_closed[0]) / r.e_closed[0];
  r.rel_error_e1 = std::abs(r.walk_rate_e1 - r.e_closed[1]) / r.e_closed[1];
  return r;
}

}  // namespace qoptics5
