#include "qoptics5/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace qoptics5 {

namespace {

constexpr double kShiftTol = 1e-14;

template <class M>
void require_finite(const M& m, const std::string& what, const std::string& where) {
  if (!m.allFinite()) throw EvaluationError(what + " is not finite at " + where);
}

void require_finite(double v, const std::string& what, const std::string& where) {
  if (!std::isfinite(v)) throw EvaluationError(what + " is not finite at " + where);
}

}  // namespace

Event5::Event5(const Vec5& v) : x(v) {
  if (!x.allFinite()) throw PreconditionError("Event5 with non-finite coordinates");
}

Event5::Event5(double x0, double x1, double x2, double x3, double x5) {
  x << x0, x1, x2, x3, x5;
  if (!x.allFinite()) throw PreconditionError("Event5 with non-finite coordinates");
}

MetricField5::MetricField5(Fn fn, Symmetries sym) : fn_(std::move(fn)), sym_(sym) {}

Mat5 MetricField5::raw(const Vec5& x) const {
  if (!fn_) throw PreconditionError("empty metric field");
  Mat5 h = fn_(x);
  require_finite(h, "metric", format_point(x));
  return h;
}

Mat5 MetricField5::operator()(const Vec5& x) const {
  const Mat5 h = raw(x);
  return 0.5 * (h + h.transpose());
}

std::pair<int, int> inertia(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  int neg = 0, pos = 0;
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-14 * scale) ++neg;
    else if (ev[i] > 1e-14 * scale) ++pos;
  }
  return {neg, pos};
}

MetricReport validate_metric(const MetricField5& h, const std::vector<Vec5>& probes,
                             double fd_step) {
  MetricReport r;
  for (const auto& x : probes) {
    const Mat5 raw = h.raw(x);
    r.max_asymmetry = std::max(r.max_asymmetry, (raw - raw.transpose()).cwiseAbs().maxCoeff());
    auto [neg, pos] = inertia(h(x));
    if (neg != 1 || pos != 4) ++r.bad_signature_points;
    auto dmax = [&](int axis) {
      Vec5 e = Vec5::Zero();
      e[axis] = fd_step;
      return ((h(x + e) - h(x - e)) / (2 * fd_step)).cwiseAbs().maxCoeff();
    };
    r.max_x0_derivative = std::max(r.max_x0_derivative, dmax(0));
    r.max_x3_derivative = std::max(r.max_x3_derivative, dmax(3));
    r.max_x5_derivative = std::max(r.max_x5_derivative, dmax(kX5));
  }
  std::ostringstream msg;
  const auto& s = h.symmetries();
  if (r.max_asymmetry > 1e-12) {
    r.ok = false;
    msg << "asymmetry " << r.max_asymmetry << "; ";
  }
  if (r.bad_signature_points) {
    r.ok = false;
    msg << r.bad_signature_points << " probe(s) with wrong signature; ";
  }
  if (s.indep_x0 && r.max_x0_derivative >= 1e-9) {
    r.ok = false;
    msg << "declared x0-independent but |dh/dx0|=" << r.max_x0_derivative << "; ";
  }
  if (s.indep_x3 && r.max_x3_derivative >= 1e-9) {
    r.ok = false;
    msg << "declared x3-independent but |dh/dx3|=" << r.max_x3_derivative << "; ";
  }
  if (s.indep_x5 && r.max_x5_derivative >= 1e-9) {
    r.ok = false;
    msg << "declared x5-independent but |dh/dx5|=" << r.max_x5_derivative << "; ";
  }
  r.message = msg.str();
  return r;
}

Mat5 assemble_kk_point(const Mat4& g, const Vec4& A, double Phi, double q, const Units& u) {
  const double k = q / (u.c * u.c);
  const double P2 = Phi * Phi;
  Mat5 h;
  h.topLeftCorner<4, 4>() = g + k * k * P2 * A * A.transpose();
  h.block<4, 1>(0, 4) = k * P2 * A;
  h.block<1, 4>(4, 0) = (k * P2 * A).transpose();
  h(4, 4) = P2;
  return h;
}

KKPoint extract_x5_point(const Mat5& h, double q, const Units& u) {
  const double h55 = h(4, 4);
  if (!(h55 > 0.0)) {
    std::ostringstream os;
    os << "h_55 = " << h55 << " is not positive";
    throw SignatureError(os.str());
  }
  const Vec4 shift = h.block<4, 1>(0, 4);
  KKPoint p;
  p.Phi = std::sqrt(h55);
  if (q == 0.0) {
    if (shift.cwiseAbs().maxCoeff() > kShiftTol)
      throw InconsistentChargeError("h_mu5 is nonzero but q = 0");
    p.A = Vec4::Zero();
  } else {
    p.A = (u.c * u.c / q) * shift / h55;
  }
  p.g = h.topLeftCorner<4, 4>() - shift * shift.transpose() / h55;
  return p;
}

Mat5 assemble_x0_point(const Mat4& G, const Vec4& a, double phi, double Q, const Units& u) {
  const double k = Q / (u.c * u.c);
  const double p2 = phi * phi;
  Mat5 h;
  h(0, 0) = -p2;
  h.block<1, 4>(0, 1) = (k * p2 * a).transpose();
  h.block<4, 1>(1, 0) = k * p2 * a;
  h.bottomRightCorner<4, 4>() = G - k * k * p2 * a * a.transpose();
  return h;
}

X0Point extract_x0_point(const Mat5& h, double Q, const Units& u) {
  const double h00 = h(0, 0);
  if (!(h00 < 0.0)) {
    std::ostringstream os;
    os << "h_00 = " << h00 << " is not negative";
    throw SignatureError(os.str());
  }
  const Vec4 shift = h.block<4, 1>(1, 0);
  X0Point p;
  const double p2 = -h00;
  p.phi = std::sqrt(p2);
  if (Q == 0.0) {
    if (shift.cwiseAbs().maxCoeff() > kShiftTol)
      throw InconsistentChargeError("h_0mu is nonzero but Q = 0");
    p.a = Vec4::Zero();
  } else {
    p.a = (u.c * u.c / Q) * shift / p2;
  }
  p.G = h.bottomRightCorner<4, 4>() - shift * shift.transpose() / h00;
  return p;
}

Mat5 kk_inverse_point(const Mat4& g, const Vec4& A, double Phi, double q, const Units& u) {
  const double k = q / (u.c * u.c);
  const Mat4 gi = g.inverse();
  const Vec4 Aup = gi * A;
  Mat5 hi;
  hi.topLeftCorner<4, 4>() = gi;
  hi.block<4, 1>(0, 4) = -k * Aup;
  hi.block<1, 4>(4, 0) = -k * Aup.transpose();
  hi(4, 4) = 1.0 / (Phi * Phi) + k * k * A.dot(Aup);
  return hi;
}

MetricField5 assemble_kk_metric(const FoliationX5& fol, Symmetries sym) {
  sym.indep_x5 = true;
  return MetricField5(
      [fol](const Vec5& x) {
        const Vec4 y = leaf_x5(x);
        const std::string where = format_point(x);
        const Mat4 g = fol.g(y);
        const Vec4 A = fol.A(y);
        const double Phi = fol.Phi(y);
        require_finite(g, "g", where);
        require_finite(A, "A", where);
        require_finite(Phi, "Phi", where);
        return assemble_kk_point(g, A, Phi, fol.q, fol.units);
      },
      sym);
}

MetricField5 assemble_x0_metric(const FoliationX0& fol, Symmetries sym) {
  sym.indep_x0 = true;
  return MetricField5(
      [fol](const Vec5& x) {
        const Vec4 y = leaf_x0(x);
        const std::string where = format_point(x);
        const Mat4 G = fol.G(y);
        const Vec4 a = fol.a(y);
        const double phi = fol.phi(y);
        require_finite(G, "G", where);
        require_finite(a, "a", where);
        require_finite(phi, "phi", where);
        return assemble_x0_point(G, a, phi, fol.Q, fol.units);
      },
      sym);
}

FoliationX5 extract_foliation_x5(const MetricField5& h, double q, const Units& u) {
  if (!h.symmetries().indep_x5)
    throw SymmetryError("extract_foliation_x5 needs a metric flagged independent of x5");
  // Probe once so a bad signature or charge is reported at construction.
  extract_x5_point(h(Vec5::Zero()), q, u);
  FoliationX5 f;
  f.q = q;
  f.units = u;
  f.g = [h, q, u](const Vec4& y) { return extract_x5_point(h(lift_x5(y)), q, u).g; };
  f.A = [h, q, u](const Vec4& y) { return extract_x5_point(h(lift_x5(y)), q, u).A; };
  f.Phi = [h, q, u](const Vec4& y) { return extract_x5_point(h(lift_x5(y)), q, u).Phi; };
  return f;
}

FoliationX0 extract_foliation_x0(const MetricField5& h, double Q, const Units& u) {
  if (!h.symmetries().indep_x0)
    throw SymmetryError("extract_foliation_x0 needs a metric flagged independent of x0");
  extract_x0_point(h(Vec5::Zero()), Q, u);
  FoliationX0 f;
  f.Q = Q;
  f.units = u;
  f.G = [h, Q, u](const Vec4& y) { return extract_x0_point(h(lift_x0(y)), Q, u).G; };
  f.a = [h, Q, u](const Vec4& y) { return extract_x0_point(h(lift_x0(y)), Q, u).a; };
  f.phi = [h, Q, u](const Vec4& y) { return extract_x0_point(h(lift_x0(y)), Q, u).phi; };
  return f;
}

TildeMetric4 conformal_tilde(MatrixField4 m4, ScalarField4 scalar, TildeKind kind) {
  TildeMetric4 t;
  t.kind = kind;
  t.g = [m4 = std::move(m4), scalar = std::move(scalar)](const Vec4& x) {
    const double s = scalar(x);
    if (s == 0.0 || !std::isfinite(s))
      throw SingularError("conformal factor vanishes at " + format_point(x));
    return Mat4(m4(x) / (s * s));
  };
  return t;
}

TildeMetric4 tilde_of(const FoliationX5& fol) {
  return conformal_tilde(fol.g, fol.Phi, TildeKind::lorentzian);
}

TildeMetric4 tilde_of(const FoliationX0& fol) {
  return conformal_tilde(fol.G, fol.phi, TildeKind::riemannian);
}

bool tilde_signature_ok(const TildeMetric4& t, const Vec4& x) {
  auto [neg, pos] = inertia(t.g(x));
  return t.kind == TildeKind::lorentzian ? (neg == 1 && pos == 3) : (neg == 0 && pos == 4);
}

WeakFieldMetric weak_field_metric(ScalarField4 V, double m, VectorField4 A, double q,
                                  ScalarField4 Phi, const std::vector<Vec4>& probes,
                                  const Units& u) {
  if (!(m > 0.0)) throw PreconditionError("weak_field_metric needs m > 0");
  const double c2 = u.c * u.c;
  WeakFieldMetric w;
  w.fol.q = q;
  w.fol.units = u;
  w.fol.A = A;
  w.fol.Phi = Phi;
  w.fol.g = [V, m, Phi, c2](const Vec4& x) {
    Mat4 gt = Mat4::Identity();
    gt(0, 0) = -1.0 - 2.0 * V(x) / (m * c2);
    const double P = Phi(x);
    return Mat4(P * P * gt);
  };
  for (const auto& x : probes) {
    w.max_perturbation = std::max(w.max_perturbation, std::abs(2.0 * V(x) / (m * c2)));
    w.max_perturbation =
        std::max(w.max_perturbation, (q / c2 * A(x)).cwiseAbs().maxCoeff());
  }
  w.warning = w.max_perturbation > 0.1;
  w.h = assemble_kk_metric(w.fol);
  return w;
}

const std::vector<std::string>& builtin_metric_names() {
  static const std::vector<std::string> names{"flat5", "weak-field", "constant-E", "constant-B"};
  return names;
}

FoliationX5 builtin_foliation(const std::string& name, const BuiltinParams& p, const Units& u) {
  FoliationX5 f;
  f.q = p.q;
  f.units = u;
  const double Phi = p.Phi;
  if (!(Phi > 0.0)) throw PreconditionError("builtin metric needs Phi > 0");
  f.Phi = [Phi](const Vec4&) { return Phi; };
  const Mat4 eta = Vec4(-1, 1, 1, 1).asDiagonal();
  f.g = [eta, Phi](const Vec4&) { return Mat4(Phi * Phi * eta); };
  f.A = [](const Vec4&) { return Vec4::Zero().eval(); };
  if (name == "flat5") return f;
  if (name == "weak-field") {
    const double ga = p.gacc, c2 = u.c * u.c;
    f.g = [eta, Phi, ga, c2](const Vec4& x) {
      Mat4 gt = eta;
      gt(0, 0) = -1.0 - 2.0 * ga * x[3] / c2;
      return Mat4(Phi * Phi * gt);
    };
    return f;
  }
  if (name == "constant-E") {
    const double E = p.E;
    f.A = [E](const Vec4& x) { return Vec4(-E * x[1], 0, 0, 0); };
    return f;
  }
  if (name == "constant-B") {
    const double B = p.B;
    f.A = [B](const Vec4& x) { return Vec4(0, -0.5 * B * x[2], 0.5 * B * x[1], 0); };
    return f;
  }
  throw PreconditionError("unknown metric '" + name + "'");
}

double null_residual(const MetricField5& h, const Vec5& x, const Vec5& v) {
  return std::abs(v.dot(h(x) * v));
}

}  // namespace qoptics5
