#pragma once

#include "qoptics5/core.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qoptics5 {

using ScalarField4 = std::function<double(const Vec4&)>;
using VectorField4 = std::function<Vec4(const Vec4&)>;
using MatrixField4 = std::function<Mat4(const Vec4&)>;

struct Symmetries {
  bool indep_x0 = false;
  bool indep_x3 = false;
  bool indep_x5 = false;
};

/// A coordinate point (x0, x1, x2, x3, x5).
struct Event5 {
  Vec5 x = Vec5::Zero();

  Event5() = default;
  explicit Event5(const Vec5& v);
  Event5(double x0, double x1, double x2, double x3, double x5);
};

/// Position-dependent 5D metric h_AB. Evaluation checks finiteness and
/// symmetrizes away round-off so downstream code can assume exact symmetry.
class MetricField5 {
 public:
  using Fn = std::function<Mat5(const Vec5&)>;

  MetricField5() = default;
  MetricField5(Fn fn, Symmetries sym);

  Mat5 operator()(const Vec5& x) const;
  Mat5 operator()(const Event5& e) const { return (*this)(e.x); }
  /// The evaluator output without symmetrization.
  Mat5 raw(const Vec5& x) const;
  const Symmetries& symmetries() const { return sym_; }
  bool valid() const { return static_cast<bool>(fn_); }

 private:
  Fn fn_;
  Symmetries sym_;
};

struct MetricReport {
  double max_asymmetry = 0.0;
  int bad_signature_points = 0;
  double max_x0_derivative = 0.0;
  double max_x3_derivative = 0.0;
  double max_x5_derivative = 0.0;
  bool ok = true;
  std::string message;
};

/// Probes the declared invariants: symmetry, one negative eigenvalue, and the
/// independence flags by central difference.
MetricReport validate_metric(const MetricField5& h, const std::vector<Vec5>& probes,
                             double fd_step = 1e-4);

/// Number of negative and positive eigenvalues of a symmetric matrix.
std::pair<int, int> inertia(const Eigen::MatrixXd& m);

/// x5 foliation. Fields are functions of (x0, x1, x2, x3).
struct FoliationX5 {
  MatrixField4 g;
  VectorField4 A;
  ScalarField4 Phi;
  double q = 0.0;
  Units units;
};

/// x0 foliation. Fields are functions of y = (x1, x2, x3, x5); all 4-index
/// objects use the same ordering.
struct FoliationX0 {
  MatrixField4 G;
  VectorField4 a;
  ScalarField4 phi;
  double Q = 0.0;
  Units units;
};

struct KKPoint {
  Mat4 g;
  Vec4 A;
  double Phi;
};

struct X0Point {
  Mat4 G;
  Vec4 a;
  double phi;
};

Mat5 assemble_kk_point(const Mat4& g, const Vec4& A, double Phi, double q, const Units& u = {});
KKPoint extract_x5_point(const Mat5& h, double q, const Units& u = {});
Mat5 assemble_x0_point(const Mat4& G, const Vec4& a, double phi, double Q, const Units& u = {});
X0Point extract_x0_point(const Mat5& h, double Q, const Units& u = {});

/// Inverse metric in the block form built from (g, A, Phi) directly.
Mat5 kk_inverse_point(const Mat4& g, const Vec4& A, double Phi, double q, const Units& u = {});

/// The assembled field is flagged independent of x5; x0 and x3 flags are
/// copied from `sym`.
MetricField5 assemble_kk_metric(const FoliationX5& fol, Symmetries sym = {});
MetricField5 assemble_x0_metric(const FoliationX0& fol, Symmetries sym = {});

FoliationX5 extract_foliation_x5(const MetricField5& h, double q, const Units& u = {});
FoliationX0 extract_foliation_x0(const MetricField5& h, double Q, const Units& u = {});

/// Map between the 5D coordinate vector and the 4D leaf coordinates of each foliation.
inline Vec4 leaf_x5(const Vec5& x) { return x.head<4>(); }
inline Vec4 leaf_x0(const Vec5& x) { return x.tail<4>(); }
inline Vec5 lift_x5(const Vec4& x, double x5 = 0.0) {
  Vec5 r;
  r << x, x5;
  return r;
}
inline Vec5 lift_x0(const Vec4& y, double x0 = 0.0) {
  Vec5 r;
  r << x0, y;
  return r;
}

enum class TildeKind { lorentzian, riemannian };

struct TildeMetric4 {
  MatrixField4 g;
  TildeKind kind = TildeKind::lorentzian;
};

TildeMetric4 conformal_tilde(MatrixField4 m4, ScalarField4 scalar, TildeKind kind);
TildeMetric4 tilde_of(const FoliationX5& fol);
TildeMetric4 tilde_of(const FoliationX0& fol);

/// Signature check for a tilde metric at one point: (1,3) if Lorentzian, (0,4) if Riemannian.
bool tilde_signature_ok(const TildeMetric4& t, const Vec4& x);

struct WeakFieldMetric {
  MetricField5 h;
  FoliationX5 fol;
  double max_perturbation = 0.0;
  bool warning = false;
};

/// g̃00 = -1 - 2V/(mc²), g̃ij = δij, then g = Φ² g̃ and h assembled from (g, A, Φ).
/// `probes` are the points at which the smallness of the perturbations is measured.
WeakFieldMetric weak_field_metric(ScalarField4 V, double m, VectorField4 A, double q,
                                  ScalarField4 Phi, const std::vector<Vec4>& probes,
                                  const Units& u = {});

/// Parameters for the named metrics.
struct BuiltinParams {
  double E = 0.0;     ///< constant-E: F_01 = E
  double B = 0.0;     ///< constant-B: F_12 = B
  double gacc = 0.0;  ///< weak-field: V = m·gacc·x3
  double m = 1.0;
  double q = 1.0;
  double Phi = 1.0;
};

/// "flat5", "weak-field", "constant-E", "constant-B". Unknown names throw PreconditionError.
FoliationX5 builtin_foliation(const std::string& name, const BuiltinParams& p, const Units& u = {});
const std::vector<std::string>& builtin_metric_names();

/// |h_AB v^A v^B| at a point.
double null_residual(const MetricField5& h, const Vec5& x, const Vec5& v);

}  // namespace qoptics5
