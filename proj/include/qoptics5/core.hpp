#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace qoptics5 {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;
using Vec5 = Eigen::Matrix<double, 5, 1>;
using Mat5 = Eigen::Matrix<double, 5, 5>;
using cplx = std::complex<double>;

/// Position of x^5 inside a Vec5; the first four slots are x^0..x^3.
inline constexpr int kX5 = 4;

/// Physical scale factors. Everything inside the library is written with c,
/// hbar and k_B explicit so the formulas stay literal; the defaults give
/// geometric units.
struct Units {
  double c = 1.0;
  double hbar = 1.0;
  double kB = 1.0;
};

/// Which sign of the proper-length term a 4D action uses, D_± = ∫(±dτ − (q/c²)A dx).
/// `minus` is the particle propagating forward in time.
enum class Branch { minus = -1, plus = +1 };

inline double sign_of(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A field evaluator returned something non-finite.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Wrong number of negative eigenvalues, or a lapse-like component with the wrong sign.
class SignatureError : public Error {
 public:
  using Error::Error;
};

/// Nonzero shift with zero specific charge.
class InconsistentChargeError : public Error {
 public:
  using Error::Error;
};

/// An operation that needs a coordinate symmetry was handed a field without it.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

class SingularError : public Error {
 public:
  using Error::Error;
};

/// Input outside the domain the operation is defined on.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Kinematics below a production threshold.
class ThresholdError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Iterative procedures that failed to reach their tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

std::string format_point(const Vec5& x);
std::string format_point(const Vec4& x);

}  // namespace qoptics5
