#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qoptics5 {

struct ConvergenceTable {
  std::string csv;       ///< header "resolution,error" then one row per point
  double order = 0.0;    ///< −slope of log(error) against log(resolution)
  double intercept = 0.0;
  bool warning = false;  ///< |order| < 0.1: the error does not respond to refinement
  std::string message;
};

/// Least-squares fit on log-log axes. `resolution` is a count (slices, steps) so that a
/// first-order method gives order ≈ 1. Throws PreconditionError for fewer than 3 points
/// or non-positive entries.
ConvergenceTable emit_convergence_table(const std::vector<std::pair<double, double>>& series);

/// Decimal text with 17 significant digits in the classic locale.
std::string format_double(double v);

}  // namespace qoptics5
