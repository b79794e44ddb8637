#include "qoptics5/convergence.hpp"

#include "qoptics5/core.hpp"

#include <cmath>
#include <iomanip>
#include <locale>
#include <sstream>

namespace qoptics5 {

std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

ConvergenceTable emit_convergence_table(const std::vector<std::pair<double, double>>& series) {
  if (series.size() < 3) throw PreconditionError("convergence table needs at least 3 points");
  ConvergenceTable t;
  std::ostringstream os;
  os << "resolution,error\n";
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(series.size());
  for (const auto& [res, err] : series) {
    if (!(res > 0.0) || !(err > 0.0))
      throw PreconditionError("convergence table needs positive resolution and error");
    os << format_double(res) << ',' << format_double(err) << '\n';
    const double x = std::log(res), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw PreconditionError("convergence table needs distinct resolutions");
  const double slope = (n * sxy - sx * sy) / den;
  t.order = -slope;
  t.intercept = (sy - slope * sx) / n;
  t.csv = os.str();
  if (std::abs(t.order) < 0.1) {
    t.warning = true;
    t.message = "error is insensitive to resolution (fitted order " + format_double(t.order) + ")";
  }
  return t;
}

}  // namespace qoptics5
