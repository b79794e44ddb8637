#include "qoptics5/core.hpp"

#include <sstream>

namespace qoptics5 {

namespace {
template <class V>
std::string format_vec(const V& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}
}  // namespace

std::string format_point(const Vec5& x) { return format_vec(x); }
std::string format_point(const Vec4& x) { return format_vec(x); }

}  // namespace qoptics5
