#include "qit/format.hpp"

#include <cmath>
#include <cstdio>

namespace qit {

std::string format_sig10(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  // Negative zero prints as "0".
  std::snprintf(buf, sizeof buf, "%.10g", x == 0.0 ? 0.0 : x);
  return buf;
}

}  // namespace qit
