#pragma once

#include <string>

namespace qit {

/// Ten significant digits, '.' decimal point, "inf"/"-inf"/"nan" for
/// non-finite values. Used for every CSV cell.
std::string format_sig10(double x);

}  // namespace qit
