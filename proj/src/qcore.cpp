#include "qit/qcore.hpp"

#include <cmath>
#include <sstream>

#include "qit/errors.hpp"

namespace qit {

QParam::QParam(double q) : q_(q) {
  if (!std::isfinite(q)) {
    throw ArgumentError("q must be finite");
  }
}

bool QParam::is_shannon() const noexcept { return std::abs(q_ - 1.0) <= kShannonBand; }

bool QRange::contains(double q) const noexcept {
  if (q < lo) return false;
  return hi_open ? q < hi : q <= hi;
}

std::string QRange::describe() const {
  std::ostringstream os;
  os << '[';
  if (std::isinf(lo)) {
    os << "-inf";
  } else {
    os << lo;
  }
  os << ", ";
  if (std::isinf(hi)) {
    os << "inf";
  } else {
    os << hi;
  }
  os << (hi_open ? ')' : ']');
  return os.str();
}

void require_q_in(QParam q, const QRange& range, std::string_view what) {
  if (!range.contains(q.value())) {
    std::ostringstream os;
    os << what << ": q = " << q.value() << " outside validity range " << range.describe();
    throw ArgumentError(os.str());
  }
}

double ln_q(double x, QParam q) {
  if (std::isnan(x) || x < 0.0) {
    throw DomainError("ln_q: argument must be nonnegative");
  }
  if (x == 0.0) {
    if (q.is_shannon() || q.value() >= 1.0) {
      return -std::numeric_limits<double>::infinity();
    }
    return -1.0 / q.deformation();
  }
  if (std::isinf(x)) {
    // Limit of x^{1-q}: diverges for q < 1, vanishes for q > 1.
    if (q.is_shannon() || q.value() < 1.0) return std::numeric_limits<double>::infinity();
    return -1.0 / q.deformation();
  }
  const double lx = std::log(x);
  if (q.is_shannon()) return lx;
  return std::expm1(q.deformation() * lx) / q.deformation();
}

double ln_q_of_log(double log_x, QParam q) {
  if (q.is_shannon()) return log_x;
  return std::expm1(q.deformation() * log_x) / q.deformation();
}

double exp_q(double x, QParam q) {
  if (q.is_shannon()) return std::exp(x);
  const double d = q.deformation();
  const double base = 1.0 + d * x;
  if (!(base > 0.0)) {
    std::ostringstream os;
    os << "exp_q: 1 + (1-q)x = " << base << " <= 0 at x = " << x << ", q = " << q.value();
    throw ExpQDomainError(os.str(), -1.0 / d);
  }
  return std::exp(std::log1p(d * x) / d);
}

double exp_q_cutoff(double x, QParam q) {
  if (!q.is_shannon() && q.value() < 1.0 && !(1.0 + q.deformation() * x > 0.0)) {
    return 0.0;
  }
  return exp_q(x, q);
}

double pseudo_additivity_residual(double x, double y, QParam q) {
  const double lx = ln_q(x, q);
  const double ly = ln_q(y, q);
  return ln_q(x * y, q) - lx - ly - q.deformation() * lx * ly;
}

}  // namespace qit
