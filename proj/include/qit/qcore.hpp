#pragma once

// q-deformed scalar algebra: q-logarithm, q-exponential and the
// pseudo-additivity relation
//
//   ln_q(xy) = ln_q(x) + ln_q(y) + (1-q) ln_q(x) ln_q(y)
//
// that produces every interaction term in the measures built on top.

#include <limits>
#include <string>
#include <string_view>

namespace qit {

/// Width of the band around q = 1 treated as the Shannon limit.
inline constexpr double kShannonBand = 1e-12;

/// Entropic index q. Always finite.
class QParam {
 public:
  explicit QParam(double q);

  double value() const noexcept { return q_; }
  /// 1 - q, the deformation strength.
  double deformation() const noexcept { return 1.0 - q_; }
  /// True inside the band where natural log/exp are used.
  bool is_shannon() const noexcept;

 private:
  double q_;
};

/// Validity interval for q attached to a law or operation. Endpoints may be
/// infinite; the upper endpoint may be open.
struct QRange {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool hi_open = false;

  bool contains(double q) const noexcept;
  std::string describe() const;
};

/// Range [0, 1).
inline constexpr QRange kSubunitRange{0.0, 1.0, true};
/// Range (-inf, 2].
inline constexpr QRange kUpToTwoRange{-std::numeric_limits<double>::infinity(), 2.0, false};

/// Throws ArgumentError naming `what` and the range when q is outside it.
void require_q_in(QParam q, const QRange& range, std::string_view what);

/// (x^{1-q} - 1)/(1-q). ln_q(0) is -1/(1-q) for q < 1 and -inf otherwise.
/// Throws DomainError for x < 0.
double ln_q(double x, QParam q);

/// [1 + (1-q)x]^{1/(1-q)}. Throws ExpQDomainError when 1 + (1-q)x <= 0.
double exp_q(double x, QParam q);

/// Cutoff q-exponential: zero where 1 + (1-q)x <= 0 and q < 1, otherwise
/// exp_q. For q > 1 the domain error still propagates.
double exp_q_cutoff(double x, QParam q);

/// ln_q(e^L) for a natural log L, without forming e^L.
double ln_q_of_log(double log_x, QParam q);

/// ln_q(xy) - ln_q(x) - ln_q(y) - (1-q) ln_q(x) ln_q(y).
double pseudo_additivity_residual(double x, double y, QParam q);

}  // namespace qit
