#pragma once

// Signed slacks of the q-information inequalities and residuals of the exact
// chain identities, plus a seeded fuzz campaign over random instances.
//
// Every inequality is arranged as slack = LHS - RHS, asserted >= 0. Every
// identity reports |LHS - RHS|; inside a campaign it contributes -|residual|
// so one predicate (slack >= -tol) covers both.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qit/prob.hpp"
#include "qit/qcore.hpp"
#include "qit/rng.hpp"

namespace qit {

enum class LawId {
  kJointChain,      // H(X,Y) >= H(X) + H(Y|X)
  kIndepSuperadd,   // X, Y independent: H(X,Y) >= H(X) + H(Y)
  kCondChain,       // H(X,Y|Z) >= H(X|Z) + H(Y|X,Z)
  kBlockChain,      // H(X_1..X_n) >= sum_i H(X_i | X_{i-1}..X_1)
  kQlnSum,          // sum r ln_q(r/s) >= (sum r) ln_q(sum r / sum s)
  kDqNonneg,        // D_q(p||r) >= 0
  kMaxBound,        // H_q(p) <= -ln_q(1/m)
  kDpi,             // X->Y->Z: I(X;Y) >= I(X;Z) + (1-q) * correction
  kInfoChainRule,   // I(X1,X2;Y) chain rule, identity
  kRelChainRule,    // D(p(x,y)||r(x,y)) chain rule, identity
};

enum class LawKind { kInequality, kIdentity };

struct LawInfo {
  LawId id;
  std::string_view name;
  LawKind kind;
  QRange validity;
  /// Absolute tolerance on the slack.
  double tolerance;
  /// Finite q interval sampled by default campaigns; lies inside `validity`.
  QRange campaign;
};

const LawInfo& law_info(LawId id);
std::span<const LawInfo> all_laws();
std::optional<LawId> parse_law(std::string_view name);

struct DistPair {
  ProbVec p;
  ProbVec r;
};
/// Nonnegative, unnormalized sequences for the q-ln sum inequality.
struct SequencePair {
  std::vector<double> r;
  std::vector<double> s;
};
struct TablePair {
  JointTable p;
  JointTable r;
};

using LawInstance = std::variant<ProbVec, DistPair, SequencePair, JointTable, TablePair>;

/// Slack of `law` on `instance`. Rejects q outside the law's validity range
/// and instances of the wrong arity.
double law_slack(LawId law, const LawInstance& instance, QParam q);

/// Random instance of the arity `law` expects.
LawInstance random_instance(LawId law, Rng& rng);

// Per-law calculators. These do not check q against the validity range, so
// they can also be evaluated outside it.

double joint_chain_slack(const JointTable& xy, QParam q);
double indep_superadd_slack(const ProbVec& px, const ProbVec& py, QParam q);
/// Table axes (X, Y, Z).
double cond_chain_slack(const JointTable& xyz, QParam q);
/// Any rank >= 1; axis order is the chain order.
double block_chain_slack(const JointTable& block, QParam q);
double qln_sum_slack(std::span<const double> r, std::span<const double> s, QParam q);
double dq_nonneg_slack(const ProbVec& p, const ProbVec& r, QParam q);
double max_bound_slack(const ProbVec& p, QParam q);
/// Table axes (X, Y, Z) of a chain X -> Y -> Z.
double dpi_slack(const JointTable& xyz, QParam q);
/// sum p ln_q[p(x,z)/(p(x)p(z))] ln_q[p(x,y|z)/(p(x|z)p(y|z))], without the
/// (1-q) factor.
double dpi_correction_term(const JointTable& xyz, QParam q);

enum class Identity { kPseudoAdd, kInfoChainRuleN2, kRelChainRule };

std::optional<Identity> parse_identity(std::string_view name);

/// |LHS - RHS| of I(X1,X2;Y) = I(X1;Y) + I(X2;Y|X1) + (1-q) sum p ln_q A1 ln_q A2.
/// Table axes (X1, X2, Y).
double info_chain_rule_residual(const JointTable& x1x2y, QParam q);
/// |LHS - RHS| of the relative-entropy chain rule for rank-2 tables of equal
/// shape. Returns +inf when p is not absolutely continuous w.r.t. r.
double rel_chain_rule_residual(const JointTable& p, const JointTable& r, QParam q);

/// Instance for identity_residual: (x, y) for pseudo-add, a rank-3 table for
/// the information chain rule, a TablePair for the relative chain rule.
using IdentityInstance = std::variant<std::pair<double, double>, JointTable, TablePair>;
double identity_residual(Identity identity, const IdentityInstance& instance, QParam q);

struct SlackReport {
  LawId law;
  std::size_t trials = 0;
  double min_slack = 0.0;
  double mean_slack = 0.0;
  std::size_t violations = 0;
  double tolerance = 0.0;
  /// Interval actually sampled (the requested range clipped to validity).
  double q_lo = 0.0;
  double q_hi = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
  double q_mean = 0.0;
  std::uint64_t seed = 0;

  bool passed() const noexcept { return violations == 0; }
  friend bool operator==(const SlackReport&, const SlackReport&) = default;
};

/// Runs `trials` random instances of `law`, q uniform on [q_lo, q_hi]
/// intersected with the validity range. Trial t draws from sub-stream t of
/// `seed`, so the report does not depend on `workers`. Throws ArgumentError
/// when the intersection is empty or trials == 0.
SlackReport fuzz(LawId law, std::size_t trials, double q_lo, double q_hi, std::uint64_t seed,
                 unsigned workers = 1);

std::string slack_report_csv_header();
std::string slack_report_csv_row(const SlackReport& report);

}  // namespace qit
