#include "qit/laws.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <exception>
#include <thread>

#include "qit/errors.hpp"
#include "qit/format.hpp"
#include "qit/measures.hpp"

namespace qit {
namespace {

constexpr double kInequalityTol = 1e-9;
constexpr double kIdentityTol = 1e-10;

constexpr QRange kAllQ{};
constexpr QRange kCampaignSubunit{0.0, 1.0, true};
constexpr QRange kCampaignUpToTwo{0.0, 2.0, false};

constexpr std::array<LawInfo, 10> kLaws{{
    {LawId::kJointChain, "joint-chain", LawKind::kInequality, kSubunitRange, kInequalityTol, kCampaignSubunit},
    {LawId::kIndepSuperadd, "indep-superadd", LawKind::kInequality, kSubunitRange, kInequalityTol, kCampaignSubunit},
    {LawId::kCondChain, "cond-chain", LawKind::kInequality, kSubunitRange, kInequalityTol, kCampaignSubunit},
    {LawId::kBlockChain, "block-chain", LawKind::kInequality, kSubunitRange, kInequalityTol, kCampaignSubunit},
    {LawId::kQlnSum, "qln-sum", LawKind::kInequality, kUpToTwoRange, kInequalityTol, kCampaignUpToTwo},
    {LawId::kDqNonneg, "dq-nonneg", LawKind::kInequality, kUpToTwoRange, kInequalityTol, kCampaignUpToTwo},
    {LawId::kMaxBound, "max-bound", LawKind::kInequality, kUpToTwoRange, kInequalityTol, kCampaignUpToTwo},
    {LawId::kDpi, "dpi", LawKind::kInequality, kSubunitRange, kInequalityTol, kCampaignSubunit},
    {LawId::kInfoChainRule, "info-chain-rule", LawKind::kIdentity, kAllQ, kIdentityTol, kCampaignUpToTwo},
    {LawId::kRelChainRule, "rel-chain-rule", LawKind::kIdentity, kSubunitRange, kIdentityTol, kCampaignSubunit},
}};

template <typename T>
const T& expect(const LawInstance& instance, const LawInfo& info) {
  if (const T* v = std::get_if<T>(&instance)) return *v;
  throw ArgumentError(std::string(info.name) + ": instance has the wrong type for this law");
}

const JointTable& expect_rank(const LawInstance& instance, const LawInfo& info, std::size_t rank) {
  const auto& t = expect<JointTable>(instance, info);
  if (t.rank() != rank) {
    throw ArgumentError(std::string(info.name) + ": expected a rank-" + std::to_string(rank) + " table");
  }
  return t;
}

std::vector<std::size_t> random_shape(std::size_t rank, std::size_t lo, std::size_t hi, Rng& rng) {
  std::vector<std::size_t> shape(rank);
  for (auto& s : shape) s = static_cast<std::size_t>(rng.uniform_int(lo, hi));
  return shape;
}

std::vector<double> random_positive(std::size_t n, Rng& rng) {
  const double scale = std::exp(rng.uniform(-2.0, 2.0));
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.exponential();
  return v;
}

}  // namespace

const LawInfo& law_info(LawId id) { return kLaws[static_cast<std::size_t>(id)]; }

std::span<const LawInfo> all_laws() { return kLaws; }

std::optional<LawId> parse_law(std::string_view name) {
  for (const auto& info : kLaws) {
    if (info.name == name) return info.id;
  }
  return std::nullopt;
}

std::optional<Identity> parse_identity(std::string_view name) {
  if (name == "pseudo-add") return Identity::kPseudoAdd;
  if (name == "info-chain-rule-n2" || name == "info-chain-rule") return Identity::kInfoChainRuleN2;
  if (name == "rel-chain-rule") return Identity::kRelChainRule;
  return std::nullopt;
}

double joint_chain_slack(const JointTable& xy, QParam q) {
  if (xy.rank() != 2) throw ArgumentError("joint-chain: expected a rank-2 table");
  const std::size_t x[] = {0};
  const std::size_t y[] = {1};
  return q_entropy_joint(xy, q) - q_entropy(xy.marginal(0), q) - conditional_q_entropy(xy, y, x, q);
}

double indep_superadd_slack(const ProbVec& px, const ProbVec& py, QParam q) {
  return q_entropy_joint(product_dist(px, py), q) - q_entropy(px, q) - q_entropy(py, q);
}

double cond_chain_slack(const JointTable& xyz, QParam q) {
  if (xyz.rank() != 3) throw ArgumentError("cond-chain: expected a rank-3 table");
  const std::size_t x[] = {0};
  const std::size_t y[] = {1};
  const std::size_t z[] = {2};
  const std::size_t xy[] = {0, 1};
  const std::size_t xz[] = {0, 2};
  return conditional_q_entropy(xyz, xy, z, q) - conditional_q_entropy(xyz, x, z, q) -
         conditional_q_entropy(xyz, y, xz, q);
}

double block_chain_slack(const JointTable& block, QParam q) {
  double sum = 0.0;
  std::vector<std::size_t> past;
  for (std::size_t i = 0; i < block.rank(); ++i) {
    const std::size_t current[] = {i};
    sum += conditional_q_entropy(block, current, past, q);
    past.push_back(i);
  }
  return q_entropy_joint(block, q) - sum;
}

double qln_sum_slack(std::span<const double> r, std::span<const double> s, QParam q) {
  if (r.size() != s.size() || r.empty()) throw ArgumentError("qln-sum: sequences must be nonempty and of equal length");
  double lhs = 0.0;
  double sum_r = 0.0;
  double sum_s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 0.0 || s[i] < 0.0) throw ArgumentError("qln-sum: entries must be nonnegative");
    sum_r += r[i];
    sum_s += s[i];
    if (r[i] > 0.0) lhs += r[i] * ln_q(r[i] / s[i], q);
  }
  const double rhs = sum_r > 0.0 ? sum_r * ln_q(sum_r / sum_s, q) : 0.0;
  return lhs - rhs;
}

double dq_nonneg_slack(const ProbVec& p, const ProbVec& r, QParam q) {
  return relative_q_entropy(p, r, q).value;
}

double max_bound_slack(const ProbVec& p, QParam q) {
  return q_entropy_max(p.size(), q) - q_entropy(p, q).value;
}

double dpi_correction_term(const JointTable& xyz, QParam q) {
  if (xyz.rank() != 3) throw ArgumentError("dpi: expected a rank-3 table");
  const JointTable pxz = xyz.marginal_table({0, 2});
  const JointTable pyz = xyz.marginal_table({1, 2});
  const ProbVec px = xyz.marginal(0);
  const ProbVec pz = xyz.marginal(2);
  const auto& shape = xyz.shape();
  double acc = 0.0;
  for (std::size_t x = 0; x < shape[0]; ++x) {
    for (std::size_t y = 0; y < shape[1]; ++y) {
      for (std::size_t z = 0; z < shape[2]; ++z) {
        const double p = xyz.at({x, y, z});
        if (!(p > 0.0)) continue;
        const double a = pxz.at({x, z}) / (px[x] * pz[z]);
        const double b = p * pz[z] / (pxz.at({x, z}) * pyz.at({y, z}));
        acc += p * ln_q(a, q) * ln_q(b, q);
      }
    }
  }
  return acc;
}

double dpi_slack(const JointTable& xyz, QParam q) {
  if (xyz.rank() != 3) throw ArgumentError("dpi: expected a rank-3 table");
  const JointTable pxy = xyz.marginal_table({0, 1});
  const JointTable pxz = xyz.marginal_table({0, 2});
  return mutual_q_information(pxy, q).value - mutual_q_information(pxz, q).value -
         q.deformation() * dpi_correction_term(xyz, q);
}

double info_chain_rule_residual(const JointTable& x1x2y, QParam q) {
  if (x1x2y.rank() != 3) throw ArgumentError("info-chain-rule: expected a rank-3 table");
  const std::size_t x1[] = {0};
  const std::size_t x2[] = {1};
  const std::size_t x1x2[] = {0, 1};
  const std::size_t y[] = {2};
  const double lhs = mutual_q_information(x1x2y, x1x2, y, {}, q);
  const double i1 = mutual_q_information(x1x2y, x1, y, {}, q);
  const double i2 = mutual_q_information(x1x2y, x2, y, x1, q);

  const JointTable p12 = x1x2y.marginal_table({0, 1});
  const JointTable p1y = x1x2y.marginal_table({0, 2});
  const ProbVec p1 = x1x2y.marginal(0);
  const ProbVec py = x1x2y.marginal(2);
  const auto& shape = x1x2y.shape();
  double cross = 0.0;
  for (std::size_t a = 0; a < shape[0]; ++a) {
    for (std::size_t b = 0; b < shape[1]; ++b) {
      for (std::size_t c = 0; c < shape[2]; ++c) {
        const double p = x1x2y.at({a, b, c});
        if (!(p > 0.0)) continue;
        const double first = p1y.at({a, c}) / (p1[a] * py[c]);
        const double second = p * p1[a] / (p12.at({a, b}) * p1y.at({a, c}));
        cross += p * ln_q(first, q) * ln_q(second, q);
      }
    }
  }
  return std::abs(lhs - i1 - i2 - q.deformation() * cross);
}

double rel_chain_rule_residual(const JointTable& p, const JointTable& r, QParam q) {
  if (p.rank() != 2 || r.rank() != 2 || p.shape() != r.shape()) {
    throw ArgumentError("rel-chain-rule: expected two rank-2 tables of equal shape");
  }
  const double joint = relative_q_entropy(p.flat(), r.flat(), q);
  const ProbVec px = p.marginal(0);
  const ProbVec rx = r.marginal(0);
  const double marginal = relative_q_entropy(px, rx, q).value;
  if (std::isinf(joint) || std::isinf(marginal)) return std::numeric_limits<double>::infinity();

  double conditional_term = 0.0;
  double cross = 0.0;
  const auto& shape = p.shape();
  for (std::size_t x = 0; x < shape[0]; ++x) {
    for (std::size_t y = 0; y < shape[1]; ++y) {
      const double pxy = p.at({x, y});
      if (!(pxy > 0.0)) continue;
      const double rxy = r.at({x, y});
      if (!(rxy > 0.0)) return std::numeric_limits<double>::infinity();
      const double cond_ratio = (pxy / px[x]) / (rxy / rx[x]);
      const double lc = ln_q(cond_ratio, q);
      conditional_term += pxy * lc;
      cross += pxy * ln_q(px[x] / rx[x], q) * lc;
    }
  }
  return std::abs(joint - marginal - conditional_term - q.deformation() * cross);
}

double identity_residual(Identity identity, const IdentityInstance& instance, QParam q) {
  switch (identity) {
    case Identity::kPseudoAdd: {
      const auto* xy = std::get_if<std::pair<double, double>>(&instance);
      if (!xy) throw ArgumentError("pseudo-add: expected a pair of positive reals");
      return std::abs(pseudo_additivity_residual(xy->first, xy->second, q));
    }
    case Identity::kInfoChainRuleN2: {
      const auto* t = std::get_if<JointTable>(&instance);
      if (!t) throw ArgumentError("info-chain-rule-n2: expected a rank-3 table");
      return info_chain_rule_residual(*t, q);
    }
    case Identity::kRelChainRule: {
      const auto* t = std::get_if<TablePair>(&instance);
      if (!t) throw ArgumentError("rel-chain-rule: expected a pair of rank-2 tables");
      return rel_chain_rule_residual(t->p, t->r, q);
    }
  }
  throw ArgumentError("identity_residual: unknown identity");
}

double law_slack(LawId law, const LawInstance& instance, QParam q) {
  const LawInfo& info = law_info(law);
  require_q_in(q, info.validity, info.name);
  switch (law) {
    case LawId::kJointChain:
      return joint_chain_slack(expect_rank(instance, info, 2), q);
    case LawId::kIndepSuperadd: {
      const auto& d = expect<DistPair>(instance, info);
      return indep_superadd_slack(d.p, d.r, q);
    }
    case LawId::kCondChain:
      return cond_chain_slack(expect_rank(instance, info, 3), q);
    case LawId::kBlockChain: {
      const auto& t = expect<JointTable>(instance, info);
      if (t.rank() < 1 || t.rank() > 4) throw ArgumentError("block-chain: rank must be 1..4");
      return block_chain_slack(t, q);
    }
    case LawId::kQlnSum: {
      const auto& s = expect<SequencePair>(instance, info);
      return qln_sum_slack(s.r, s.s, q);
    }
    case LawId::kDqNonneg: {
      const auto& d = expect<DistPair>(instance, info);
      return dq_nonneg_slack(d.p, d.r, q);
    }
    case LawId::kMaxBound:
      return max_bound_slack(expect<ProbVec>(instance, info), q);
    case LawId::kDpi:
      return dpi_slack(expect_rank(instance, info, 3), q);
    case LawId::kInfoChainRule:
      return -info_chain_rule_residual(expect_rank(instance, info, 3), q);
    case LawId::kRelChainRule: {
      const auto& t = expect<TablePair>(instance, info);
      return -rel_chain_rule_residual(t.p, t.r, q);
    }
  }
  throw ArgumentError("law_slack: unknown law");
}

LawInstance random_instance(LawId law, Rng& rng) {
  switch (law) {
    case LawId::kJointChain:
      return random_joint(random_shape(2, 2, 4, rng), rng);
    case LawId::kIndepSuperadd:
    case LawId::kDqNonneg: {
      const auto m = static_cast<std::size_t>(rng.uniform_int(2, 5));
      const auto n = law == LawId::kDqNonneg ? m : static_cast<std::size_t>(rng.uniform_int(2, 5));
      ProbVec p = random_dist(m, rng);
      ProbVec r = random_dist(n, rng);
      return DistPair{std::move(p), std::move(r)};
    }
    case LawId::kCondChain:
    case LawId::kInfoChainRule:
      return random_joint(random_shape(3, 2, 3, rng), rng);
    case LawId::kBlockChain: {
      const auto rank = static_cast<std::size_t>(rng.uniform_int(2, 4));
      return random_joint(random_shape(rank, 2, 3, rng), rng);
    }
    case LawId::kQlnSum: {
      const auto n = static_cast<std::size_t>(rng.uniform_int(2, 6));
      std::vector<double> r = random_positive(n, rng);
      std::vector<double> s = random_positive(n, rng);
      return SequencePair{std::move(r), std::move(s)};
    }
    case LawId::kMaxBound:
      return random_dist(static_cast<std::size_t>(rng.uniform_int(1, 6)), rng);
    case LawId::kDpi: {
      const auto shape = random_shape(3, 2, 3, rng);
      return random_markov_triple({shape[0], shape[1], shape[2]}, rng);
    }
    case LawId::kRelChainRule: {
      auto shape = random_shape(2, 2, 4, rng);
      JointTable p = random_joint(shape, rng);
      JointTable r = random_joint(std::move(shape), rng);
      return TablePair{std::move(p), std::move(r)};
    }
  }
  throw ArgumentError("random_instance: unknown law");
}

SlackReport fuzz(LawId law, std::size_t trials, double q_lo, double q_hi, std::uint64_t seed,
                 unsigned workers) {
  const LawInfo& info = law_info(law);
  if (trials == 0) throw ArgumentError("fuzz: trials must be >= 1");
  if (!std::isfinite(q_lo) || !std::isfinite(q_hi) || q_lo > q_hi) {
    throw ArgumentError("fuzz: q-range must be a finite interval lo <= hi");
  }
  const double lo = std::max(q_lo, info.validity.lo);
  double hi = std::min(q_hi, info.validity.hi);
  const bool hi_excluded = info.validity.hi_open && q_hi >= info.validity.hi;
  if (lo > hi || (hi_excluded && lo >= hi)) {
    std::ostringstream os;
    os << "fuzz: q-range [" << q_lo << ", " << q_hi << "] does not meet the validity range "
       << info.validity.describe() << " of " << info.name;
    throw ArgumentError(os.str());
  }

  std::vector<double> slacks(trials);
  std::vector<double> qs(trials);
  auto run_trial = [&](std::size_t t) {
    Rng rng(seed, t);
    const double q = lo == hi ? lo : rng.uniform(lo, hi);
    const LawInstance instance = random_instance(law, rng);
    qs[t] = q;
    slacks[t] = law_slack(law, instance, QParam(q));
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(trials)));
  if (workers == 1) {
    for (std::size_t t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < trials; t += workers) run_trial(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  // Sequential reduction in trial order keeps the report bit-identical for
  // any worker count.
  SlackReport report{law};
  report.trials = trials;
  report.tolerance = info.tolerance;
  report.q_lo = lo;
  report.q_hi = hi;
  report.seed = seed;
  report.min_slack = std::numeric_limits<double>::infinity();
  report.q_min = std::numeric_limits<double>::infinity();
  report.q_max = -std::numeric_limits<double>::infinity();
  double slack_sum = 0.0;
  double q_sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    report.min_slack = std::min(report.min_slack, slacks[t]);
    slack_sum += slacks[t];
    if (!(slacks[t] >= -info.tolerance)) ++report.violations;
    report.q_min = std::min(report.q_min, qs[t]);
    report.q_max = std::max(report.q_max, qs[t]);
    q_sum += qs[t];
  }
  report.mean_slack = slack_sum / static_cast<double>(trials);
  report.q_mean = q_sum / static_cast<double>(trials);
  return report;
}

std::string slack_report_csv_header() { return "law,trials,min_slack,mean_slack,violations,seed"; }

std::string slack_report_csv_row(const SlackReport& r) {
  std::ostringstream os;
  os << law_info(r.law).name << ',' << r.trials << ',' << format_sig10(r.min_slack) << ','
     << format_sig10(r.mean_slack) << ',' << r.violations << ',' << r.seed;
  return os.str();
}

}  // namespace qit
