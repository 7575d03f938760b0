#include "qit/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qit/errors.hpp"

namespace qit {
namespace {

std::vector<std::size_t> concat(std::span<const std::size_t> a, std::span<const std::size_t> b,
                                std::span<const std::size_t> c = {}) {
  std::vector<std::size_t> out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  out.insert(out.end(), c.begin(), c.end());
  return out;
}

std::size_t cells(const JointTable& t, std::size_t first_axis, std::size_t count) {
  std::size_t n = 1;
  for (std::size_t k = first_axis; k < first_axis + count; ++k) n *= t.shape()[k];
  return n;
}

void require_rank(const JointTable& j, std::size_t rank, const char* what) {
  if (j.rank() != rank) {
    throw ArgumentError(std::string(what) + ": expected a rank-" + std::to_string(rank) + " table");
  }
}

}  // namespace

std::string_view to_string(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::kTsallisEntropy: return "tsallis_entropy";
    case MeasureKind::kQEntropy: return "q_entropy";
    case MeasureKind::kJointQEntropy: return "q_entropy_joint";
    case MeasureKind::kConditionalQEntropy: return "q_entropy_conditional";
    case MeasureKind::kRelativeQEntropy: return "relative_q_entropy";
    case MeasureKind::kMutualQInformation: return "mutual_q_information";
    case MeasureKind::kConditionalMutualQInformation: return "conditional_mutual_q_information";
  }
  return "unknown";
}

bool MeasureValue::is_infinite() const noexcept { return std::isinf(value); }

MeasureValue tsallis_entropy(const ProbVec& p, QParam q) {
  double acc = 0.0;
  for (double pi : p.values()) {
    if (pi > 0.0) acc += std::pow(pi, q.value()) * ln_q(pi, q);
  }
  return {-acc, q, MeasureKind::kTsallisEntropy};
}

MeasureValue q_entropy(const ProbVec& p, QParam q) {
  double acc = 0.0;
  for (double pi : p.values()) {
    if (pi > 0.0) acc += pi * ln_q(pi, q);
  }
  return {-acc, q, MeasureKind::kQEntropy};
}

MeasureValue q_entropy_joint(const JointTable& j, QParam q) {
  double acc = 0.0;
  for (double p : j.flat()) {
    if (p > 0.0) acc += p * ln_q(p, q);
  }
  return {-acc, q, MeasureKind::kJointQEntropy};
}

MeasureValue q_entropy_conditional(const JointTable& j, std::size_t given_axis, QParam q) {
  require_rank(j, 2, "q_entropy_conditional");
  if (given_axis > 1) throw ArgumentError("q_entropy_conditional: axis must be 0 or 1");
  const std::size_t target[] = {1 - given_axis};
  const std::size_t given[] = {given_axis};
  return {conditional_q_entropy(j, target, given, q), q, MeasureKind::kConditionalQEntropy};
}

double relative_q_entropy(std::span<const double> p, std::span<const double> r, QParam q) {
  if (p.size() != r.size()) throw ArgumentError("relative_q_entropy: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > 0.0)) continue;
    if (r[i] > 0.0) {
      acc += p[i] * ln_q(p[i] / r[i], q);
    } else if (!q.is_shannon() && q.value() > 1.0) {
      acc += p[i] / (q.value() - 1.0);
    } else {
      return std::numeric_limits<double>::infinity();
    }
  }
  return acc;
}

MeasureValue relative_q_entropy(const ProbVec& p, const ProbVec& r, QParam q) {
  return {relative_q_entropy(p.values(), r.values(), q), q, MeasureKind::kRelativeQEntropy};
}

MeasureValue mutual_q_information(const JointTable& j, QParam q) {
  require_rank(j, 2, "mutual_q_information");
  const std::size_t a[] = {0};
  const std::size_t b[] = {1};
  return {mutual_q_information(j, a, b, {}, q), q, MeasureKind::kMutualQInformation};
}

MeasureValue conditional_mutual_q_information(const JointTable& j, QParam q) {
  require_rank(j, 3, "conditional_mutual_q_information");
  const std::size_t a[] = {0};
  const std::size_t b[] = {1};
  const std::size_t c[] = {2};
  return {mutual_q_information(j, a, b, c, q), q, MeasureKind::kConditionalMutualQInformation};
}

double q_entropy_max(std::size_t m, QParam q) {
  if (m == 0) throw ArgumentError("q_entropy_max: m must be >= 1");
  require_q_in(q, kUpToTwoRange, "q_entropy_max");
  return -ln_q(1.0 / static_cast<double>(m), q);
}

double conditional_q_entropy(const JointTable& j, std::span<const std::size_t> target,
                             std::span<const std::size_t> given, QParam q) {
  // Given axes lead, so each conditioning value owns a contiguous block.
  const std::vector<std::size_t> axes = concat(given, target);
  const JointTable t = j.marginal_table(axes);
  const std::size_t block = cells(t, given.size(), target.size());
  const auto data = t.flat();
  double acc = 0.0;
  for (std::size_t start = 0; start < data.size(); start += block) {
    double mass = 0.0;
    for (std::size_t k = 0; k < block; ++k) mass += data[start + k];
    if (!(mass > 0.0)) continue;
    for (std::size_t k = 0; k < block; ++k) {
      const double p = data[start + k];
      if (p > 0.0) acc += p * ln_q(p / mass, q);
    }
  }
  return -acc;
}

double mutual_q_information(const JointTable& j, std::span<const std::size_t> a,
                            std::span<const std::size_t> b, std::span<const std::size_t> given,
                            QParam q) {
  const std::vector<std::size_t> axes = concat(given, a, b);
  const JointTable t = j.marginal_table(axes);
  const std::size_t na = cells(t, given.size(), a.size());
  const std::size_t nb = cells(t, given.size() + a.size(), b.size());
  const std::size_t block = na * nb;
  const auto data = t.flat();
  std::vector<double> pa(na);
  std::vector<double> pb(nb);
  double acc = 0.0;
  for (std::size_t start = 0; start < data.size(); start += block) {
    std::fill(pa.begin(), pa.end(), 0.0);
    std::fill(pb.begin(), pb.end(), 0.0);
    double pc = 0.0;
    for (std::size_t ia = 0; ia < na; ++ia) {
      for (std::size_t ib = 0; ib < nb; ++ib) {
        const double p = data[start + ia * nb + ib];
        pa[ia] += p;
        pb[ib] += p;
        pc += p;
      }
    }
    for (std::size_t ia = 0; ia < na; ++ia) {
      for (std::size_t ib = 0; ib < nb; ++ib) {
        const double p = data[start + ia * nb + ib];
        if (p > 0.0) acc += p * ln_q(p * pc / (pa[ia] * pb[ib]), q);
      }
    }
  }
  return acc;
}

}  // namespace qit
