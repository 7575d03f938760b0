#pragma once

// q-information measures. Every sum uses the convention 0 * ln_q(.) = 0.

#include <cstddef>
#include <span>
#include <string_view>

#include "qit/prob.hpp"
#include "qit/qcore.hpp"

namespace qit {

enum class MeasureKind {
  kTsallisEntropy,
  kQEntropy,
  kJointQEntropy,
  kConditionalQEntropy,
  kRelativeQEntropy,
  kMutualQInformation,
  kConditionalMutualQInformation,
};

std::string_view to_string(MeasureKind kind);

/// A measure value in dimensionless q-nats. Relative entropy may be +inf.
struct MeasureValue {
  double value;
  QParam q;
  MeasureKind kind;

  bool is_infinite() const noexcept;
  operator double() const noexcept { return value; }
};

/// S_q = -sum p^q ln_q p.
MeasureValue tsallis_entropy(const ProbVec& p, QParam q);
/// H_q = -sum p ln_q p.
MeasureValue q_entropy(const ProbVec& p, QParam q);
/// H_q over every cell of a table of any rank.
MeasureValue q_entropy_joint(const JointTable& j, QParam q);
/// H_q(other | given) for a rank-2 table.
MeasureValue q_entropy_conditional(const JointTable& j, std::size_t given_axis, QParam q);

/// D_q(p || r) = sum p ln_q(p/r).
///
/// A cell with p > 0 and r = 0 makes the result +inf when q <= 1; for q > 1
/// it contributes the finite limit p/(q-1). Throws ArgumentError on a length
/// mismatch.
MeasureValue relative_q_entropy(const ProbVec& p, const ProbVec& r, QParam q);
double relative_q_entropy(std::span<const double> p, std::span<const double> r, QParam q);

/// I_q(X;Y) = D_q(p(x,y) || p(x)p(y)) for a rank-2 table.
MeasureValue mutual_q_information(const JointTable& j, QParam q);
/// I_q(X;Y|Z) for a rank-3 table with axes (X, Y, Z).
MeasureValue conditional_mutual_q_information(const JointTable& j, QParam q);

/// Supremum of H_q over the m-simplex, -ln_q(1/m), attained at uniform.
/// Rejects q > 2.
double q_entropy_max(std::size_t m, QParam q);

// Generic forms over axis sets, used by the laws and the Markov tools.

/// H_q(target | given) = -sum p(t,g) ln_q[p(t,g)/p(g)]. An empty `given`
/// gives the joint entropy of `target`.
double conditional_q_entropy(const JointTable& j, std::span<const std::size_t> target,
                             std::span<const std::size_t> given, QParam q);

/// I_q(A;B|C) = sum p(a,b,c) ln_q[p(a,b,c)p(c) / (p(a,c)p(b,c))]. An empty
/// `given` gives I_q(A;B).
double mutual_q_information(const JointTable& j, std::span<const std::size_t> a,
                            std::span<const std::size_t> b, std::span<const std::size_t> given,
                            QParam q);

}  // namespace qit
