#pragma once

// Discrete probability containers and the random-instance generators used by
// the verification harness.

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "qit/rng.hpp"

namespace qit {

/// Constructors reject inputs whose total differs from 1 by more than this.
inline constexpr double kNormalizationTolerance = 1e-9;

/// Finite discrete probability distribution.
class ProbVec {
 public:
  /// Validates p_i >= 0, length >= 1 and |sum - 1| <= 1e-9. Labels, when
  /// given, must match the length.
  explicit ProbVec(std::vector<double> p, std::vector<std::string> labels = {});

  /// Divides by the total. Requires nonnegative entries with a positive sum.
  static ProbVec normalize(std::vector<double> weights);
  static ProbVec uniform(std::size_t m);
  /// Point mass on `index`.
  static ProbVec point(std::size_t m, std::size_t index);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const noexcept { return p_; }
  const std::vector<double>& vector() const noexcept { return p_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  friend bool operator==(const ProbVec& a, const ProbVec& b) { return a.p_ == b.p_; }

 private:
  std::vector<double> p_;
  std::vector<std::string> labels_;
};

/// Nonnegative table of arbitrary rank summing to 1, stored row-major.
class JointTable {
 public:
  JointTable(std::vector<std::size_t> shape, std::vector<double> data);

  static JointTable normalize(std::vector<std::size_t> shape, std::vector<double> weights);
  /// Rank-2 table from nested rows.
  static JointTable from_rows(const std::vector<std::vector<double>>& rows);
  /// Rank-1 table viewing a distribution.
  static JointTable from_dist(const ProbVec& p);

  std::size_t rank() const noexcept { return shape_.size(); }
  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::span<const double> flat() const noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  double at(std::span<const std::size_t> index) const;
  double at(std::initializer_list<std::size_t> index) const;
  std::size_t flat_index(std::span<const std::size_t> index) const;
  std::vector<std::size_t> unravel(std::size_t flat) const;

  /// Marginal over one axis.
  ProbVec marginal(std::size_t axis) const;
  /// Marginal table over `keep`, with axes in the order given. Axes must be
  /// distinct; an empty list yields a rank-0 table holding the value 1.
  JointTable marginal_table(std::span<const std::size_t> keep) const;
  JointTable marginal_table(std::initializer_list<std::size_t> keep) const;
  /// Same data with axes reordered: result axis k is source axis order[k].
  JointTable transpose(std::span<const std::size_t> order) const;

  friend bool operator==(const JointTable& a, const JointTable& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  JointTable() = default;
  void check_axis(std::size_t axis) const;

  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

/// p(other axes | given axis). Slices whose conditioning mass is zero are
/// flagged undefined and hold zeros.
struct ConditionalTable {
  std::vector<std::size_t> shape;
  std::size_t given_axis = 0;
  std::vector<double> values;
  std::vector<bool> defined;  // indexed by the given-axis value

  double at(std::span<const std::size_t> index) const;
  double at(std::initializer_list<std::size_t> index) const;
};

/// Returns p(other | given). Throws ArgumentError for an invalid axis.
ConditionalTable conditional(const JointTable& j, std::size_t given_axis);

/// t[i][j] = p_i * r_j.
JointTable product_dist(const ProbVec& p, const ProbVec& r);

/// Flat Dirichlet draw: normalized unit-exponential variates.
ProbVec random_dist(std::size_t m, Rng& rng);
/// Flat Dirichlet draw over all cells of `shape`.
JointTable random_joint(std::vector<std::size_t> shape, Rng& rng);
/// p(x,y,z) = p(x) p(y|x) p(z|y) with every factor flat-Dirichlet, so X and
/// Z are conditionally independent given Y.
JointTable random_markov_triple(std::array<std::size_t, 3> shape, Rng& rng);

}  // namespace qit
