#include "qit/prob.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qit/errors.hpp"

namespace qit {
namespace {

double checked_total(std::span<const double> v, const char* what) {
  double total = 0.0;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      std::ostringstream os;
      os << what << ": entries must be finite and nonnegative (got " << x << ")";
      throw ArgumentError(os.str());
    }
    total += x;
  }
  return total;
}

void check_normalized(std::span<const double> v, const char* what) {
  const double total = checked_total(v, what);
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": entries sum to " << total << ", not 1";
    throw ArgumentError(os.str());
  }
}

std::size_t shape_size(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t s : shape) {
    if (s == 0) throw ArgumentError("JointTable: every axis needs cardinality >= 1");
    n *= s;
  }
  return n;
}

}  // namespace

ProbVec::ProbVec(std::vector<double> p, std::vector<std::string> labels)
    : p_(std::move(p)), labels_(std::move(labels)) {
  if (p_.empty()) throw ArgumentError("ProbVec: needs at least one entry");
  if (!labels_.empty() && labels_.size() != p_.size()) {
    throw ArgumentError("ProbVec: label count does not match length");
  }
  check_normalized(p_, "ProbVec");
}

ProbVec ProbVec::normalize(std::vector<double> weights) {
  if (weights.empty()) throw ArgumentError("ProbVec::normalize: empty input");
  const double total = checked_total(weights, "ProbVec::normalize");
  if (!(total > 0.0)) throw ArgumentError("ProbVec::normalize: weights sum to zero");
  for (double& w : weights) w /= total;
  return ProbVec(std::move(weights));
}

ProbVec ProbVec::uniform(std::size_t m) {
  if (m == 0) throw ArgumentError("ProbVec::uniform: m must be >= 1");
  return ProbVec(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

ProbVec ProbVec::point(std::size_t m, std::size_t index) {
  if (index >= m) throw ArgumentError("ProbVec::point: index out of range");
  std::vector<double> p(m, 0.0);
  p[index] = 1.0;
  return ProbVec(std::move(p));
}

JointTable::JointTable(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (shape_size(shape_) != data_.size()) {
    throw ArgumentError("JointTable: data length does not match shape");
  }
  check_normalized(data_, "JointTable");
}

JointTable JointTable::normalize(std::vector<std::size_t> shape, std::vector<double> weights) {
  const double total = checked_total(weights, "JointTable::normalize");
  if (!(total > 0.0)) throw ArgumentError("JointTable::normalize: weights sum to zero");
  for (double& w : weights) w /= total;
  return JointTable(std::move(shape), std::move(weights));
}

JointTable JointTable::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw ArgumentError("JointTable: empty rows");
  const std::size_t cols = rows.front().size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& row : rows) {
    if (row.size() != cols) throw ArgumentError("JointTable: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return JointTable({rows.size(), cols}, std::move(data));
}

JointTable JointTable::from_dist(const ProbVec& p) { return JointTable({p.size()}, p.vector()); }

void JointTable::check_axis(std::size_t axis) const {
  if (axis >= rank()) {
    std::ostringstream os;
    os << "JointTable: axis " << axis << " invalid for rank " << rank();
    throw ArgumentError(os.str());
  }
}

std::size_t JointTable::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != rank()) throw ArgumentError("JointTable: index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < rank(); ++k) {
    if (index[k] >= shape_[k]) throw ArgumentError("JointTable: index out of range");
    flat = flat * shape_[k] + index[k];
  }
  return flat;
}

std::vector<std::size_t> JointTable::unravel(std::size_t flat) const {
  std::vector<std::size_t> index(rank());
  for (std::size_t k = rank(); k-- > 0;) {
    index[k] = flat % shape_[k];
    flat /= shape_[k];
  }
  return index;
}

double JointTable::at(std::span<const std::size_t> index) const { return data_[flat_index(index)]; }

double JointTable::at(std::initializer_list<std::size_t> index) const {
  return at(std::span<const std::size_t>(index.begin(), index.size()));
}

ProbVec JointTable::marginal(std::size_t axis) const {
  check_axis(axis);
  const std::size_t keep[] = {axis};
  return ProbVec(marginal_table(keep).data_);
}

JointTable JointTable::marginal_table(std::span<const std::size_t> keep) const {
  std::vector<bool> seen(rank(), false);
  std::vector<std::size_t> out_shape;
  for (std::size_t a : keep) {
    check_axis(a);
    if (seen[a]) throw ArgumentError("JointTable: repeated axis in marginal");
    seen[a] = true;
    out_shape.push_back(shape_[a]);
  }
  std::size_t out_size = 1;
  for (std::size_t s : out_shape) out_size *= s;

  // Stride of each kept source axis inside the output layout.
  std::vector<std::size_t> out_stride(rank(), 0);
  std::size_t stride = 1;
  for (std::size_t k = keep.size(); k-- > 0;) {
    out_stride[keep[k]] = stride;
    stride *= out_shape[k];
  }

  JointTable out;
  out.shape_ = std::move(out_shape);
  out.data_.assign(out_size, 0.0);
  std::vector<std::size_t> index(rank(), 0);
  for (std::size_t f = 0; f < data_.size(); ++f) {
    std::size_t o = 0;
    for (std::size_t k = 0; k < rank(); ++k) o += index[k] * out_stride[k];
    out.data_[o] += data_[f];
    for (std::size_t k = rank(); k-- > 0;) {
      if (++index[k] < shape_[k]) break;
      index[k] = 0;
    }
  }
  return out;
}

JointTable JointTable::marginal_table(std::initializer_list<std::size_t> keep) const {
  return marginal_table(std::span<const std::size_t>(keep.begin(), keep.size()));
}

JointTable JointTable::transpose(std::span<const std::size_t> order) const {
  if (order.size() != rank()) throw ArgumentError("JointTable::transpose: order must name every axis");
  return marginal_table(order);
}

double ConditionalTable::at(std::span<const std::size_t> index) const {
  if (index.size() != shape.size()) throw ArgumentError("ConditionalTable: index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (index[k] >= shape[k]) throw ArgumentError("ConditionalTable: index out of range");
    flat = flat * shape[k] + index[k];
  }
  return values[flat];
}

double ConditionalTable::at(std::initializer_list<std::size_t> index) const {
  return at(std::span<const std::size_t>(index.begin(), index.size()));
}

ConditionalTable conditional(const JointTable& j, std::size_t given_axis) {
  const ProbVec given = j.marginal(given_axis);
  ConditionalTable out;
  out.shape = j.shape();
  out.given_axis = given_axis;
  out.values.assign(j.size(), 0.0);
  out.defined.resize(given.size());
  for (std::size_t g = 0; g < given.size(); ++g) out.defined[g] = given[g] > 0.0;
  for (std::size_t f = 0; f < j.size(); ++f) {
    const std::size_t g = j.unravel(f)[given_axis];
    if (out.defined[g]) out.values[f] = j.flat()[f] / given[g];
  }
  return out;
}

JointTable product_dist(const ProbVec& p, const ProbVec& r) {
  std::vector<double> data;
  data.reserve(p.size() * r.size());
  for (double a : p.values()) {
    for (double b : r.values()) data.push_back(a * b);
  }
  return JointTable({p.size(), r.size()}, std::move(data));
}

ProbVec random_dist(std::size_t m, Rng& rng) {
  if (m == 0) throw ArgumentError("random_dist: m must be >= 1");
  std::vector<double> w(m);
  for (double& x : w) x = rng.exponential();
  return ProbVec::normalize(std::move(w));
}

JointTable random_joint(std::vector<std::size_t> shape, Rng& rng) {
  const std::size_t n = shape_size(shape);
  std::vector<double> w(n);
  for (double& x : w) x = rng.exponential();
  return JointTable::normalize(std::move(shape), std::move(w));
}

JointTable random_markov_triple(std::array<std::size_t, 3> shape, Rng& rng) {
  const auto [nx, ny, nz] = shape;
  const ProbVec px = random_dist(nx, rng);
  std::vector<ProbVec> y_given_x;
  for (std::size_t x = 0; x < nx; ++x) y_given_x.push_back(random_dist(ny, rng));
  std::vector<ProbVec> z_given_y;
  for (std::size_t y = 0; y < ny; ++y) z_given_y.push_back(random_dist(nz, rng));

  std::vector<double> data;
  data.reserve(nx * ny * nz);
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) {
      for (std::size_t z = 0; z < nz; ++z) {
        data.push_back(px[x] * y_given_x[x][y] * z_given_y[y][z]);
      }
    }
  }
  return JointTable({nx, ny, nz}, std::move(data));
}

}  // namespace qit
