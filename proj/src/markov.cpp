#include "qit/markov.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "qit/errors.hpp"
#include "qit/measures.hpp"

namespace qit {
namespace {

constexpr double kRowTolerance = 1e-12;

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
  const std::size_t m = rows.size();
  if (m == 0) throw ArgumentError("MarkovChain: needs at least one state");
  std::vector<double> r;
  r.reserve(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != m) throw ArgumentError("MarkovChain: transition matrix must be square");
    double total = 0.0;
    for (double x : rows[i]) {
      if (!std::isfinite(x) || x < 0.0) throw ArgumentError("MarkovChain: transition entries must be nonnegative");
      total += x;
    }
    if (std::abs(total - 1.0) > kRowTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << "MarkovChain: row " << i << " sums to " << total;
      throw ArgumentError(os.str());
    }
    r.insert(r.end(), rows[i].begin(), rows[i].end());
  }
  return r;
}

std::vector<double> step(const MarkovChain& c, std::span<const double> d) {
  const std::size_t m = c.states();
  std::vector<double> out(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (d[i] == 0.0) continue;
    for (std::size_t j = 0; j < m; ++j) out[j] += d[i] * c(i, j);
  }
  return out;
}

}  // namespace

MarkovChain::MarkovChain(std::vector<std::vector<double>> transition, ProbVec initial)
    : m_(transition.size()), r_(flatten(transition)), initial_(std::move(initial)) {
  if (initial_.size() != m_) throw ArgumentError("MarkovChain: initial distribution has wrong length");
}

std::vector<std::vector<double>> MarkovChain::rows() const {
  std::vector<std::vector<double>> out(m_);
  for (std::size_t i = 0; i < m_; ++i) {
    out[i].assign(r_.begin() + static_cast<std::ptrdiff_t>(i * m_),
                  r_.begin() + static_cast<std::ptrdiff_t>((i + 1) * m_));
  }
  return out;
}

bool MarkovChain::is_doubly_stochastic(double tol) const {
  for (std::size_t j = 0; j < m_; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < m_; ++i) total += r_[i * m_ + j];
    if (std::abs(total - 1.0) > tol) return false;
  }
  return true;
}

bool MarkovChain::is_irreducible() const {
  for (std::size_t start = 0; start < m_; ++start) {
    std::vector<bool> seen(m_, false);
    std::vector<std::size_t> stack{start};
    seen[start] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < m_; ++j) {
        if (r_[i * m_ + j] > 0.0 && !seen[j]) {
          seen[j] = true;
          ++count;
          stack.push_back(j);
        }
      }
    }
    if (count != m_) return false;
  }
  return true;
}

MarkovChain MarkovChain::with_initial(ProbVec initial) const {
  MarkovChain out = *this;
  if (initial.size() != m_) throw ArgumentError("MarkovChain: initial distribution has wrong length");
  out.initial_ = std::move(initial);
  return out;
}

ProbVec evolve(const MarkovChain& c, const ProbVec& d) {
  if (d.size() != c.states()) throw ArgumentError("evolve: dimension mismatch");
  return ProbVec::normalize(step(c, d.values()));
}

StationaryResult stationary(const MarkovChain& c, double tol, std::size_t max_iters) {
  const std::size_t m = c.states();
  std::vector<double> psi = c.initial().vector();
  auto l1_defect = [&](const std::vector<double>& v) {
    const std::vector<double> next = step(c, v);
    double d = 0.0;
    for (std::size_t i = 0; i < m; ++i) d += std::abs(next[i] - v[i]);
    return d;
  };
  for (std::size_t it = 0; it <= max_iters; ++it) {
    if (l1_defect(psi) <= tol) {
      return {ProbVec::normalize(psi), it, c.is_irreducible()};
    }
    if (it == max_iters) break;
    const std::vector<double> moved = step(c, psi);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      psi[i] = 0.5 * (psi[i] + moved[i]);
      total += psi[i];
    }
    for (double& x : psi) x /= total;
  }
  std::ostringstream os;
  os << "stationary: no convergence after " << max_iters << " iterations (L1 defect "
     << l1_defect(psi) << ")";
  throw ConvergenceError(os.str(), psi, {l1_defect(psi)});
}

JointTable block_table(const MarkovChain& c, std::size_t n) {
  if (n == 0) throw ArgumentError("block_table: n must be >= 1");
  const std::size_t m = c.states();
  std::size_t cells = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (cells > kMaxBlockCells / m) {
      std::ostringstream os;
      os << "block_table: " << m << "^" << n << " cells exceeds the budget of " << kMaxBlockCells;
      throw SizeError(os.str());
    }
    cells *= m;
  }
  std::vector<double> data = c.initial().vector();
  for (std::size_t len = 1; len < n; ++len) {
    std::vector<double> next;
    next.reserve(data.size() * m);
    for (std::size_t f = 0; f < data.size(); ++f) {
      const std::size_t last = f % m;
      for (std::size_t j = 0; j < m; ++j) next.push_back(data[f] * c(last, j));
    }
    data = std::move(next);
  }
  return JointTable::normalize(std::vector<std::size_t>(n, m), std::move(data));
}

EntropyRates entropy_rate_approximants(const MarkovChain& c, std::size_t n, QParam q) {
  const JointTable block = block_table(c, n);
  EntropyRates out{};
  out.block_rate = q_entropy_joint(block, q).value / static_cast<double>(n);
  std::vector<std::size_t> past;
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t current[] = {i};
    const double term = conditional_q_entropy(block, current, past, q);
    out.conditional_terms.push_back(term);
    sum += term;
    past.push_back(i);
  }
  out.cond_rate = sum / static_cast<double>(n);
  return out;
}

SecondLawReport second_law_report(const MarkovChain& c, QParam q, std::size_t steps) {
  require_q_in(q, kSubunitRange, "second_law_report");
  const std::size_t m = c.states();
  const double bracket = 1.0 + q.deformation() * ln_q(static_cast<double>(m), q);
  const double md = static_cast<double>(m);

  SecondLawReport report{c.is_doubly_stochastic(), {}};
  report.rows.reserve(steps);
  std::vector<double> psi = c.initial().vector();
  std::vector<double> ref(m, 1.0 / md);
  for (std::size_t n = 0; n < steps; ++n) {
    const std::vector<double> psi_next = step(c, psi);
    const std::vector<double> ref_next = step(c, ref);

    double t_q = 0.0;
    double t_stmt = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) {
        const double joint = psi[a] * c(a, b);
        if (!(joint > 0.0)) continue;
        // p(a|b) / s(a|b) with both reversed conditionals built from r(a,b).
        const double cond_ratio = psi[a] * ref_next[b] / (ref[a] * psi_next[b]);
        t_q += joint * ln_q(psi_next[b] / ref_next[b], q) * ln_q(cond_ratio, q);
        t_stmt += joint * ln_q(psi_next[b] * md, q) * ln_q(joint * md, q);
      }
    }
    t_q *= q.deformation();
    t_stmt *= q.deformation();

    SecondLawRow row{};
    row.step = n;
    row.h_q = q_entropy(ProbVec(psi), q).value;
    row.delta_h = q_entropy(ProbVec::normalize(psi_next), q).value - row.h_q;
    row.t_q = t_q;
    row.t_q_statement = t_stmt;
    row.lhs = row.delta_h * bracket;
    row.slack = row.lhs - row.t_q;
    row.relative_drop = relative_q_entropy(psi, ref, q) - relative_q_entropy(psi_next, ref_next, q);
    report.rows.push_back(row);

    psi = psi_next;
    ref = ref_next;
  }
  return report;
}

MarkovChain random_doubly_stochastic_chain(std::size_t m, Rng& rng) {
  if (m == 0) throw ArgumentError("random_doubly_stochastic_chain: m must be >= 1");
  const ProbVec weights = random_dist(m, rng);
  std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
  std::vector<std::size_t> perm(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = m; i-- > 1;) {
      std::swap(perm[i], perm[static_cast<std::size_t>(rng.uniform_int(0, i))]);
    }
    for (std::size_t i = 0; i < m; ++i) a[i][perm[i]] += weights[k];
  }
  std::vector<std::vector<double>> sym(m, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) sym[i][j] = 0.5 * (a[i][j] + a[j][i]);
  }
  ProbVec initial = random_dist(m, rng);
  return MarkovChain(std::move(sym), std::move(initial));
}

MarkovChain random_chain(std::size_t m, Rng& rng) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < m; ++i) rows.push_back(random_dist(m, rng).vector());
  ProbVec initial = random_dist(m, rng);
  return MarkovChain(std::move(rows), std::move(initial));
}

}  // namespace qit
