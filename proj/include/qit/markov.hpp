#pragma once

// Discrete-time Markov chains: distribution evolution, stationary
// distributions, entropy-rate approximants and the q-deformed second law.

#include <cstddef>
#include <vector>

#include "qit/prob.hpp"
#include "qit/qcore.hpp"
#include "qit/rng.hpp"

namespace qit {

/// Cells allowed in an exactly enumerated block table.
inline constexpr std::size_t kMaxBlockCells = std::size_t{1} << 16;

/// Row-stochastic transition matrix (entry (i, j) is P(i -> j)) plus an
/// initial distribution.
class MarkovChain {
 public:
  /// Rows must be square, nonnegative and sum to 1 within 1e-12.
  MarkovChain(std::vector<std::vector<double>> transition, ProbVec initial);

  std::size_t states() const noexcept { return m_; }
  double operator()(std::size_t from, std::size_t to) const { return r_[from * m_ + to]; }
  const ProbVec& initial() const noexcept { return initial_; }
  std::vector<std::vector<double>> rows() const;

  /// Columns also sum to 1 within `tol`, so the uniform law is stationary.
  bool is_doubly_stochastic(double tol = 1e-12) const;
  /// Every state reaches every other through positive transitions.
  bool is_irreducible() const;

  MarkovChain with_initial(ProbVec initial) const;

 private:
  std::size_t m_;
  std::vector<double> r_;
  ProbVec initial_;
};

/// d * r.
ProbVec evolve(const MarkovChain& c, const ProbVec& d);

struct StationaryResult {
  ProbVec distribution;
  std::size_t iterations;
  bool irreducible;
};

/// Power iteration on the half-lazy chain (I + r)/2, started at the chain's
/// initial distribution, until ||psi r - psi||_1 <= tol. Throws
/// ConvergenceError carrying the last iterate after max_iters.
StationaryResult stationary(const MarkovChain& c, double tol = 1e-12,
                            std::size_t max_iters = 1'000'000);

/// Exact law of (X_1, ..., X_n) started at the chain's initial distribution.
/// Throws SizeError past kMaxBlockCells.
JointTable block_table(const MarkovChain& c, std::size_t n);

struct EntropyRates {
  /// (1/n) H_q(X_1, ..., X_n).
  double block_rate;
  /// (1/n) sum_i H_q(X_i | X_{i-1}, ..., X_1).
  double cond_rate;
  /// H_q(X_i | X_{i-1}, ..., X_1) for i = 1..n.
  std::vector<double> conditional_terms;
};

EntropyRates entropy_rate_approximants(const MarkovChain& c, std::size_t n, QParam q);

struct SecondLawRow {
  std::size_t step;
  double h_q;        // H_q(psi_n)
  double delta_h;    // H_q(psi_{n+1}) - H_q(psi_n)
  double t_q;        // cross term against the reference trajectory
  double t_q_statement;  // cross term with ln_q[p(x_{n+1})m] ln_q[p(x_n,x_{n+1})m] factors
  double lhs;        // delta_h * [1 + (1-q) ln_q m]
  double slack;      // lhs - t_q
  double relative_drop;  // D_q(psi_n||s_n) - D_q(psi_{n+1}||s_{n+1})
};

struct SecondLawReport {
  /// False when the chain is not doubly stochastic; rows are still filled.
  bool applicable;
  std::vector<SecondLawRow> rows;
};

/// Evolves psi_n from the initial distribution alongside a reference
/// trajectory s_n started at uniform, for `steps` transitions. Requires
/// 0 <= q < 1.
SecondLawReport second_law_report(const MarkovChain& c, QParam q, std::size_t steps);

/// Symmetrized mixture of random permutation matrices with a random initial
/// distribution. Doubly stochastic by construction.
MarkovChain random_doubly_stochastic_chain(std::size_t m, Rng& rng);
/// Rows drawn flat-Dirichlet, random initial distribution.
MarkovChain random_chain(std::size_t m, Rng& rng);

}  // namespace qit
