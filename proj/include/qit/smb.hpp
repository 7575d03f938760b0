#pragma once

// Empirical probe of the q-deformed Shannon-McMillan-Breiman behaviour on
// Markov sources: exact block probabilities along sampled trajectories,
// k-th order Markov approximations, the aggregate interaction residual T3,
// and the order-k conditional entropies H_{q,k} and their limit H_{q,inf}.
//
// Block probabilities are carried as natural logs. −ln_q p is recovered
// with one expm1, so long blocks never underflow to p = 0.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "qit/markov.hpp"
#include "qit/qcore.hpp"
#include "qit/rng.hpp"

namespace qit {

struct Trajectory {
  std::vector<std::size_t> symbols;
  std::shared_ptr<const MarkovChain> chain;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

/// Ancestral sampling of n symbols starting from the chain's initial
/// distribution.
Trajectory sample_trajectory(const MarkovChain& c, std::size_t n, Rng& rng);

/// Natural log of p(X_0..X_{n-1}) under the generating chain. Throws
/// ImpossibleTrajectoryError on a zero-probability step.
double block_log_prob(const Trajectory& t);

/// −ln_q p(X_0..X_{n-1}).
double block_log_prob_q(const Trajectory& t, QParam q);

enum class ConditionalSource {
  /// Conditionals of the generating chain (exact for order-1 sources).
  kTrueChain,
  /// Frequencies counted on the trajectory itself.
  kEmpirical,
};

/// Natural log of the k-th order approximation
/// p_k = p(X_0..X_{k-1}) * prod_{i>=k} p(X_i | X_{i-k}..X_{i-1}).
/// k = 0 is the product of stationary marginals. Requires n >= k.
double markov_k_block_log_prob(const Trajectory& t, std::size_t k,
                               ConditionalSource source = ConditionalSource::kTrueChain);

/// −ln_q p_k(X_0..X_{n-1}).
double markov_k_block_log_prob_q(const Trajectory& t, std::size_t k, QParam q,
                                 ConditionalSource source = ConditionalSource::kTrueChain);

/// ln_q(prod p_i) - sum ln_q(p_i): every interaction term of order >= 2.
/// Entries must lie in (0, 1].
double t3_residual(std::span<const double> conditional_probs, QParam q);

/// H_q(X_0 | X_{-1}, ..., X_{-k}) for the chain started at its stationary
/// distribution, by exact enumeration. Throws SizeError past the budget.
double h_q_k(const MarkovChain& c, std::size_t k, QParam q);

/// h_q_k at the smallest k with |h_q_k(k) - h_q_k(k+1)| <= tol.
double h_q_inf(const MarkovChain& c, QParam q, double tol = 1e-12);

struct SmbRecord {
  std::size_t n;
  double block_mean;      // mean of −(1/n) ln_q p(X_0^{n-1})
  double block_sd;
  double block_min;       // extremes of −ln_q p (not divided by n)
  double block_max;
  double pk_mean;         // mean of −(1/n) ln_q p_k(X_0^{n-1})
  double t3_over_n_mean;
  double cond_c1_rate;    // share with p(X_0 | past) >= p(X_0^{n-1})
  double cond_c2_rate;    // share with p(X_0^{n-1}) >= p_k(X_0^{n-1})
  double ratio1_mean;     // E[p(X_0^{n-1} | X_{-1}) / p(X_0^{n-1})]
  double ratio2_mean;     // E[p(X_0^{n-1}) / p_k(X_0^{n-1})]
};

struct SmbFlags {
  bool q_outside_convergence_range = false;  // not 1/2 < q < 1
  bool t3_not_vanishing = false;         // |T3/n| at the largest n above 1% of H_{q,inf}
  bool c1_violated = false;
  bool c2_violated = false;
  bool ratio_unbounded = false;          // a ratio mean is non-finite or grew 10x over the grid
};

struct SmbCurve {
  double q;
  std::size_t k;
  std::size_t trajectories;
  std::uint64_t seed;
  double h_q_k;
  double h_q_inf;
  std::vector<SmbRecord> records;
  /// Blocks with −ln_q p outside [0, 1/(1-q)] (upper bound only for q < 1).
  std::size_t bound_violations = 0;
  SmbFlags flags;
};

/// Samples `trajectories` stationary runs of length n_max (plus one symbol of
/// past) and summarizes them at n = 1, 2, 4, ..., 2^floor(log2 n_max), and
/// n_max itself. Trajectory j uses sub-stream j of `seed`, so the curve does
/// not depend on `workers`.
SmbCurve smb_probe(const MarkovChain& c, QParam q, std::size_t n_max, std::size_t k,
                   std::size_t trajectories, std::uint64_t seed, unsigned workers = 1);

std::string smb_csv_header();
std::string smb_csv_row(const SmbRecord& record, const SmbCurve& curve);

}  // namespace qit
