#pragma once

// Maximum q-entropy distribution under normalization and a mean-energy
// constraint. The maximizer has the q-exponential form
//
//   p_i = exp_q((-lambda - mu * e_i) / (2 - q))
//
// and (lambda, mu) solve sum p_i = 1, sum p_i e_i = target.

#include <cstddef>
#include <vector>

#include "qit/prob.hpp"
#include "qit/qcore.hpp"
#include "qit/rng.hpp"

namespace qit {

struct MaxEntProblem {
  std::vector<double> levels;
  double target_mean;
  QParam q;

  /// Throws ArgumentError unless levels are finite with >= 2 distinct values,
  /// min <= target <= max, and q < 2.
  void validate() const;
};

struct MaxEntSolution {
  ProbVec p;
  double lambda;
  double mu;
  double normalization_residual;
  double mean_residual;
  std::size_t iterations;
  /// Target on the edge of the feasible interval: p is supported on the
  /// extreme levels and the multipliers diverge (mu = +-inf, lambda = NaN).
  bool degenerate = false;
};

/// Damped Newton iteration on (lambda, mu) starting from mu = 0 and
/// lambda = -(2-q) ln_q(1/m). For q < 1, levels whose q-exponential argument
/// passes the cutoff get p_i = 0. Throws ConvergenceError with the last
/// iterate when ||F||_inf > tol after max_iters.
MaxEntSolution solve(const MaxEntProblem& problem, double tol = 1e-10, std::size_t max_iters = 200);

/// The stationarity defect max_i |[1 - (2-q) p_i^{1-q}]/(1-q) - (lambda - 1) - mu e_i|
/// over the support of p.
double stationarity_defect(const MaxEntSolution& sol, const MaxEntProblem& problem);

struct OptimalityReport {
  /// min over samples of H_q(p) - H_q(f).
  double min_gap;
  /// min over samples of sum p_i^{1-q} f_i ln_q(f_i/p_i).
  double min_formula;
  /// max over samples of |gap - formula|.
  double max_formula_deviation;
  /// Samples where gap and formula disagree in sign beyond 1e-12.
  std::size_t sign_mismatches;
  std::size_t samples;
};

/// Draws `trials` feasible distributions f (flat Dirichlet, orthogonally
/// projected onto both constraint planes, negatives rejected) and compares
/// their q-entropy against the solution. Throws SamplingError when 1000
/// consecutive projections are rejected.
OptimalityReport verify_optimality(const MaxEntSolution& sol, const MaxEntProblem& problem,
                                   std::size_t trials, Rng& rng);

}  // namespace qit
