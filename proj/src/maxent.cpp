#include "qit/maxent.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "qit/errors.hpp"
#include "qit/measures.hpp"

namespace qit {
namespace {

constexpr int kMaxHalvings = 60;
constexpr std::size_t kMaxProjectionRetries = 1000;

// Model state at (lambda, mu) over levels rescaled to [0, 1].
struct Eval {
  bool in_domain = true;
  std::vector<double> p;
  std::array<double, 2> f{};
  std::array<double, 4> jac{};  // row-major 2x2

  double norm_inf() const { return std::max(std::abs(f[0]), std::abs(f[1])); }
  // Residuals in the caller's units: with e = lo + span * x the mean
  // residual is span * f[1] + lo * f[0].
  double original_norm(double lo, double span) const {
    return std::max(std::abs(f[0]), std::abs(span * f[1] + lo * f[0]));
  }
};

Eval evaluate(double lambda, double mu, const std::vector<double>& levels, double target,
              QParam q) {
  const double width = 2.0 - q.value();
  Eval e;
  e.p.resize(levels.size());
  double s0 = 0.0, s1 = 0.0, w0 = 0.0, w1 = 0.0, w2 = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double a = (-lambda - mu * levels[i]) / width;
    double p = 0.0;
    try {
      p = exp_q_cutoff(a, q);
    } catch (const ExpQDomainError&) {
      e.in_domain = false;
      return e;
    }
    if (!std::isfinite(p)) {
      e.in_domain = false;
      return e;
    }
    e.p[i] = p;
    // d exp_q(a)/da = exp_q(a)^q.
    const double w = p > 0.0 ? (q.is_shannon() ? p : std::pow(p, q.value())) : 0.0;
    s0 += p;
    s1 += p * levels[i];
    w0 += w;
    w1 += w * levels[i];
    w2 += w * levels[i] * levels[i];
  }
  e.f = {s0 - 1.0, s1 - target};
  e.jac = {-w0 / width, -w1 / width, -w1 / width, -w2 / width};
  return e;
}

// Newton direction; falls back to moving lambda alone when the Jacobian is
// singular (support on a single level).
std::array<double, 2> newton_direction(const Eval& e) {
  const auto& j = e.jac;
  const double det = j[0] * j[3] - j[1] * j[2];
  const double scale = std::abs(j[0] * j[3]) + std::abs(j[1] * j[2]);
  if (scale > 0.0 && std::abs(det) > 1e-14 * scale) {
    return {(-e.f[0] * j[3] + e.f[1] * j[1]) / det, (-e.f[1] * j[0] + e.f[0] * j[2]) / det};
  }
  if (j[0] != 0.0) return {-e.f[0] / j[0], 0.0};
  // Everything cut off: lowering lambda raises every p_i.
  return {-1.0, 0.0};
}

}  // namespace

void MaxEntProblem::validate() const {
  if (levels.size() < 2) throw ArgumentError("maxent: need at least two levels");
  for (double e : levels) {
    if (!std::isfinite(e)) throw ArgumentError("maxent: levels must be finite");
  }
  const auto [lo, hi] = std::minmax_element(levels.begin(), levels.end());
  if (*lo == *hi) throw ArgumentError("maxent: need at least two distinct levels");
  if (!std::isfinite(target_mean) || target_mean < *lo || target_mean > *hi) {
    std::ostringstream os;
    os << "maxent: target mean " << target_mean << " outside the feasible interval [" << *lo
       << ", " << *hi << "]";
    throw ArgumentError(os.str());
  }
  if (!(q.value() < 2.0)) throw ArgumentError("maxent: q must be < 2");
}

MaxEntSolution solve(const MaxEntProblem& problem, double tol, std::size_t max_iters) {
  problem.validate();
  const QParam q = problem.q;
  const std::size_t m = problem.levels.size();
  const auto [lo_it, hi_it] = std::minmax_element(problem.levels.begin(), problem.levels.end());
  const double lo = *lo_it;
  const double span = *hi_it - lo;

  if (problem.target_mean == lo || problem.target_mean == *hi_it) {
    std::vector<double> w(m);
    for (std::size_t i = 0; i < m; ++i) w[i] = problem.levels[i] == problem.target_mean ? 1.0 : 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    return {ProbVec::normalize(std::move(w)), std::numeric_limits<double>::quiet_NaN(),
            problem.target_mean == lo ? inf : -inf, 0.0, 0.0, 0, true};
  }

  // Solve on levels rescaled to [0, 1]; (lambda', mu') map back as
  // mu = mu'/span, lambda = lambda' - mu * lo.
  std::vector<double> scaled(m);
  for (std::size_t i = 0; i < m; ++i) scaled[i] = (problem.levels[i] - lo) / span;
  const double target = (problem.target_mean - lo) / span;

  double lambda = -(2.0 - q.value()) * ln_q(1.0 / static_cast<double>(m), q);
  double mu = 0.0;
  Eval cur = evaluate(lambda, mu, scaled, target, q);
  std::size_t it = 0;
  for (; !(cur.original_norm(lo, span) <= tol); ++it) {
    if (it == max_iters) {
      std::ostringstream os;
      os << "maxent: no convergence after " << max_iters << " Newton iterations (residual "
         << cur.original_norm(lo, span) << ")";
      throw ConvergenceError(os.str(), cur.p, {cur.f[0], cur.f[1]});
    }
    const auto dir = newton_direction(cur);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= kMaxHalvings; ++h, t *= 0.5) {
      Eval trial = evaluate(lambda + t * dir[0], mu + t * dir[1], scaled, target, q);
      if (trial.in_domain && trial.norm_inf() < cur.norm_inf()) {
        lambda += t * dir[0];
        mu += t * dir[1];
        cur = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      std::ostringstream os;
      os << "maxent: line search stalled at residual " << cur.original_norm(lo, span);
      throw ConvergenceError(os.str(), cur.p, {cur.f[0], cur.f[1]});
    }
  }

  // Two more full Newton steps while they still help; quadratic convergence
  // puts the iterate at rounding level, so normalizing p below is harmless.
  for (int polish = 0; polish < 2 && cur.norm_inf() > 0.0; ++polish) {
    const auto dir = newton_direction(cur);
    Eval trial = evaluate(lambda + dir[0], mu + dir[1], scaled, target, q);
    if (!trial.in_domain || !(trial.norm_inf() < cur.norm_inf())) break;
    lambda += dir[0];
    mu += dir[1];
    cur = std::move(trial);
  }

  MaxEntSolution sol{ProbVec::normalize(cur.p), 0.0, 0.0, 0.0, 0.0, it, false};
  sol.mu = mu / span;
  sol.lambda = lambda - sol.mu * lo;
  // Residuals of the returned p.
  double s0 = 0.0, s1 = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    s0 += sol.p[i];
    s1 += sol.p[i] * problem.levels[i];
  }
  sol.normalization_residual = s0 - 1.0;
  sol.mean_residual = s1 - problem.target_mean;
  return sol;
}

double stationarity_defect(const MaxEntSolution& sol, const MaxEntProblem& problem) {
  const QParam q = problem.q;
  double worst = 0.0;
  for (std::size_t i = 0; i < problem.levels.size(); ++i) {
    const double p = sol.p[i];
    if (!(p > 0.0)) continue;
    // Derivative of -p ln_q p.
    const double lhs = q.is_shannon() ? -std::log(p) - 1.0
                                      : (1.0 - (2.0 - q.value()) * std::pow(p, q.deformation())) /
                                            q.deformation();
    worst = std::max(worst, std::abs(lhs - (sol.lambda - 1.0) - sol.mu * problem.levels[i]));
  }
  return worst;
}

OptimalityReport verify_optimality(const MaxEntSolution& sol, const MaxEntProblem& problem,
                                   std::size_t trials, Rng& rng) {
  problem.validate();
  const QParam q = problem.q;
  const auto& e = problem.levels;
  const std::size_t m = e.size();
  double s1 = 0.0, s2 = 0.0;
  for (double x : e) {
    s1 += x;
    s2 += x * x;
  }
  const double md = static_cast<double>(m);
  const double det = md * s2 - s1 * s1;
  const double h_p = q_entropy(sol.p, q).value;

  OptimalityReport report{std::numeric_limits<double>::infinity(),
                          std::numeric_limits<double>::infinity(), 0.0, 0, trials};
  std::vector<double> f(m);
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t retries = 0;
    for (;; ++retries) {
      if (retries == kMaxProjectionRetries) {
        throw SamplingError("verify_optimality: feasible projection rejected 1000 times in a row");
      }
      const ProbVec d = random_dist(m, rng);
      double a0 = -1.0, a1 = -problem.target_mean;
      for (std::size_t i = 0; i < m; ++i) {
        a0 += d[i];
        a1 += d[i] * e[i];
      }
      // Orthogonal projection onto {sum f = 1, sum f e = target}.
      const double c0 = (s2 * a0 - s1 * a1) / det;
      const double c1 = (md * a1 - s1 * a0) / det;
      bool ok = true;
      for (std::size_t i = 0; i < m; ++i) {
        f[i] = d[i] - c0 - c1 * e[i];
        if (f[i] < -1e-12) {
          ok = false;
          break;
        }
        f[i] = std::max(f[i], 0.0);
      }
      if (ok) break;
    }

    double h_f = 0.0;
    double formula = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!(f[i] > 0.0)) continue;
      h_f -= f[i] * ln_q(f[i], q);
      const double p = sol.p[i];
      if (p > 0.0) {
        formula += (1.0 + q.deformation() * ln_q(p, q)) * f[i] * ln_q(f[i] / p, q);
      } else if (!q.is_shannon() && q.value() < 1.0) {
        formula += std::pow(f[i], 2.0 - q.value()) / q.deformation();
      } else {
        formula = std::numeric_limits<double>::infinity();
      }
    }
    const double gap = h_p - h_f;
    report.min_gap = std::min(report.min_gap, gap);
    report.min_formula = std::min(report.min_formula, formula);
    report.max_formula_deviation = std::max(report.max_formula_deviation, std::abs(gap - formula));
    if (gap * formula < 0.0 && std::max(std::abs(gap), std::abs(formula)) > 1e-12) {
      ++report.sign_mismatches;
    }
  }
  return report;
}

}  // namespace qit
