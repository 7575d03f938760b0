#include "qit/smb.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "qit/errors.hpp"
#include "qit/format.hpp"
#include "qit/measures.hpp"

namespace qit {
namespace {

std::size_t sample_index(std::span<const double> weights, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) last_positive = i;
    acc += weights[i];
    if (u < acc) return i;
  }
  // u landed in the rounding gap above the cumulative sum.
  return last_positive;
}

double safe_log(double p) {
  if (!(p > 0.0)) throw ImpossibleTrajectoryError("trajectory uses a zero-probability step");
  return std::log(p);
}

const MarkovChain& chain_of(const Trajectory& t) {
  if (!t.chain) throw ArgumentError("trajectory has no generating chain");
  return *t.chain;
}

std::vector<double> row_of(const MarkovChain& c, std::size_t i) {
  std::vector<double> row(c.states());
  for (std::size_t j = 0; j < c.states(); ++j) row[j] = c(i, j);
  return row;
}

// Natural log of the empirical k-th order approximation on the trajectory.
double empirical_k_log_prob(const std::vector<std::size_t>& s, std::size_t k, std::size_t m) {
  const std::size_t n = s.size();
  auto window = [&](std::size_t start, std::size_t len) {
    std::uint64_t code = 0;
    for (std::size_t i = start; i < start + len; ++i) code = code * m + s[i];
    return code;
  };
  if (k == 0) {
    std::vector<double> counts(m, 0.0);
    for (std::size_t x : s) counts[x] += 1.0;
    double log_p = 0.0;
    for (std::size_t x : s) log_p += std::log(counts[x] / static_cast<double>(n));
    return log_p;
  }
  std::map<std::uint64_t, double> block_counts;
  for (std::size_t i = 0; i + k <= n; ++i) block_counts[window(i, k)] += 1.0;
  std::map<std::uint64_t, double> context_counts;
  std::map<std::pair<std::uint64_t, std::size_t>, double> transition_counts;
  for (std::size_t i = k; i < n; ++i) {
    const std::uint64_t ctx = window(i - k, k);
    context_counts[ctx] += 1.0;
    transition_counts[{ctx, s[i]}] += 1.0;
  }
  double log_p = std::log(block_counts[window(0, k)] / static_cast<double>(n - k + 1));
  for (std::size_t i = k; i < n; ++i) {
    const std::uint64_t ctx = window(i - k, k);
    log_p += std::log(transition_counts[{ctx, s[i]}] / context_counts[ctx]);
  }
  return log_p;
}

std::vector<std::size_t> probe_grid(std::size_t n_max) {
  std::vector<std::size_t> grid;
  for (std::size_t n = 1; n <= n_max; n *= 2) {
    grid.push_back(n);
    if (n > n_max / 2) break;
  }
  if (grid.back() != n_max) grid.push_back(n_max);
  return grid;
}

// Per-trajectory values at one grid point.
struct Sample {
  double block = 0.0;   // −ln_q p
  double pk = 0.0;      // −ln_q p_k
  double t3 = 0.0;
  bool c1 = false;
  bool c2 = false;
  double ratio1 = 0.0;
  double ratio2 = 0.0;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

Trajectory sample_trajectory(const MarkovChain& c, std::size_t n, Rng& rng) {
  if (n == 0) throw ArgumentError("sample_trajectory: n must be >= 1");
  Trajectory t;
  t.chain = std::make_shared<const MarkovChain>(c);
  t.seed = rng.seed();
  t.stream = rng.stream();
  t.symbols.reserve(n);
  t.symbols.push_back(sample_index(c.initial().values(), rng));
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < c.states(); ++i) rows.push_back(row_of(c, i));
  for (std::size_t i = 1; i < n; ++i) t.symbols.push_back(sample_index(rows[t.symbols.back()], rng));
  return t;
}

double block_log_prob(const Trajectory& t) {
  const MarkovChain& c = chain_of(t);
  if (t.symbols.empty()) throw ArgumentError("block_log_prob: empty trajectory");
  double log_p = safe_log(c.initial()[t.symbols[0]]);
  for (std::size_t i = 1; i < t.symbols.size(); ++i) log_p += safe_log(c(t.symbols[i - 1], t.symbols[i]));
  return log_p;
}

double block_log_prob_q(const Trajectory& t, QParam q) { return -ln_q_of_log(block_log_prob(t), q); }

double markov_k_block_log_prob(const Trajectory& t, std::size_t k, ConditionalSource source) {
  const MarkovChain& c = chain_of(t);
  const auto& s = t.symbols;
  if (s.size() < k || s.empty()) throw ArgumentError("markov_k_block_log_prob: need n >= k and n >= 1");
  if (source == ConditionalSource::kEmpirical) return empirical_k_log_prob(s, k, c.states());
  if (k == 0) {
    const ProbVec psi = stationary(c).distribution;
    double log_p = 0.0;
    for (std::size_t x : s) log_p += safe_log(psi[x]);
    return log_p;
  }
  // Order-1 source: p(X_0^{k-1}) and every order-k conditional reduce to the
  // initial law times one-step transitions, in the same summation order as
  // block_log_prob.
  double log_p = safe_log(c.initial()[s[0]]);
  for (std::size_t i = 1; i < s.size(); ++i) log_p += safe_log(c(s[i - 1], s[i]));
  return log_p;
}

double markov_k_block_log_prob_q(const Trajectory& t, std::size_t k, QParam q, ConditionalSource source) {
  return -ln_q_of_log(markov_k_block_log_prob(t, k, source), q);
}

double t3_residual(std::span<const double> conditional_probs, QParam q) {
  double log_prod = 0.0;
  double sum = 0.0;
  for (double p : conditional_probs) {
    if (!(p > 0.0) || p > 1.0) throw DomainError("t3_residual: entries must lie in (0, 1]");
    log_prod += std::log(p);
    sum += ln_q(p, q);
  }
  return ln_q_of_log(log_prod, q) - sum;
}

double h_q_k(const MarkovChain& c, std::size_t k, QParam q) {
  const MarkovChain stat = c.with_initial(stationary(c).distribution);
  if (k == 0) return q_entropy(stat.initial(), q).value;
  const JointTable block = block_table(stat, k + 1);
  std::vector<std::size_t> past(k);
  for (std::size_t i = 0; i < k; ++i) past[i] = i;
  const std::size_t present[] = {k};
  return conditional_q_entropy(block, present, past, q);
}

double h_q_inf(const MarkovChain& c, QParam q, double tol) {
  double current = h_q_k(c, 0, q);
  for (std::size_t k = 0;; ++k) {
    double next = 0.0;
    try {
      next = h_q_k(c, k + 1, q);
    } catch (const SizeError& e) {
      std::ostringstream os;
      os.precision(12);
      os << "h_q_inf: enumeration budget exceeded at k = " << k + 1 << " with H_{q," << k
         << "} = " << current << " still moving by more than " << tol << " (" << e.what() << ")";
      throw SizeError(os.str());
    }
    if (std::abs(current - next) <= tol) return current;
    current = next;
  }
}

SmbCurve smb_probe(const MarkovChain& c, QParam q, std::size_t n_max, std::size_t k,
                   std::size_t trajectories, std::uint64_t seed, unsigned workers) {
  if (n_max == 0) throw ArgumentError("smb_probe: n must be >= 1");
  if (trajectories == 0) throw ArgumentError("smb_probe: trajectories must be >= 1");
  const ProbVec psi = stationary(c).distribution;
  const MarkovChain chain = c.with_initial(psi);
  const std::size_t m = chain.states();

  SmbCurve curve{q.value(), k, trajectories, seed, h_q_k(chain, k, q), h_q_inf(chain, q), {}, 0, {}};
  curve.flags.q_outside_convergence_range = !(q.value() > 0.5 && q.value() < 1.0);
  const bool bounded = !q.is_shannon() && q.value() < 1.0;
  const double upper = bounded ? 1.0 / q.deformation() : std::numeric_limits<double>::infinity();

  const std::vector<std::size_t> grid = probe_grid(n_max);
  std::vector<std::vector<double>> log_rows(m, std::vector<double>(m));
  std::vector<std::vector<double>> rows(m);
  for (std::size_t i = 0; i < m; ++i) {
    rows[i] = row_of(chain, i);
    for (std::size_t j = 0; j < m; ++j) {
      log_rows[i][j] = chain(i, j) > 0.0 ? std::log(chain(i, j)) : -std::numeric_limits<double>::infinity();
    }
  }
  std::vector<double> log_psi(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_psi[i] = psi[i] > 0.0 ? std::log(psi[i]) : -std::numeric_limits<double>::infinity();
  }

  std::vector<std::vector<Sample>> samples(trajectories, std::vector<Sample>(grid.size()));
  std::vector<std::size_t> violations(trajectories, 0);

  auto run = [&](std::size_t j) {
    Rng rng(seed, j);
    // symbols[0] is X_{-1}; the block is symbols[1..n_max].
    std::vector<std::size_t> s;
    s.reserve(n_max + 1);
    s.push_back(sample_index(psi.values(), rng));
    for (std::size_t i = 0; i < n_max; ++i) s.push_back(sample_index(rows[s.back()], rng));

    const double log_first_given_past = log_rows[s[0]][s[1]];
    double log_block = 0.0;   // ln p(X_0^{i})
    double log_pk = 0.0;      // ln p_k(X_0^{i})
    double log_cond = 0.0;    // ln prod of the conditionals from index k on
    double sum_lnq = 0.0;     // sum of ln_q over the same conditionals
    std::size_t g = 0;
    for (std::size_t i = 0; i < n_max; ++i) {
      const std::size_t x = s[i + 1];
      const double step = i == 0 ? log_psi[x] : log_rows[s[i]][x];
      log_block += step;
      if (k == 0) {
        log_pk += log_psi[x];
        log_cond += log_psi[x];
        sum_lnq += ln_q(psi[x], q);
      } else {
        log_pk += step;
        if (i >= k) {
          log_cond += step;
          sum_lnq += ln_q(rows[s[i]][x], q);
        }
      }
      if (i + 1 != grid[g]) continue;

      Sample& out = samples[j][g];
      out.block = -ln_q_of_log(log_block, q);
      out.pk = -ln_q_of_log(log_pk, q);
      out.t3 = (k == 0 || i >= k) ? ln_q_of_log(log_cond, q) - sum_lnq : 0.0;
      out.c1 = log_first_given_past >= log_block;
      out.c2 = log_block >= log_pk;
      // p(X_0^{n-1} | X_{-1}) / p(X_0^{n-1}) = r(x_{-1}, x_0) / psi(x_0).
      out.ratio1 = std::exp(log_first_given_past - log_psi[s[1]]);
      out.ratio2 = std::exp(log_block - log_pk);
      if (!(out.block >= 0.0) || out.block > upper) ++violations[j];
      ++g;
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(trajectories)));
  if (workers == 1) {
    for (std::size_t j = 0; j < trajectories; ++j) run(j);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t j = w; j < trajectories; j += workers) run(j);
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

  for (std::size_t j = 0; j < trajectories; ++j) curve.bound_violations += violations[j];
  const double count = static_cast<double>(trajectories);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double n = static_cast<double>(grid[g]);
    std::vector<double> block(trajectories);
    SmbRecord rec{grid[g], 0, 0, std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(), 0, 0, 0, 0, 0, 0};
    std::vector<double> pk(trajectories), t3(trajectories), r1(trajectories), r2(trajectories);
    double c1 = 0.0, c2 = 0.0;
    for (std::size_t j = 0; j < trajectories; ++j) {
      const Sample& s = samples[j][g];
      block[j] = s.block / n;
      pk[j] = s.pk / n;
      t3[j] = s.t3 / n;
      r1[j] = s.ratio1;
      r2[j] = s.ratio2;
      c1 += s.c1 ? 1.0 : 0.0;
      c2 += s.c2 ? 1.0 : 0.0;
      rec.block_min = std::min(rec.block_min, s.block);
      rec.block_max = std::max(rec.block_max, s.block);
    }
    rec.block_mean = mean_of(block);
    double ss = 0.0;
    for (double b : block) ss += (b - rec.block_mean) * (b - rec.block_mean);
    rec.block_sd = trajectories > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    rec.pk_mean = mean_of(pk);
    rec.t3_over_n_mean = mean_of(t3);
    rec.cond_c1_rate = c1 / count;
    rec.cond_c2_rate = c2 / count;
    rec.ratio1_mean = mean_of(r1);
    rec.ratio2_mean = mean_of(r2);
    curve.records.push_back(rec);
  }

  const SmbRecord& first = curve.records.front();
  const SmbRecord& last = curve.records.back();
  curve.flags.t3_not_vanishing = std::abs(last.t3_over_n_mean) > 1e-2 * curve.h_q_inf + 1e-12;
  for (const auto& rec : curve.records) {
    curve.flags.c1_violated = curve.flags.c1_violated || rec.cond_c1_rate < 1.0;
    curve.flags.c2_violated = curve.flags.c2_violated || rec.cond_c2_rate < 1.0;
    if (!std::isfinite(rec.ratio1_mean) || !std::isfinite(rec.ratio2_mean)) curve.flags.ratio_unbounded = true;
  }
  if (last.ratio1_mean > 10.0 * first.ratio1_mean || last.ratio2_mean > 10.0 * first.ratio2_mean) {
    curve.flags.ratio_unbounded = true;
  }
  return curve;
}

std::string smb_csv_header() {
  return "n,block_mean,block_sd,pk_mean,t3_over_n_mean,cond_c1_rate,cond_c2_rate,ratio1_mean,"
         "ratio2_mean,h_q_k,h_q_inf";
}

std::string smb_csv_row(const SmbRecord& r, const SmbCurve& curve) {
  std::ostringstream os;
  os << r.n << ',' << format_sig10(r.block_mean) << ',' << format_sig10(r.block_sd) << ','
     << format_sig10(r.pk_mean) << ',' << format_sig10(r.t3_over_n_mean) << ','
     << format_sig10(r.cond_c1_rate) << ',' << format_sig10(r.cond_c2_rate) << ','
     << format_sig10(r.ratio1_mean) << ',' << format_sig10(r.ratio2_mean) << ','
     << format_sig10(curve.h_q_k) << ',' << format_sig10(curve.h_q_inf);
  return os.str();
}

}  // namespace qit
