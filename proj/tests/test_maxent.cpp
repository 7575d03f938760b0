#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "oracle.hpp"
#include "qit/errors.hpp"
#include "qit/maxent.hpp"
#include "qit/measures.hpp"
#include "qit/rng.hpp"

using qit::MaxEntProblem;
using qit::QParam;

namespace {

// Levels {0,1,2}, mean e: feasible p = (1 - e + t, e - 2t, t) for t in
// [max(0, e - 1), e / 2]. Golden-section search on the concave H_q.
std::vector<double> three_level_oracle(double e, double q) {
  auto point = [&](double t) { return std::vector<double>{1.0 - e + t, e - 2.0 * t, t}; };
  double a = std::max(0.0, e - 1.0), b = e / 2.0;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (oracle::hq(point(c), q) > oracle::hq(point(d), q)) b = d; else a = c;
  }
  return point(0.5 * (a + b));
}

void check_constraints(const qit::MaxEntSolution& s, const MaxEntProblem& pr) {
  double total = 0.0, mean = 0.0;
  for (std::size_t i = 0; i < s.p.size(); ++i) {
    total += s.p[i];
    mean += s.p[i] * pr.levels[i];
  }
  CHECK(std::abs(total - 1.0) <= 1e-10);
  CHECK(std::abs(mean - pr.target_mean) <= 1e-10);
  CHECK(std::abs(s.normalization_residual) <= 1e-10);
  CHECK(std::abs(s.mean_residual) <= 1e-10);
}

}  // namespace

TEST_CASE("problem validation") {
  CHECK_THROWS_AS((MaxEntProblem{{0.0, 1.0}, 1.5, QParam(0.5)}.validate()), qit::ArgumentError);
  CHECK_THROWS_AS((MaxEntProblem{{1.0, 1.0}, 1.0, QParam(0.5)}.validate()), qit::ArgumentError);
  CHECK_THROWS_AS((MaxEntProblem{{0.0, 1.0}, 0.5, QParam(2.0)}.validate()), qit::ArgumentError);
  CHECK_THROWS_AS((MaxEntProblem{{0.0, std::nan("")}, 0.5, QParam(0.5)}.validate()), qit::ArgumentError);
  CHECK_THROWS_AS(qit::solve({{0.0, 1.0}, -0.5, QParam(0.5)}), qit::ArgumentError);
}

TEST_CASE("two levels are fully determined") {
  const MaxEntProblem pr{{0.0, 1.0}, 0.5, QParam(0.5)};
  const auto s = qit::solve(pr);
  CHECK(s.p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.p[1] == doctest::Approx(0.5).epsilon(1e-12));
  qit::Rng rng(1);
  const auto rep = qit::verify_optimality(s, pr, 100, rng);
  CHECK(std::abs(rep.min_gap) <= 1e-12);
}

TEST_CASE("three levels against the golden-section oracle") {
  for (double q : {0.0, 0.3, 0.5, 0.9, 1.2, 1.8}) {
    for (double e : {0.2, 0.5, 1.0, 1.4, 1.9}) {
      const MaxEntProblem pr{{0.0, 1.0, 2.0}, e, QParam(q)};
      const auto s = qit::solve(pr);
      check_constraints(s, pr);
      const auto ref = three_level_oracle(e, q);
      for (std::size_t i = 0; i < 3; ++i) CHECK(s.p[i] == doctest::Approx(ref[i]).epsilon(1e-7).scale(1.0));
    }
  }
  const auto s = qit::solve({{0.0, 1.0, 2.0}, 0.5, QParam(0.5)});
  CHECK(s.p[0] == doctest::Approx(0.6007858821).epsilon(1e-9));
  CHECK(s.p[1] == doctest::Approx(0.2984282358).epsilon(1e-9));
  CHECK(s.p[2] == doctest::Approx(0.1007858821).epsilon(1e-9));
}

TEST_CASE("q-exponential form and stationarity") {
  qit::Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = 2 + rng.uniform_int(0, 5);
    std::vector<double> levels(m);
    for (auto& x : levels) x = rng.uniform(-3.0, 3.0);
    const auto [lo, hi] = std::minmax_element(levels.begin(), levels.end());
    const double e = *lo + (*hi - *lo) * rng.uniform(0.05, 0.95);
    const double q = rng.uniform(0.0, 1.95);
    const MaxEntProblem pr{levels, e, QParam(q)};
    const auto s = qit::solve(pr);
    check_constraints(s, pr);
    CHECK(qit::stationarity_defect(s, pr) <= 1e-8);
    for (std::size_t k = 0; k < m; ++k) {
      if (!(s.p[k] > 0.0)) continue;
      const double base = 1.0 + (1.0 - q) * (-s.lambda - s.mu * levels[k]) / (2.0 - q);
      CHECK(std::pow(base, 1.0 / (1.0 - q)) == doctest::Approx(s.p[k]).epsilon(1e-10).scale(1.0));
      // [1 - (2-q) p^{1-q}]/(1-q) = (lambda - 1) + mu e_k
      const double lhs = (1.0 - (2.0 - q) * std::pow(s.p[k], 1.0 - q)) / (1.0 - q);
      CHECK(lhs == doctest::Approx(s.lambda - 1.0 + s.mu * levels[k]).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("symmetric targets give the uniform law") {
  for (double q : {0.2, 0.5, 1.0, 1.5}) {
    const auto s = qit::solve({{0.0, 1.0, 2.0}, 1.0, QParam(q)});
    for (std::size_t i = 0; i < 3; ++i) CHECK(s.p[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
    CHECK(std::abs(s.mu) <= 1e-10);
    CHECK(s.lambda == doctest::Approx(-(2.0 - q) * oracle::lnq(1.0 / 3.0, q)).epsilon(1e-10));
    const auto t = qit::solve({{-2.0, -1.0, 1.0, 2.0}, 0.0, QParam(q)});
    for (std::size_t i = 0; i < 4; ++i) CHECK(t.p[i] == doctest::Approx(0.25).epsilon(1e-10));
    CHECK(std::abs(t.mu) <= 1e-10);
  }
}

TEST_CASE("Shannon limit matches the Gibbs law") {
  const std::vector<double> levels{0.0, 0.7, 1.5, 3.0};
  for (double e : {0.4, 1.2, 2.1}) {
    const auto g = oracle::gibbs(levels, e);
    for (double q : {1.0 - 1e-4, 1.0, 1.0 + 1e-4}) {
      const auto s = qit::solve({levels, e, QParam(q)});
      for (std::size_t i = 0; i < levels.size(); ++i) CHECK(std::abs(s.p[i] - g[i]) <= 1e-3);
    }
    const auto exact = qit::solve({levels, e, QParam(1.0)});
    for (std::size_t i = 0; i < levels.size(); ++i) CHECK(exact.p[i] == doctest::Approx(g[i]).epsilon(1e-9));
  }
}

TEST_CASE("mu decreases as the target mean rises") {
  for (double q : {0.3, 0.8, 1.4}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 10; ++i) {
      const double e = 2.0 * i / 11.0;
      const auto s = qit::solve({{0.0, 0.5, 2.0}, e, QParam(q)});
      CHECK(s.mu <= prev + 1e-12);
      prev = s.mu;
    }
  }
}

TEST_CASE("boundary targets are point masses") {
  const auto lo = qit::solve({{0.0, 1.0, 2.0}, 0.0, QParam(0.5)});
  CHECK(lo.degenerate);
  CHECK(lo.p[0] == 1.0);
  CHECK(std::isinf(lo.mu));
  CHECK(std::isnan(lo.lambda));
  const auto hi = qit::solve({{0.0, 2.0, 1.0, 2.0}, 2.0, QParam(1.5)});
  CHECK(hi.degenerate);
  CHECK(hi.p[1] + hi.p[3] == doctest::Approx(1.0));
  CHECK(hi.p[0] == 0.0);
}

TEST_CASE("cutoff solutions keep zero cells") {
  // q = 0: the q-exponential support ends before the top level
  const MaxEntProblem pr{{0.0, 1.0, 2.0, 3.0}, 0.3, QParam(0.0)};
  const auto s = qit::solve(pr);
  check_constraints(s, pr);
  CHECK(s.p[3] == 0.0);
  qit::Rng rng(3);
  const auto rep = qit::verify_optimality(s, pr, 1000, rng);
  CHECK(rep.min_gap >= -1e-9);
}

TEST_CASE("verify_optimality") {
  const MaxEntProblem pr{{0.0, 1.0, 2.0}, 0.5, QParam(0.5)};
  const auto s = qit::solve(pr);
  qit::Rng rng(4);
  const auto rep = qit::verify_optimality(s, pr, 1000, rng);
  CHECK(rep.samples == 1000);
  CHECK(rep.min_gap >= -1e-9);
  CHECK(rep.max_formula_deviation <= 1e-10);
  CHECK(rep.sign_mismatches == 0);
  qit::Rng a(5), b(5);
  const auto r1 = qit::verify_optimality(s, pr, 50, a);
  const auto r2 = qit::verify_optimality(s, pr, 50, b);
  CHECK(r1.min_gap == r2.min_gap);
}

TEST_CASE("iteration cap") {
  CHECK_THROWS_AS(qit::solve({{0.0, 1.0, 2.0, 5.0}, 0.3, QParam(0.5)}, 1e-10, 1), qit::ConvergenceError);
}
