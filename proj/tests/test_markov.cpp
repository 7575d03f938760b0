#include <doctest.h>

#include <cmath>

#include "oracle.hpp"
#include "qit/errors.hpp"
#include "qit/markov.hpp"
#include "qit/measures.hpp"
#include "qit/rng.hpp"

using qit::MarkovChain;
using qit::ProbVec;
using qit::QParam;

namespace {
const std::vector<std::vector<double>> kFlip{{0.9, 0.1}, {0.1, 0.9}};
}

TEST_CASE("MarkovChain validation") {
  CHECK_THROWS_AS(MarkovChain({{0.9, 0.2}, {0.1, 0.9}}, ProbVec::uniform(2)), qit::ArgumentError);
  CHECK_THROWS_AS(MarkovChain({{1.0}, {1.0}}, ProbVec::uniform(2)), qit::ArgumentError);
  CHECK_THROWS_AS(MarkovChain(kFlip, ProbVec::uniform(3)), qit::ArgumentError);
  CHECK_THROWS_AS(MarkovChain({{1.1, -0.1}, {0.5, 0.5}}, ProbVec::uniform(2)), qit::ArgumentError);
  const MarkovChain c(kFlip, ProbVec({1.0, 0.0}));
  CHECK(c.states() == 2);
  CHECK(c(0, 1) == 0.1);
  CHECK(c.is_doubly_stochastic());
  CHECK(c.is_irreducible());
  CHECK_FALSE(MarkovChain({{0.5, 0.5}, {0.25, 0.75}}, ProbVec::uniform(2)).is_doubly_stochastic());
  CHECK_FALSE(MarkovChain({{1.0, 0.0}, {0.0, 1.0}}, ProbVec::uniform(2)).is_irreducible());
}

TEST_CASE("evolve examples") {
  const ProbVec d({0.3, 0.7});
  const MarkovChain id({{1.0, 0.0}, {0.0, 1.0}}, d);
  CHECK(qit::evolve(id, d) == d);
  const ProbVec e = qit::evolve(MarkovChain(kFlip, d), ProbVec({1.0, 0.0}));
  CHECK(e[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(0.1).epsilon(1e-15));
  qit::Rng rng(1);
  const MarkovChain ds = qit::random_doubly_stochastic_chain(5, rng);
  const ProbVec u = qit::evolve(ds, ProbVec::uniform(5));
  for (std::size_t i = 0; i < 5; ++i) CHECK(u[i] == doctest::Approx(0.2).epsilon(1e-13));
  CHECK_THROWS_AS(qit::evolve(ds, ProbVec::uniform(2)), qit::ArgumentError);
}

TEST_CASE("stationary examples") {
  qit::Rng rng(2);
  const MarkovChain ds = qit::random_doubly_stochastic_chain(4, rng);
  const auto s = qit::stationary(ds);
  for (std::size_t i = 0; i < 4; ++i) CHECK(s.distribution[i] == doctest::Approx(0.25).epsilon(1e-11));
  const auto t = qit::stationary(MarkovChain({{0.5, 0.5}, {0.25, 0.75}}, ProbVec({1.0, 0.0})));
  CHECK(t.distribution[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
  CHECK(t.distribution[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-11));
  CHECK(t.irreducible);
  const ProbVec d({0.3, 0.7});
  const auto i = qit::stationary(MarkovChain({{1.0, 0.0}, {0.0, 1.0}}, d));
  CHECK(i.distribution == d);
  CHECK_FALSE(i.irreducible);
  // periodic chain: the lazy transform still converges
  const auto p = qit::stationary(MarkovChain({{0.0, 1.0}, {1.0, 0.0}}, ProbVec({1.0, 0.0})));
  CHECK(p.distribution[0] == doctest::Approx(0.5).epsilon(1e-11));
}

TEST_CASE("stationary gives up with the last iterate") {
  const MarkovChain slow({{0.999, 0.001}, {0.001, 0.999}}, ProbVec({1.0, 0.0}));
  try {
    qit::stationary(slow, 1e-12, 10);
    FAIL("expected a convergence error");
  } catch (const qit::ConvergenceError& e) {
    CHECK(e.last_iterate().size() == 2);
    CHECK(e.last_iterate()[0] < 1.0);
  }
}

TEST_CASE("block table and budget") {
  const MarkovChain c(kFlip, ProbVec({0.5, 0.5}));
  const auto b = qit::block_table(c, 3);
  CHECK(b.shape() == std::vector<std::size_t>{2, 2, 2});
  CHECK(b.at({0, 0, 1}) == doctest::Approx(0.5 * 0.9 * 0.1).epsilon(1e-15));
  CHECK_NOTHROW(qit::block_table(c, 16));
  CHECK_THROWS_AS(qit::block_table(c, 17), qit::SizeError);
  CHECK_THROWS_AS(qit::entropy_rate_approximants(c, 17, QParam(0.5)), qit::SizeError);
}

TEST_CASE("entropy rates, Shannon i.i.d.") {
  const MarkovChain iid({{0.5, 0.5}, {0.5, 0.5}}, ProbVec::uniform(2));
  for (std::size_t n : {1, 4, 9}) {
    const auto r = qit::entropy_rate_approximants(iid, n, QParam(1.0));
    CHECK(r.block_rate == doctest::Approx(std::log(2.0)).epsilon(1e-13));
    CHECK(r.cond_rate == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  }
}

TEST_CASE("entropy rates at stationarity") {
  const MarkovChain c(kFlip, ProbVec::uniform(2));
  const double q = 0.5;
  const auto r = qit::entropy_rate_approximants(c, 8, QParam(q));
  const double h1 = oracle::hq({0.5, 0.5}, q);
  const double h21 = oracle::hq({0.9, 0.1}, q);
  REQUIRE(r.conditional_terms.size() == 8);
  CHECK(r.conditional_terms[0] == doctest::Approx(h1).epsilon(1e-13));
  for (std::size_t i = 1; i < 8; ++i) CHECK(r.conditional_terms[i] == doctest::Approx(h21).epsilon(1e-12));
  // the average includes H(X_1), so it is not H(X_2|X_1) itself
  CHECK(r.cond_rate == doctest::Approx((h1 + 7.0 * h21) / 8.0).epsilon(1e-12));
}

TEST_CASE("entropy rates for q < 1: block rate falls below the conditional rate") {
  qit::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    const std::size_t m = 2 + rng.uniform_int(0, 1);
    const MarkovChain c = qit::random_chain(m, rng);
    const double q = rng.uniform(0.05, 0.95);
    const std::size_t n = m == 2 ? 10 : 7;
    const auto r = qit::entropy_rate_approximants(c, n, QParam(q));
    CHECK(r.cond_rate >= r.block_rate - 1e-12);
    // -ln_q p <= 1/(1-q) caps the block entropy
    CHECK(r.block_rate <= 1.0 / ((1.0 - q) * static_cast<double>(n)) + 1e-12);
  }
  // stationary flip chain: H_q(X_2|X_1) exceeds the block rate by n = 12
  const MarkovChain flip(kFlip, ProbVec::uniform(2));
  const auto r = qit::entropy_rate_approximants(flip, 12, QParam(0.5));
  CHECK(oracle::hq({0.9, 0.1}, 0.5) > r.block_rate);
}

TEST_CASE("second law: uniform start is stationary") {
  qit::Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const std::size_t m = 2 + rng.uniform_int(0, 4);
    const MarkovChain c = qit::random_doubly_stochastic_chain(m, rng).with_initial(ProbVec::uniform(m));
    const auto rep = qit::second_law_report(c, QParam(0.5), 10);
    CHECK(rep.applicable);
    for (const auto& row : rep.rows) {
      CHECK(std::abs(row.delta_h) <= 1e-12);
      CHECK(std::abs(row.t_q) <= 1e-12);
      CHECK(std::abs(row.slack) <= 1e-12);
    }
  }
}

TEST_CASE("second law: flip chain from a point mass") {
  const double q = 0.8;
  const MarkovChain c(kFlip, ProbVec({1.0, 0.0}));
  const auto rep = qit::second_law_report(c, QParam(q), 50);
  REQUIRE(rep.rows.size() == 50);
  const double hmax = qit::q_entropy_max(2, QParam(q));
  double prev = -1.0;
  for (const auto& row : rep.rows) {
    CHECK(row.slack >= -1e-9);
    CHECK(row.h_q > prev);
    CHECK(row.h_q <= hmax + 1e-12);
    prev = row.h_q;
  }
  CHECK(rep.rows.back().h_q == doctest::Approx(hmax).epsilon(1e-6));

  // step 0 by hand: psi_0 = [1, 0], psi_1 = [0.9, 0.1], s uniform
  const double bracket = std::pow(2.0, 1.0 - q);
  const double h1 = oracle::hq({0.9, 0.1}, q);
  const double t = (1.0 - q) * (0.9 * oracle::lnq(0.9 / 0.5, q) * oracle::lnq(1.0 / 0.9, q) +
                                0.1 * oracle::lnq(0.1 / 0.5, q) * oracle::lnq(1.0 / 0.1, q));
  const auto& r0 = rep.rows.front();
  CHECK(r0.step == 0);
  CHECK(r0.h_q == 0.0);
  CHECK(r0.delta_h == doctest::Approx(h1).epsilon(1e-13));
  CHECK(r0.lhs == doctest::Approx(h1 * bracket).epsilon(1e-13));
  CHECK(r0.t_q == doctest::Approx(t).epsilon(1e-12));
  CHECK(r0.slack == doctest::Approx(h1 * bracket - t).epsilon(1e-12));
}

TEST_CASE("second law on random doubly stochastic chains") {
  qit::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = 2 + rng.uniform_int(0, 4);
    const MarkovChain c = qit::random_doubly_stochastic_chain(m, rng);
    CHECK(c.is_doubly_stochastic());
    const double q = rng.uniform(0.0, 1.0);
    const auto rep = qit::second_law_report(c, QParam(q), 20);
    const double hmax = qit::q_entropy_max(m, QParam(q));
    for (const auto& row : rep.rows) {
      CHECK(row.slack >= -1e-9);
      CHECK(row.h_q <= hmax + 1e-12);
      // D_q(psi||u) = ln_q m - [1 + (1-q) ln_q m] H_q(psi)
      CHECK(row.relative_drop == doctest::Approx(row.lhs).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("second law: Shannon side and range") {
  const MarkovChain c(kFlip, ProbVec({0.8, 0.2}));
  const auto rep = qit::second_law_report(c, QParam(1.0 - 1e-9), 5);
  for (const auto& row : rep.rows) {
    CHECK(std::abs(row.t_q) <= 1e-8);
    CHECK(row.slack >= -1e-9);
  }
  CHECK_THROWS_AS(qit::second_law_report(c, QParam(1.0), 5), qit::ArgumentError);
  CHECK_THROWS_AS(qit::second_law_report(c, QParam(-0.1), 5), qit::ArgumentError);
  const MarkovChain skew({{0.5, 0.5}, {0.25, 0.75}}, ProbVec({1.0, 0.0}));
  const auto s = qit::second_law_report(skew, QParam(0.5), 5);
  CHECK_FALSE(s.applicable);
  CHECK(s.rows.size() == 5);
}
