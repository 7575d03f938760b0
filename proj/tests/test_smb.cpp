#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "oracle.hpp"
#include "qit/errors.hpp"
#include "qit/markov.hpp"
#include "qit/measures.hpp"
#include "qit/rng.hpp"
#include "qit/smb.hpp"

using qit::MarkovChain;
using qit::ProbVec;
using qit::QParam;

namespace {

const MarkovChain kFlip({{0.9, 0.1}, {0.1, 0.9}}, ProbVec::uniform(2));
const double kBinaryEntropy = 0.3250829733914482;  // -0.9 ln 0.9 - 0.1 ln 0.1

qit::Trajectory fixed(const MarkovChain& c, std::vector<std::size_t> symbols) {
  qit::Trajectory t;
  t.symbols = std::move(symbols);
  t.chain = std::make_shared<const MarkovChain>(c);
  return t;
}

}  // namespace

TEST_CASE("binary entropy reference") {
  CHECK(oracle::shannon({0.9, 0.1}) == doctest::Approx(kBinaryEntropy).epsilon(1e-15));
  CHECK(kBinaryEntropy == doctest::Approx(0.3250830).epsilon(1e-7));
}

TEST_CASE("sampling is reproducible") {
  qit::Rng a(42, 3), b(42, 3), c(42, 4);
  const auto ta = qit::sample_trajectory(kFlip, 500, a);
  const auto tb = qit::sample_trajectory(kFlip, 500, b);
  const auto tc = qit::sample_trajectory(kFlip, 500, c);
  CHECK(ta.symbols == tb.symbols);
  CHECK(ta.symbols != tc.symbols);
  CHECK(ta.seed == 42);
  CHECK(ta.stream == 3);
  for (auto s : ta.symbols) CHECK(s < 2);
  qit::Rng r(1);
  CHECK_THROWS_AS(qit::sample_trajectory(kFlip, 0, r), qit::ArgumentError);
}

TEST_CASE("block probabilities") {
  const MarkovChain c({{0.5, 0.5}, {0.25, 0.75}}, ProbVec({0.2, 0.8}));
  const auto t = fixed(c, {0, 1, 1, 0});
  CHECK(qit::block_log_prob(t) == doctest::Approx(std::log(0.2 * 0.5 * 0.75 * 0.25)).epsilon(1e-15));
  CHECK(qit::block_log_prob_q(t, QParam(0.5)) ==
        doctest::Approx(-oracle::lnq(0.2 * 0.5 * 0.75 * 0.25, 0.5)).epsilon(1e-14));
  const MarkovChain z({{1.0, 0.0}, {0.5, 0.5}}, ProbVec::uniform(2));
  CHECK_THROWS_AS(qit::block_log_prob(fixed(z, {0, 1})), qit::ImpossibleTrajectoryError);
}

TEST_CASE("order-1 approximation is the block probability bit for bit") {
  qit::Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const MarkovChain c = qit::random_chain(2 + rng.uniform_int(0, 3), rng);
    const auto t = qit::sample_trajectory(c, 1 + rng.uniform_int(0, 400), rng);
    CHECK(qit::markov_k_block_log_prob(t, 1) == qit::block_log_prob(t));
    for (double q : {0.3, 0.75, 1.0, 1.4}) {
      CHECK(qit::markov_k_block_log_prob_q(t, 1, QParam(q)) == qit::block_log_prob_q(t, QParam(q)));
    }
  }
}

TEST_CASE("order-0 approximation uses stationary marginals") {
  const MarkovChain c({{0.5, 0.5}, {0.25, 0.75}}, ProbVec({1.0, 0.0}));
  const auto t = fixed(c, {0, 1, 1});
  CHECK(qit::markov_k_block_log_prob(t, 0) == doctest::Approx(std::log(1.0 / 3.0 * 2.0 / 3.0 * 2.0 / 3.0)).epsilon(1e-10));
  CHECK_THROWS_AS(qit::markov_k_block_log_prob(t, 4), qit::ArgumentError);
}

TEST_CASE("empirical approximations count the trajectory") {
  const auto t = fixed(kFlip, {0, 0, 1, 0});
  using qit::ConditionalSource;
  CHECK(qit::markov_k_block_log_prob(t, 1, ConditionalSource::kEmpirical) ==
        doctest::Approx(std::log(3.0 / 16.0)).epsilon(1e-14));
  CHECK(qit::markov_k_block_log_prob(t, 0, ConditionalSource::kEmpirical) ==
        doctest::Approx(std::log(27.0 / 256.0)).epsilon(1e-14));
  // k = n: the whole block is its own window
  CHECK(qit::markov_k_block_log_prob(t, 4, ConditionalSource::kEmpirical) == 0.0);
}

TEST_CASE("t3 residual") {
  const double one[] = {0.37};
  CHECK(qit::t3_residual(one, QParam(0.4)) == 0.0);
  const double half[] = {0.5, 0.5};
  CHECK(qit::t3_residual(half, QParam(0.75)) == doctest::Approx(0.1012562).epsilon(1e-6));
  CHECK(qit::t3_residual(half, QParam(1.0)) == 0.0);
  const double bad[] = {0.5, 0.0};
  CHECK_THROWS_AS(qit::t3_residual(bad, QParam(0.5)), qit::DomainError);
  // long double reference; for q > 1 the terms grow like prod^(1-q) so the
  // comparison is relative to the largest term
  auto lnq_ld = [](long double x, long double q) {
    return q == 1.0L ? std::log(x) : (std::pow(x, 1.0L - q) - 1.0L) / (1.0L - q);
  };
  qit::Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 1 + rng.uniform_int(0, 30);
    std::vector<double> p(n);
    long double prod = 1.0L, sum = 0.0L;
    const double q = i < 1000 ? rng.uniform(0.0, 1.0) : rng.uniform(1.0, 2.0);
    for (auto& x : p) {
      x = rng.uniform(0.05, 1.0);
      prod *= x;
      sum += lnq_ld(x, q);
    }
    const long double big = lnq_ld(prod, q);
    const double ref = static_cast<double>(big - sum);
    const double tol = q < 1.0 ? 1e-10 : 1e-10 * std::max(1.0, std::abs(static_cast<double>(big)));
    CHECK(std::abs(qit::t3_residual(p, QParam(q)) - ref) <= tol);
  }
}

TEST_CASE("h_q_k") {
  const MarkovChain iid({{0.3, 0.7}, {0.3, 0.7}}, ProbVec::uniform(2));
  for (std::size_t k : {0, 1, 3}) {
    CHECK(qit::h_q_k(iid, k, QParam(0.6)) == doctest::Approx(oracle::hq({0.3, 0.7}, 0.6)).epsilon(1e-12));
  }
  CHECK(qit::h_q_k(kFlip, 1, QParam(0.75)) ==
        doctest::Approx(-(0.9 * oracle::lnq(0.9, 0.75) + 0.1 * oracle::lnq(0.1, 0.75))).epsilon(1e-13));
  qit::Rng rng(4);
  for (int i = 0; i < 30; ++i) {
    const MarkovChain c = qit::random_chain(2 + rng.uniform_int(0, 1), rng);
    const double q = rng.uniform(0.0, 2.0);
    double prev = qit::h_q_k(c, 0, QParam(q));
    CHECK(prev >= 0.0);
    for (std::size_t k = 1; k <= 4; ++k) {
      const double h = qit::h_q_k(c, k, QParam(q));
      CHECK(h <= prev + 1e-12);
      CHECK(h >= 0.0);
      prev = h;
    }
    // order-1 chain: constant from k = 1 on, equal to sum psi_i H_q(row i)
    const ProbVec psi = qit::stationary(c).distribution;
    double direct = 0.0;
    for (std::size_t a = 0; a < c.states(); ++a) {
      std::vector<double> row(c.states());
      for (std::size_t b = 0; b < c.states(); ++b) row[b] = c(a, b);
      direct += psi[a] * oracle::hq(row, q);
    }
    CHECK(qit::h_q_k(c, 3, QParam(q)) == doctest::Approx(direct).epsilon(1e-10));
  }
  CHECK_THROWS_AS(qit::h_q_k(kFlip, 20, QParam(0.5)), qit::SizeError);
}

TEST_CASE("h_q_inf") {
  CHECK(qit::h_q_inf(kFlip, QParam(0.75)) == qit::h_q_k(kFlip, 1, QParam(0.75)));
  const MarkovChain iid({{0.3, 0.7}, {0.3, 0.7}}, ProbVec::uniform(2));
  CHECK(qit::h_q_inf(iid, QParam(0.6)) == doctest::Approx(oracle::hq({0.3, 0.7}, 0.6)).epsilon(1e-12));
  CHECK(qit::h_q_inf(kFlip, QParam(1.0)) == doctest::Approx(kBinaryEntropy).epsilon(1e-12));
}

TEST_CASE("smb_probe grid, determinism and worker invariance") {
  const auto a = qit::smb_probe(kFlip, QParam(0.75), 100, 1, 12, 9, 1);
  const auto b = qit::smb_probe(kFlip, QParam(0.75), 100, 1, 12, 9, 3);
  std::vector<std::size_t> grid;
  for (const auto& r : a.records) grid.push_back(r.n);
  CHECK(grid == std::vector<std::size_t>{1, 2, 4, 8, 16, 32, 64, 100});
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].block_mean == b.records[i].block_mean);
    CHECK(a.records[i].block_sd == b.records[i].block_sd);
    CHECK(a.records[i].t3_over_n_mean == b.records[i].t3_over_n_mean);
    CHECK(a.records[i].ratio1_mean == b.records[i].ratio1_mean);
  }
  const auto c = qit::smb_probe(kFlip, QParam(0.75), 100, 1, 12, 10, 1);
  CHECK(c.records.back().block_mean != a.records.back().block_mean);
  const auto p = qit::smb_probe(kFlip, QParam(0.75), 64, 1, 3, 9, 1);
  CHECK(p.records.back().n == 64);
  CHECK(p.records.size() == 7);
  CHECK_THROWS_AS(qit::smb_probe(kFlip, QParam(0.75), 0, 1, 3, 9), qit::ArgumentError);
}

TEST_CASE("smb_probe on a deterministic source") {
  const MarkovChain one({{1.0}}, ProbVec({1.0}));
  const auto curve = qit::smb_probe(one, QParam(0.75), 50, 1, 5, 1);
  for (const auto& r : curve.records) {
    CHECK(r.block_mean == 0.0);
    CHECK(r.pk_mean == 0.0);
    CHECK(r.t3_over_n_mean == 0.0);
    CHECK(r.cond_c1_rate == 1.0);
    CHECK(r.cond_c2_rate == 1.0);
  }
  CHECK(curve.h_q_inf == 0.0);
  CHECK(curve.bound_violations == 0);
}

TEST_CASE("q = 0.75: block estimate collapses and flags are raised") {
  const double q = 0.75;
  const auto curve = qit::smb_probe(kFlip, QParam(q), 4096, 1, 20, 5);
  CHECK(curve.h_q_inf > 0.2);
  for (const auto& r : curve.records) {
    CHECK(r.block_mean <= 1.0 / ((1.0 - q) * static_cast<double>(r.n)) + 1e-12);
    CHECK(r.block_min >= 0.0);
    CHECK(r.block_max <= 1.0 / (1.0 - q));
  }
  CHECK(curve.records.back().block_mean < 0.01);
  CHECK(curve.flags.t3_not_vanishing);
  CHECK_FALSE(curve.flags.q_outside_convergence_range);
  CHECK(curve.bound_violations == 0);
}

TEST_CASE("boundedness is strict on short blocks") {
  for (double q : {0.6, 0.75, 0.9}) {
    qit::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
      const MarkovChain c = qit::random_chain(2 + rng.uniform_int(0, 3), rng);
      const auto t = qit::sample_trajectory(c, 1 + rng.uniform_int(0, 63), rng);
      const double b = qit::block_log_prob_q(t, QParam(q));
      CHECK(b >= 0.0);
      CHECK(b <= 1.0 / (1.0 - q));
      // strict unless p^(1-q) is below double resolution
      if ((1.0 - q) * qit::block_log_prob(t) > std::log(1e-15)) CHECK(b < 1.0 / (1.0 - q));
    }
  }
}

TEST_CASE("Shannon recovery close to q = 1") {
  const auto curve = qit::smb_probe(kFlip, QParam(1.0 - 1e-7), 10000, 1, 100, 2024);
  const double est = curve.records.back().block_mean;
  CHECK(std::abs(est - kBinaryEntropy) <= 0.05 * kBinaryEntropy);
  CHECK(est <= curve.h_q_inf + 0.05);
  CHECK_FALSE(curve.flags.q_outside_convergence_range);
}

TEST_CASE("q = 0.999 does not recover the Shannon rate at n = 1e4") {
  // -ln_q p <= 1/(1-q) = 1000, so the estimate is at most 0.1 per symbol
  const auto curve = qit::smb_probe(kFlip, QParam(0.999), 10000, 1, 20, 2024);
  const double est = curve.records.back().block_mean;
  CHECK(est <= 0.1);
  CHECK(est == doctest::Approx(1000.0 * (1.0 - std::exp(-1e-3 * 10000 * kBinaryEntropy)) / 10000).epsilon(0.02));
}

TEST_CASE("csv layout") {
  CHECK(qit::smb_csv_header() ==
        "n,block_mean,block_sd,pk_mean,t3_over_n_mean,cond_c1_rate,cond_c2_rate,ratio1_mean,ratio2_mean,h_q_k,h_q_inf");
  const auto curve = qit::smb_probe(kFlip, QParam(0.75), 4, 1, 2, 1);
  const std::string row = qit::smb_csv_row(curve.records.front(), curve);
  CHECK(row.rfind("1,", 0) == 0);
  CHECK(std::count(row.begin(), row.end(), ',') == 10);
}

TEST_CASE("range flag") {
  CHECK(qit::smb_probe(kFlip, QParam(0.3), 8, 1, 2, 1).flags.q_outside_convergence_range);
  CHECK(qit::smb_probe(kFlip, QParam(1.0), 8, 1, 2, 1).flags.q_outside_convergence_range);
  CHECK_FALSE(qit::smb_probe(kFlip, QParam(0.6), 8, 1, 2, 1).flags.q_outside_convergence_range);
}
