#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kolmo/cascade.hpp"
#include "kolmo/error.hpp"
#include "kolmo/stats.hpp"
#include "kolmo/theory.hpp"

namespace kolmo {
namespace {

ReturnSample draw(int sign, double tau, double ell) { return {sign, tau, ell, false, false}; }

Errc step_error(const CascadeState& s, const ReturnSample& d) {
  try {
    cascade_step(s, d, 2.0);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kIoError;
}

TEST(LogAdd, Basics) {
  EXPECT_NEAR(log_add(0, 0), std::log(2.0), 1e-15);
  EXPECT_NEAR(log_add(1000, 0), 1000.0, 1e-12);
  EXPECT_NEAR(log_add(-5, 800), 800.0, 1e-12);
  EXPECT_EQ(log_add(3, -std::numeric_limits<double>::infinity()), 3.0);
  EXPECT_NEAR(log_add(std::log(3.0), std::log(5.0)), std::log(8.0), 1e-15);
}

TEST(CascadeStep, UnitDraw) {
  const CascadeState s{1, 0.0, 0.0, 1};
  const CascadeState t = cascade_step(s, draw(1, 1, 1), 2.0);
  EXPECT_EQ(t.n, 2);
  EXPECT_NEAR(t.log_t, std::log(2.0), 1e-15);
  EXPECT_EQ(t.log_l, 0.0);
  EXPECT_EQ(t.next_sign, -1);
}

TEST(CascadeStep, Recursion) {
  // T' = T + |L|^alpha tau, |L'| = |L| ell.
  const CascadeState s{3, std::log(5.0), std::log(2.0), -1};
  const CascadeState t = cascade_step(s, draw(-1, 3, 0.5), 1.5);
  EXPECT_NEAR(std::exp(t.log_t), 5 + std::pow(2.0, 1.5) * 3, 1e-12);
  EXPECT_NEAR(std::exp(t.log_l), 1.0, 1e-15);
  EXPECT_EQ(t.n, 4);
  EXPECT_EQ(t.next_sign, 1);
}

TEST(CascadeStep, Errors) {
  const CascadeState s{1, 0.0, 0.0, 1};
  EXPECT_EQ(step_error(s, draw(-1, 1, 1)), Errc::kParityMismatch);
  ReturnSample c{1, 10, std::nullopt, true, false};
  EXPECT_EQ(step_error(s, c), Errc::kCensoredDraw);
  EXPECT_EQ(step_error(s, draw(1, 1, 0)), Errc::kInvalidDraw);
  const CascadeState dead{1, 0.0, -std::numeric_limits<double>::infinity(), 1};
  EXPECT_EQ(step_error(dead, draw(1, 1, 1)), Errc::kInvalidDraw);
}

TEST(CascadeStart, FromSample) {
  const CascadeState s = cascade_start(draw(-1, std::exp(2.0), std::exp(-1.0)));
  EXPECT_EQ(s.n, 1);
  EXPECT_NEAR(s.log_t, 2.0, 1e-15);
  EXPECT_NEAR(s.log_l, -1.0, 1e-15);
  EXPECT_EQ(s.next_sign, 1);
  EXPECT_THROW(cascade_start(ReturnSample{-1, 5, std::nullopt, true, false}), Error);
}

TEST(ReturnPool, CountsCensored) {
  ReturnPool p(-1);
  p.add(draw(-1, 2, 3));
  p.add(ReturnSample{-1, 9, std::nullopt, true, false});
  EXPECT_EQ(p.size(), 1u);
  EXPECT_EQ(p.censored_count(), 1u);
  EXPECT_DOUBLE_EQ(p.censored_fraction(), 0.5);
  EXPECT_NEAR(p.log_ell()[0], std::log(3.0), 1e-15);
  EXPECT_THROW(p.add(draw(1, 2, 3)), Error);
  EXPECT_THROW(p.add(draw(-1, 2, 0)), Error);
}

ReturnPools constant_pools(double tau, double ell) {
  ReturnPools pools;
  pools.minus.add(draw(-1, tau, ell));
  pools.plus.add(draw(1, tau, ell));
  return pools;
}

TEST(RunCascade, NMaxOneEchoesStart) {
  RandomStream rng(1, 1);
  const ReturnSample start = draw(-1, 4, 2);
  const auto states = run_cascade(validate_params(2, 0.5), ReturnPools{}, start, 1, rng);
  ASSERT_EQ(states.size(), 1u);
  EXPECT_NEAR(states[0].log_t, std::log(4.0), 1e-15);
  EXPECT_NEAR(states[0].log_l, std::log(2.0), 1e-15);
}

TEST(RunCascade, EmptyPool) {
  RandomStream rng(1, 1);
  try {
    run_cascade(validate_params(2, 0.5), ReturnPools{}, draw(-1, 1, 1), 5, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kEmptyPool);
  }
}

TEST(RunCascade, DeterministicDraws) {
  // tau = e^c, ell = 1: T^(n) = n e^c, so log T / n = (c + log n) / n.
  const double c = 0.7;
  const ReturnPools pools = constant_pools(std::exp(c), 1.0);
  std::vector<std::vector<CascadeState>> all;
  for (std::uint64_t i = 0; i < 30; ++i) {
    RandomStream rng(1, i);
    all.push_back(run_cascade(validate_params(2, 0.5), pools, draw(-1, std::exp(c), 1.0), 1000, rng));
  }
  const KappaEstimate k = estimate_kappa(all);
  EXPECT_NEAR(k.kappa_hat, (c + std::log(1000.0)) / 1000.0, 1e-12);
  EXPECT_EQ(k.n_max, 1000);
  EXPECT_NEAR(k.std_error, 0.0, 1e-12);
}

TEST(RunCascade, GeometricGrowthRate) {
  // tau = 1, ell = e^(c / alpha): T^(n) = sum_k e^(k c), so log T / n -> c.
  const double c = 0.9;
  const double alpha = 1.5;
  const ReturnPools pools = constant_pools(1.0, std::exp(c / alpha));
  std::vector<std::vector<CascadeState>> all;
  for (std::uint64_t i = 0; i < 30; ++i) {
    RandomStream rng(1, i);
    all.push_back(run_cascade(validate_params(alpha, 0.5), pools, draw(-1, 1.0, std::exp(c / alpha)), 1000, rng));
  }
  const KappaEstimate k = estimate_kappa(all);
  // log T = (n - 1) c + log((1 - e^(-n c)) / (1 - e^(-c)))
  const double exact = (999 * c + std::log((1 - std::exp(-1000 * c)) / (1 - std::exp(-c)))) / 1000;
  EXPECT_NEAR(k.kappa_hat, exact, 1e-12);
  EXPECT_NEAR(k.kappa_hat, c, 1e-3);
  EXPECT_NEAR(k.velocity_hat, -std::numbers::pi / k.kappa_hat, 1e-15);
}

TEST(EstimateKappa, InsufficientData) {
  std::vector<std::vector<CascadeState>> few(29, std::vector<CascadeState>(20));
  EXPECT_THROW(estimate_kappa(few), Error);
  std::vector<std::vector<CascadeState>> short_runs(40, std::vector<CascadeState>(5));
  EXPECT_THROW(estimate_kappa(short_runs), Error);
  std::vector<std::vector<CascadeState>> ragged(40, std::vector<CascadeState>(20));
  ragged[3].resize(21);
  EXPECT_THROW(estimate_kappa(ragged), Error);
}

// Pools from simulated returns, shared by the distributional tests.
class BrownianPools : public testing::Test {
 protected:
  static void SetUpTestSuite() {
    PoolOptions o;
    o.size_per_sign = 10000;
    o.seed = 2024;
    build_ = new PoolBuild(build_pools(validate_params(2, 0.5), o));
  }
  static void TearDownTestSuite() {
    delete build_;
    build_ = nullptr;
  }
  static const ReturnPools& pools() { return build_->pools; }
  static std::vector<std::vector<CascadeState>> cascades(std::size_t count, std::int64_t n_max, std::uint64_t seed) {
    std::vector<ReturnSample> starts;
    for (std::size_t i = 0; i < 100; ++i) starts.push_back(pools().minus.at(i));
    return run_cascades(validate_params(2, 0.5), pools(), starts, count, n_max, seed, 1);
  }
  static PoolBuild* build_;
};

PoolBuild* BrownianPools::build_ = nullptr;

TEST_F(BrownianPools, PoolsFullAndUncensored) {
  EXPECT_EQ(pools().minus.size(), 10000u);
  EXPECT_EQ(pools().plus.size(), 10000u);
  EXPECT_LT(pools().minus.censored_fraction(), 0.01);
  EXPECT_LT(pools().plus.censored_fraction(), 0.01);
}

TEST_F(BrownianPools, EllTailIndexAtMellinPole) {
  // E[ell^(s-1)] blows up at s = 1 / (1 - gamma), so P[ell > z] decays with
  // index 1 / (1 - gamma) - 1.
  const StableLaw law = validate_params(2, 0.5);
  for (int sign : {-1, 1}) {
    const double g = gamma_for_sign(law, sign);
    const TailFit h = hill_estimate(pools().for_sign(sign).ell());
    EXPECT_NEAR(h.exponent_hat, 1 / (1 - g) - 1, 4 * h.std_error) << sign;
  }
}

TEST_F(BrownianPools, MonotoneAndAlternating) {
  for (const auto& c : cascades(50, 60, 3)) {
    for (std::size_t k = 1; k < c.size(); ++k) {
      ASSERT_GT(c[k].log_t, c[k - 1].log_t);
      ASSERT_EQ(c[k].next_sign, -c[k - 1].next_sign);
      ASSERT_EQ(c[k].n, c[k - 1].n + 1);
    }
  }
}

TEST_F(BrownianPools, LogDomainMatchesLinear) {
  const StableLaw law = validate_params(2, 0.5);
  const ReturnSample start = pools().minus.at(0);
  RandomStream rng(7, 7);
  const auto states = run_cascade(law, pools(), start, 20, rng);
  // Replay the bootstrap indices and run the recursion on T and |L| directly.
  RandomStream replay(7, 7);
  double t = start.tau;
  double l = *start.ell;
  int sign = -start.start_sign;
  for (std::size_t k = 1; k < states.size(); ++k) {
    const ReturnPool& pool = pools().for_sign(sign);
    const std::size_t i = replay.below(pool.size());
    t += std::pow(l, law.alpha) * pool.tau()[i];
    l *= pool.ell()[i];
    sign = -sign;
    ASSERT_NEAR(states[k].log_t, std::log(t), 1e-10 * std::abs(std::log(t)));
    ASSERT_NEAR(states[k].log_l, std::log(l), 1e-10 * (1 + std::abs(std::log(l))));
  }
}

TEST_F(BrownianPools, MeanGrowthAtFifty) {
  const auto cs = cascades(1000, 50, 11);
  std::vector<double> v;
  for (const auto& c : cs) v.push_back(c.back().log_t / 50.0);
  const double kappa = derived_constants(validate_params(2, 0.5)).kappa();
  EXPECT_NEAR(mean_estimate(v).mean, kappa, 0.05 * kappa);
}

TEST_F(BrownianPools, LogLRate) {
  const auto cs = cascades(500, 100, 12);
  std::vector<double> v;
  for (const auto& c : cs) v.push_back(c.back().log_l / 100.0);
  const double kappa = derived_constants(validate_params(2, 0.5)).kappa();
  EXPECT_NEAR(mean_estimate(v).mean, kappa / 2.0, 0.07 * kappa / 2.0);
}

TEST_F(BrownianPools, Exchangeability) {
  // Permuting the pool order leaves the law of log T^(n) unchanged.
  auto permuted = [](const ReturnPool& src, std::uint64_t seed) {
    std::vector<std::size_t> idx(src.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    RandomStream rng(seed, 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    ReturnPool out(src.sign());
    for (std::size_t i : idx) out.add(src.at(i));
    return out;
  };
  const StableLaw law = validate_params(2, 0.5);
  std::vector<double> a;
  std::vector<double> b;
  for (const std::uint64_t seed : {1u, 2u}) {
    ReturnPools p;
    p.minus = permuted(pools().minus, seed);
    p.plus = permuted(pools().plus, seed + 10);
    std::vector<ReturnSample> starts{pools().minus.at(0)};
    const auto cs = run_cascades(law, p, starts, 2000, 20, 40 + seed, 1);
    for (const auto& c : cs) (seed == 1 ? a : b).push_back(c.back().log_t);
  }
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
}

TEST_F(BrownianPools, VarianceShrinksLikeOneOverN) {
  const auto cs = cascades(1000, 100, 13);
  auto var_at = [&](std::size_t n) {
    std::vector<double> v;
    for (const auto& c : cs) v.push_back(c[n - 1].log_t / static_cast<double>(n));
    const MeanEstimate m = mean_estimate(v);
    return m.std_error * m.std_error * static_cast<double>(v.size());
  };
  const double v25 = var_at(25);
  const double v50 = var_at(50);
  const double v100 = var_at(100);
  EXPECT_GT(v25, v50);
  EXPECT_GT(v50, v100);
  EXPECT_GT(v25 / v100, 2.5);
  EXPECT_LT(v25 / v100, 6.5);
}

TEST(BuildPools, IndependentOfWorkers) {
  PoolOptions o;
  o.size_per_sign = 200;
  o.seed = 5;
  const StableLaw law = validate_params(1.5, 0.5);
  const PoolBuild a = build_pools(law, o);
  o.workers = 3;
  const PoolBuild b = build_pools(law, o);
  ASSERT_EQ(a.pools.minus.size(), b.pools.minus.size());
  for (std::size_t i = 0; i < a.pools.minus.size(); ++i) {
    ASSERT_EQ(a.pools.minus.tau()[i], b.pools.minus.tau()[i]);
    ASSERT_EQ(a.pools.plus.ell()[i], b.pools.plus.ell()[i]);
  }
  const std::vector<ReturnSample> starts{a.pools.minus.at(0), a.pools.minus.at(1)};
  const auto c1 = run_cascades(law, a.pools, starts, 40, 15, 9, 1);
  const auto c3 = run_cascades(law, a.pools, starts, 40, 15, 9, 3);
  for (std::size_t i = 0; i < c1.size(); ++i) ASSERT_EQ(c1[i].back().log_t, c3[i].back().log_t);
}

TEST(LiveMode, UsesSampler) {
  const StableLaw law = validate_params(2, 0.5);
  RandomStream rng(3, 3);
  CascadeConfig cfg;
  cfg.mode = DrawMode::kLive;
  const auto states = run_cascade(law, ReturnPools{}, draw(-1, 1, 1), 5, rng, cfg);
  ASSERT_EQ(states.size(), 5u);
  for (std::size_t k = 1; k < states.size(); ++k) EXPECT_GT(states[k].log_t, states[k - 1].log_t);
}

}  // namespace
}  // namespace kolmo
