#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kolmo/error.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/stats.hpp"

namespace kolmo {
namespace {

std::vector<double> pareto(double nu, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> v(n);
  for (double& x : v) x = std::pow(rng.uniform(), -1 / nu);
  return v;
}

// Exact curve z^-nu (log z)^k sampled on a log grid.
SurvivalCurve synthetic(double nu, int k, double lo, double hi, int points) {
  SurvivalCurve c;
  for (int i = 0; i < points; ++i) {
    const double z = lo * std::pow(hi / lo, i / (points - 1.0));
    c.points.push_back({z, std::pow(z, -nu) * std::pow(std::log(z), k)});
  }
  c.n_total = points;
  return c;
}

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return Errc::kIoError;
}

TEST(SurvivalCurve, Small) {
  const std::vector<double> v{1, 2, 3};
  const SurvivalCurve c = survival_curve(v);
  EXPECT_NEAR(c.at(1.5), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.at(2.5), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(c.at(0.5), 1.0, 1e-15);
  EXPECT_NEAR(c.at(3.0), 0.0, 1e-15);
}

TEST(SurvivalCurve, Censoring) {
  const std::vector<double> one{1};
  EXPECT_EQ(error_of([&] { survival_curve(one, 1.0); }), Errc::kAllCensored);
  const std::vector<double> v{1, 2, 10, 10};
  const SurvivalCurve c = survival_curve(v, 10.0);
  EXPECT_EQ(c.n_total, 4u);
  EXPECT_EQ(c.n_censored, 2u);
  EXPECT_EQ(c.points.size(), 2u);
  EXPECT_NEAR(c.at(5), 0.5, 1e-15);
  EXPECT_TRUE(std::isnan(c.at(10)));
  const std::vector<double> bad{1, -2};
  EXPECT_EQ(error_of([&] { survival_curve(bad); }), Errc::kInvalidArgument);
}

TEST(SurvivalCurve, Ties) {
  const std::vector<double> v{2, 2, 3, 1};
  const SurvivalCurve c = survival_curve(v);
  ASSERT_EQ(c.points.size(), 3u);
  EXPECT_NEAR(c.at(2.0), 0.25, 1e-15);
  EXPECT_NEAR(c.at(1.999), 0.75, 1e-15);
}

TEST(StatsProperty, SurvivalPermutationInvariant) {
  auto v = pareto(0.7, 5000, 1);
  const SurvivalCurve a = survival_curve(v);
  RandomStream rng(2, 2);
  std::shuffle(v.begin(), v.end(), rng);
  const SurvivalCurve b = survival_curve(v);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    ASSERT_EQ(a.points[i].z, b.points[i].z);
    ASSERT_EQ(a.points[i].p, b.points[i].p);
  }
}

TEST(StatsProperty, SurvivalMonotoneInUnitInterval) {
  const SurvivalCurve c = survival_curve(pareto(0.3, 20000, 3), 1e6);
  double prev = 1;
  for (const auto& p : c.points) {
    ASSERT_GT(p.z, 0.0);
    ASSERT_LE(p.p, prev);
    ASSERT_GE(p.p, 0.0);
    prev = p.p;
  }
}

TEST(SurvivalCurve, ParetoHalf) {
  const SurvivalCurve c = survival_curve(pareto(0.5, 100000, 4));
  for (const double z : {10.0, 31.6, 100.0, 316.0, 1000.0}) {
    const double r = c.at(z) * std::sqrt(z);
    EXPECT_GT(r, 0.9) << z;
    EXPECT_LT(r, 1.1) << z;
  }
}

TEST(FitTail, NoiselessPowerLaw) {
  const TailFit f = fit_tail(synthetic(0.25, 0, 10, 1e6, 50), {10, 1e6});
  EXPECT_NEAR(f.exponent_hat, 0.25, 1e-6);
  EXPECT_EQ(f.points, 50u);
  EXPECT_EQ(f.method, FitMethod::kLogLogRegression);
}

TEST(FitTail, ParetoTopDecades) {
  const SurvivalCurve c = survival_curve(pareto(0.25, 100000, 5));
  const double hi = c.points[c.points.size() - 11].z;
  const TailFit f = fit_tail(c, {hi / 1e4, hi});
  EXPECT_GT(f.exponent_hat, 0.20);
  EXPECT_LT(f.exponent_hat, 0.30);
  // With a slow tail the top two decades hold only a couple dozen points.
  try {
    fit_tail(c, {hi / 100, hi});
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kWindowTooSparse);
  }
}

TEST(FitTail, DefaultWindowPareto) {
  const SurvivalCurve c = survival_curve(pareto(0.25, 20000, 6));
  const TailWindow w = default_window(c);
  EXPECT_LT(w.lo, w.hi);
  const TailFit f = fit_tail(c, w);
  EXPECT_NEAR(f.exponent_hat, 0.25, 0.025);
}

TEST(StatsProperty, LogPowerRecovery) {
  for (const double nu : {0.2, 0.5}) {
    for (const int k : {0, 1, 2}) {
      const SurvivalCurve c = synthetic(nu, k, 1e3, 1e15, 200);
      FitOptions o;
      o.fit_logpow = true;
      o.pinned_exponent = nu;
      const TailFit f = fit_tail(c, {1e3, 1e15}, o);
      ASSERT_TRUE(f.logpow_hat);
      EXPECT_NEAR(f.exponent_hat, nu, 1e-4);
      EXPECT_NEAR(*f.logpow_hat, k, 0.05) << "nu=" << nu << " k=" << k;
    }
  }
}

TEST(FitTail, PinnedLogPowerAndJointFit) {
  const SurvivalCurve c = synthetic(0.3, 2, 1e3, 1e15, 200);
  FitOptions pin;
  pin.pinned_logpow = 2;
  EXPECT_NEAR(fit_tail(c, {1e3, 1e15}, pin).exponent_hat, 0.3, 1e-9);
  FitOptions joint;
  joint.fit_logpow = true;
  const TailFit j = fit_tail(c, {1e3, 1e15}, joint);
  EXPECT_NEAR(j.exponent_hat, 0.3, 1e-6);
  EXPECT_NEAR(*j.logpow_hat, 2.0, 1e-4);
}

TEST(FitTail, Errors) {
  const SurvivalCurve c = synthetic(0.3, 0, 10, 1e4, 15);
  EXPECT_EQ(error_of([&] { fit_tail(c, {10, 1e4}); }), Errc::kWindowTooSparse);
  SurvivalCurve cens = synthetic(0.3, 0, 10, 1e4, 40);
  cens.censor_level = 1e3;
  EXPECT_EQ(error_of([&] { fit_tail(cens, {10, 1e4}); }), Errc::kInvalidArgument);
  const SurvivalCurve low = synthetic(0.3, 0, 0.1, 1e4, 40);
  FitOptions o;
  o.fit_logpow = true;
  o.pinned_exponent = 0.3;
  EXPECT_EQ(error_of([&] { fit_tail(low, {0.1, 1e4}, o); }), Errc::kInvalidArgument);
}

TEST(Hill, Pareto) {
  const auto v = pareto(0.6, 50000, 7);
  const TailFit f = hill_estimate(v);
  EXPECT_EQ(f.method, FitMethod::kHill);
  EXPECT_NEAR(f.exponent_hat, 0.6, 4 * f.std_error);
  EXPECT_EQ(error_of([&] { hill_estimate(v, v.size()); }), Errc::kInsufficientData);
}

TEST(McMellin, AtOne) {
  const auto v = pareto(0.3, 100, 8);
  const MellinValue m = mc_mellin(v, 1.0);
  EXPECT_EQ(m.value, 1.0);
  EXPECT_EQ(m.error_bound, 0.0);
  EXPECT_EQ(m.method, MellinMethod::kMonteCarlo);
}

TEST(McMellin, ParetoMoment) {
  // E[Z^(s-1)] = nu / (nu - s + 1) for Pareto(nu) when s - 1 < nu.
  const auto v = pareto(3.0, 100000, 9);
  const MellinValue m = mc_mellin(v, 1.5);
  EXPECT_FALSE(m.nonfinite_variance);
  EXPECT_NEAR(m.value, 3.0 / 2.5, 3 * m.std_error);
  EXPECT_EQ(m.error_bound, m.std_error);
}

TEST(McMellin, FlagsInfiniteVariance) {
  // Z^0.5 with nu = 0.8 has tail index 1.6 < 2.
  const MellinValue m = mc_mellin(pareto(0.8, 50000, 10), 1.5);
  EXPECT_TRUE(m.nonfinite_variance);
  EXPECT_TRUE(std::isinf(m.error_bound));
  EXPECT_GT(m.std_error, 0.0);
}

TEST(StatsProperty, McMellinMonotoneInS) {
  const auto v = pareto(2.0, 1000, 11);
  double prev = -1;
  for (double s = 0.0; s <= 2.0; s += 0.1) {
    const double m = mc_mellin(v, s).value;
    EXPECT_GT(m, prev);
    prev = m;
  }
}

TEST(McLogMoment, Pareto) {
  // log of Pareto(nu) is exponential with mean 1/nu.
  const MeanEstimate m = mc_log_moment(pareto(0.5, 100000, 12));
  EXPECT_NEAR(m.mean, 2.0, 3 * m.std_error);
}

TEST(Ecf, LambdaZeroAndGaussian) {
  RandomStream rng(13, 0);
  const StableLaw bm = validate_params(2, 0.5);
  std::vector<double> v(20000);
  for (double& x : v) x = sample_increment(bm, 1.0, rng);
  const std::vector<double> lambdas{0.0, 1.0};
  const EcfReport r = ecf_check(v, bm, lambdas);
  EXPECT_NEAR(r.rows[0].empirical.real(), 1.0, 1e-15);
  EXPECT_NEAR(r.rows[0].target.real(), 1.0, 1e-15);
  EXPECT_NEAR(r.rows[1].target.real(), std::exp(-1.0), 1e-15);
  EXPECT_TRUE(r.all_ok);
  const std::vector<double> few(100, 0.0);
  EXPECT_EQ(error_of([&] { ecf_check(few, bm, lambdas); }), Errc::kInsufficientData);
}

TEST(Ecf, SkewedTarget) {
  const StableLaw law = validate_params(1.5, 0.6);
  RandomStream rng(14, 0);
  std::vector<double> v(20000);
  for (double& x : v) x = sample_increment(law, 1.0, rng);
  const std::vector<double> lambdas{-1.0};
  const EcfReport r = ecf_check(v, law, lambdas);
  EXPECT_NEAR(r.rows[0].target.real(), std::exp(char_exponent(law, -1.0)).real(), 1e-15);
  EXPECT_NEAR(r.rows[0].target.imag(), std::exp(char_exponent(law, -1.0)).imag(), 1e-15);
}

TEST(Ks, SameAndDifferent) {
  const auto a = pareto(0.5, 5000, 20);
  const auto b = pareto(0.5, 5000, 21);
  const auto c = pareto(0.4, 5000, 22);
  EXPECT_GT(ks_two_sample(a, b).p_value, 0.01);
  EXPECT_LT(ks_two_sample(a, c).p_value, 1e-6);
  EXPECT_EQ(ks_two_sample(a, a).statistic, 0.0);
}

TEST(FitLine, Exact) {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{3, 5, 7, 9};
  const LineFit f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.slope_std_error, 0.0, 1e-14);
}

TEST(MeanEstimate, Jackknife) {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const MeanEstimate m = mean_estimate(v);
  EXPECT_DOUBLE_EQ(m.mean, 3.0);
  EXPECT_NEAR(m.std_error, std::sqrt(2.5 / 5), 1e-14);
}

}  // namespace
}  // namespace kolmo
