#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "kolmo/error.hpp"
#include "kolmo/stable_core.hpp"
#include "kolmo/stats.hpp"

namespace kolmo {
namespace {

constexpr double pi = std::numbers::pi;

Errc code_of(double a, double r) {
  try {
    validate_params(a, r);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for (" << a << ", " << r << ")";
  return Errc::kIoError;
}

// Admissible grid used by the property tests: 10 alphas, 10 rhos each,
// all strictly inside the admissible range.
std::vector<StableLaw> admissible_grid() {
  std::vector<StableLaw> out;
  for (int i = 1; i <= 10; ++i) {
    const double a = 0.2 * i - 0.05;  // 0.15 .. 1.95
    const double lo = a > 1 ? 1 - 1 / a : 0.0;
    const double hi = a > 1 ? 1 / a : 1.0;
    for (int j = 1; j <= 10; ++j) out.push_back(validate_params(a, lo + (hi - lo) * j / 11.0));
  }
  return out;
}

TEST(ValidateParams, Accepts) {
  const StableLaw bm = validate_params(2.0, 0.5);
  EXPECT_FALSE(bm.degenerate_winding());
  EXPECT_TRUE(validate_params(0.7, 1.0).degenerate_winding());
  EXPECT_TRUE(validate_params(0.7, 0.0).degenerate_winding());
  EXPECT_NO_THROW(validate_params(1.5, 1.0 / 3.0));
  EXPECT_NO_THROW(validate_params(1.5, 2.0 / 3.0));
  EXPECT_TRUE(validate_params(1.0, 0.3).alpha_one());
  EXPECT_FALSE(validate_params(1.0, 0.5).alpha_one());
}

TEST(ValidateParams, Rejects) {
  EXPECT_EQ(code_of(0.0, 0.5), Errc::kOutOfRange);
  EXPECT_EQ(code_of(2.1, 0.5), Errc::kOutOfRange);
  EXPECT_EQ(code_of(1.0, -0.1), Errc::kOutOfRange);
  EXPECT_EQ(code_of(1.0, 1.1), Errc::kOutOfRange);
  EXPECT_EQ(code_of(std::nan(""), 0.5), Errc::kOutOfRange);
  EXPECT_EQ(code_of(1.5, 0.9), Errc::kInadmissible);
  EXPECT_EQ(code_of(1.5, 0.2), Errc::kInadmissible);
  EXPECT_EQ(code_of(2.0, 0.6), Errc::kInadmissible);
  EXPECT_EQ(code_of(1.2, 1.0), Errc::kInadmissible);
}

TEST(DerivedConstants, Brownian) {
  const DerivedConstants d = derived_constants(validate_params(2.0, 0.5));
  EXPECT_NEAR(d.gamma, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.gamma_bar, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.theta, 0.25, 1e-15);
  EXPECT_NEAR(d.velocity(), -std::sqrt(3.0) / 2.0, 1e-14);
  EXPECT_NEAR(d.kappa(), 2.0 * pi / std::sqrt(3.0), 1e-13);
  EXPECT_NEAR(d.c_scale, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.s_scale, 0.0, 1e-15);
}

TEST(DerivedConstants, CauchySymmetric) {
  const DerivedConstants d = derived_constants(validate_params(1.0, 0.5));
  EXPECT_NEAR(d.theta, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(d.theta_bar, 1.0 / 3.0, 1e-15);
}

TEST(DerivedConstants, DegenerateKeepsOtherFields) {
  const DerivedConstants d = derived_constants(validate_params(0.7, 1.0));
  EXPECT_TRUE(d.degenerate);
  EXPECT_FALSE(d.kappa_if_defined());
  EXPECT_NEAR(d.theta, 1.0, 1e-15);
  try {
    (void)d.kappa();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kDegenerate);
  }
  EXPECT_THROW((void)d.velocity(), Error);
}

TEST(DerivedConstantsProperty, Invariants) {
  for (const StableLaw& law : admissible_grid()) {
    SCOPED_TRACE(testing::Message() << "alpha=" << law.alpha << " rho=" << law.rho);
    const DerivedConstants d = derived_constants(law);
    EXPECT_NEAR(d.gamma + d.gamma_bar, law.alpha / (1 + law.alpha), 1e-15);
    EXPECT_GT(d.gamma, 0.0);
    EXPECT_LT(d.gamma, 0.5);
    EXPECT_GT(d.gamma_bar, 0.0);
    EXPECT_LT(d.gamma_bar, 0.5);
    EXPECT_GT(d.theta, 0.0);
    EXPECT_LT(d.theta, 1.0);
    EXPECT_GT(d.theta_bar, 0.0);
    EXPECT_LT(d.theta_bar, 1.0);
    EXPECT_EQ(d.theta < d.theta_bar, law.rho < 0.5);
    EXPECT_GT(d.kappa(), 0.0);
    EXPECT_LT(d.velocity(), 0.0);
    EXPECT_NEAR(d.velocity() * d.kappa(), -pi, 1e-12);
    // The velocity in its product-of-sines form.
    const double v = -2 * std::sin(pi * d.gamma) * std::sin(pi * d.gamma_bar) /
                     (law.alpha * std::sin(pi * (d.gamma + d.gamma_bar)));
    EXPECT_NEAR(d.velocity(), v, 1e-12);
    EXPECT_GT(d.c_scale, 0.0);
    EXPECT_LT(d.c_scale, 1.0);
    EXPECT_GT(d.s_scale, -1.0);
    EXPECT_LT(d.s_scale, 1.0);
  }
}

TEST(DerivedConstants, ThetaEqualsThetaBarOnlyAtHalf) {
  const DerivedConstants d = derived_constants(validate_params(1.3, 0.5));
  EXPECT_DOUBLE_EQ(d.theta, d.theta_bar);
  const DerivedConstants e = derived_constants(validate_params(1.3, 0.55));
  EXPECT_GT(e.theta, e.theta_bar);
}

TEST(CharExponent, Examples) {
  const auto bm = char_exponent(validate_params(2.0, 0.5), 1.0);
  EXPECT_NEAR(bm.real(), -1.0, 1e-15);
  EXPECT_NEAR(bm.imag(), 0.0, 1e-15);
  EXPECT_EQ(char_exponent(validate_params(1.3, 0.4), 0.0), std::complex<double>(0.0, 0.0));
  const auto z = char_exponent(validate_params(1.5, 0.6), -1.0);
  EXPECT_NEAR(z.real(), -0.8910065241883679, 1e-12);
  EXPECT_NEAR(z.imag(), -0.45399049973954675, 1e-12);
  // Hermitian symmetry.
  const auto w = char_exponent(validate_params(1.5, 0.6), 1.0);
  EXPECT_NEAR(w.real(), z.real(), 1e-15);
  EXPECT_NEAR(w.imag(), -z.imag(), 1e-15);
}

std::vector<double> draws(const StableLaw& law, double dt, std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  std::vector<double> v(n);
  for (double& x : v) x = sample_increment(law, dt, rng);
  return v;
}

double positive_fraction(const std::vector<double>& v) {
  return static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x >= 0; })) / v.size();
}

TEST(Sampler, BrownianVariance) {
  const auto v = draws(validate_params(2.0, 0.5), 1.0, 1000000, 11);
  double m2 = 0, m4 = 0;
  for (double x : v) {
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m2 /= v.size();
  m4 /= v.size();
  EXPECT_NEAR(m2, 2.0, 3 * std::sqrt((m4 - m2 * m2) / v.size()));
}

TEST(Sampler, Positivity) {
  for (const auto& [a, r] : std::vector<std::pair<double, double>>{{1.2, 0.55}, {0.8, 0.3}, {1.0, 0.3}, {1.0, 0.8}, {1.9, 0.48}}) {
    const auto v = draws(validate_params(a, r), 1.0, 200000, 12);
    const double se = std::sqrt(r * (1 - r) / v.size());
    EXPECT_NEAR(positive_fraction(v), r, 3 * se) << "alpha=" << a << " rho=" << r;
  }
}

TEST(Sampler, SymmetricMedian) {
  auto v = draws(validate_params(0.8, 0.5), 1.0, 100001, 13);
  std::nth_element(v.begin(), v.begin() + 50000, v.end());
  // The median of a symmetric stable law is 0; the sample median has
  // sd 1 / (2 f(0) sqrt(n)) with f(0) = Gamma(1 + 1/alpha) / pi for unit scale.
  const double f0 = std::tgamma(1 + 1 / 0.8) / pi;
  EXPECT_NEAR(v[50000], 0.0, 4 / (2 * f0 * std::sqrt(100001.0)));
}

TEST(SamplerProperty, EcfMatchesCharExponent) {
  const std::vector<double> lambdas{-2, -1, 1, 2};
  for (const auto& [a, r] : std::vector<std::pair<double, double>>{{2.0, 0.5}, {1.5, 0.6}, {1.0, 0.3}, {0.7, 0.8}}) {
    const StableLaw law = validate_params(a, r);
    const EcfReport rep = ecf_check(draws(law, 1.0, 100000, 21), law, lambdas);
    for (const EcfRow& row : rep.rows) EXPECT_TRUE(row.ok) << "alpha=" << a << " rho=" << r << " lambda=" << row.lambda;
  }
}

TEST(SamplerProperty, SelfSimilarScaling) {
  for (const auto& [a, r] : std::vector<std::pair<double, double>>{{2.0, 0.5}, {1.5, 0.4}, {0.8, 0.7}}) {
    const StableLaw law = validate_params(a, r);
    for (const double dt : {0.01, 100.0}) {
      const auto direct = draws(law, dt, 20000, 31);
      auto scaled = draws(law, 1.0, 20000, 32);
      for (double& x : scaled) x *= std::pow(dt, 1 / a);
      EXPECT_GT(ks_two_sample(direct, scaled).p_value, 0.01) << "alpha=" << a << " dt=" << dt;
    }
  }
}

TEST(Sampler, DeterministicGivenStream) {
  const StableSampler s(validate_params(1.3, 0.45));
  RandomStream a(5, 5);
  RandomStream b(5, 5);
  for (int i = 0; i < 100; ++i) ASSERT_EQ(s.increment(0.1, a), s.increment(0.1, b));
}

TEST(Sampler, ScaleFor) {
  const StableSampler s(validate_params(1.5, 0.5));
  EXPECT_NEAR(s.scale_for(8.0), 4.0, 1e-14);
}

}  // namespace
}  // namespace kolmo
