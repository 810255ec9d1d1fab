#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kolmo/stable_core.hpp"
#include "kolmo/theory.hpp"

namespace kolmo {

struct SurvivalPoint {
  double z = 0;
  double p = 0;  // P[Z > z]
};

// Right-continuous empirical survival function. Samples at or above the
// censor level count toward n_total and n_censored but never produce a point.
struct SurvivalCurve {
  std::vector<SurvivalPoint> points;  // one per distinct uncensored value, z increasing
  std::size_t n_total = 0;
  std::size_t n_censored = 0;
  std::optional<double> censor_level;

  // P-hat(z); NaN at or beyond the censor level.
  double at(double z) const;
};

// Throws Error{kInvalidArgument} for empty or non-positive samples and
// Error{kAllCensored} when every sample is censored.
SurvivalCurve survival_curve(std::span<const double> samples, std::optional<double> censored_at = {});

struct TailWindow {
  double lo = 0;
  double hi = 0;
};

enum class FitMethod { kLogLogRegression, kHill };
std::string_view to_string(FitMethod m);

struct FitOptions {
  bool fit_logpow = false;
  // With fit_logpow, pins the exponent and regresses log(P z^nu) on log log z.
  std::optional<double> pinned_exponent;
  // Without fit_logpow, regresses log P - k log log z on log z, i.e. fits
  // the exponent of z^-nu (log z)^k with k fixed.
  std::optional<int> pinned_logpow;
};

struct TailFit {
  double exponent_hat = 0;
  std::optional<double> logpow_hat;
  double std_error = 0;  // of exponent_hat; 0 when pinned
  std::optional<double> logpow_std_error;
  TailWindow window;
  FitMethod method = FitMethod::kLogLogRegression;
  std::size_t points = 0;
};

// Least squares of log P-hat against log z (and log log z with fit_logpow)
// over the curve points inside the window. Standard errors come from the
// regression residuals; neighbouring survival points are correlated, so
// they understate the sampling error.
// Throws Error{kWindowTooSparse} below 20 points, Error{kInvalidArgument}
// for an empty window, one reaching the censor level, or any fit involving
// log log z with z_lo <= 1.
TailFit fit_tail(const SurvivalCurve& curve, TailWindow window, const FitOptions& opts = {});

// From the k-th largest sample, k = ceil(n^(2/3)) with n counting censored
// samples, up to the 11th largest uncensored one; the lower end is at
// least e so that log log z fits are defined. Throws
// Error{kWindowTooSparse} when fewer than 12 uncensored points exist or
// the window is empty.
TailWindow default_window(const SurvivalCurve& curve);

// Hill estimator on the k largest samples, k = ceil(n^(2/3)) by default.
// std_error = exponent / sqrt(k). Throws Error{kInsufficientData} when
// k >= n.
TailFit hill_estimate(std::span<const double> samples, std::optional<std::size_t> k = {});

// Sample mean of z^(s-1) with a jackknife standard error. s = 1 returns
// exactly 1 with zero error. When a Hill estimate on the transformed values
// cannot exclude a tail index below 2 the variance is flagged as infinite:
// nonfinite_variance is set, error_bound is +inf and std_error keeps the
// (then unreliable) jackknife value.
MellinValue mc_mellin(std::span<const double> samples, double s);

struct MeanEstimate {
  double mean = 0;
  double std_error = 0;
  std::size_t n = 0;
};

MeanEstimate mean_estimate(std::span<const double> values);
MeanEstimate mc_log_moment(std::span<const double> samples);

struct EcfRow {
  double lambda = 0;
  std::complex<double> empirical;
  std::complex<double> target;
  double se_re = 0;
  double se_im = 0;
  bool ok = true;  // both parts within `sigmas` standard errors
};

struct EcfReport {
  std::vector<EcfRow> rows;
  double sigmas = 3;
  bool all_ok = true;
};

// Compares the empirical mean of e^(i lambda z) with exp(char_exponent).
// Throws Error{kInsufficientData} below 10^4 samples.
EcfReport ecf_check(std::span<const double> samples, const StableLaw& law, std::span<const double> lambdas,
                    double sigmas = 3.0);

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct LineFit {
  double intercept = 0;
  double slope = 0;
  double slope_std_error = 0;
  std::size_t n = 0;
};

// Ordinary least squares y = intercept + slope x. Needs at least 3 points.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace kolmo
