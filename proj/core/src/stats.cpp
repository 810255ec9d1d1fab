#include "kolmo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kolmo/error.hpp"

namespace kolmo {

double SurvivalCurve::at(double z) const {
  if (censor_level && z >= *censor_level) return std::numeric_limits<double>::quiet_NaN();
  auto it = std::upper_bound(points.begin(), points.end(), z,
                             [](double v, const SurvivalPoint& p) { return v < p.z; });
  if (it == points.begin()) return 1.0;
  return std::prev(it)->p;
}

SurvivalCurve survival_curve(std::span<const double> samples, std::optional<double> censored_at) {
  if (samples.empty()) throw Error(Errc::kInvalidArgument, "survival_curve needs samples");
  SurvivalCurve c;
  c.n_total = samples.size();
  c.censor_level = censored_at;
  std::vector<double> kept;
  kept.reserve(samples.size());
  for (const double v : samples) {
    if (!(v > 0.0)) throw Error(Errc::kInvalidArgument, "samples must be positive");
    if (censored_at && v >= *censored_at) {
      ++c.n_censored;
    } else {
      kept.push_back(v);
    }
  }
  if (kept.empty()) throw Error(Errc::kAllCensored, "every sample is censored");
  std::sort(kept.begin(), kept.end());
  const double n = static_cast<double>(c.n_total);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (i + 1 < kept.size() && kept[i + 1] == kept[i]) continue;
    // Everything after index i, censored samples included, exceeds kept[i].
    const double above = static_cast<double>(kept.size() - i - 1 + c.n_censored);
    c.points.push_back({kept[i], above / n});
  }
  return c;
}

std::string_view to_string(FitMethod m) {
  switch (m) {
    case FitMethod::kLogLogRegression: return "loglog_regression";
    case FitMethod::kHill: return "hill";
  }
  return "?";
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 3) throw Error(Errc::kInvalidArgument, "fit_line needs >= 3 paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0;
  double my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0;
  double sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(Errc::kInvalidArgument, "fit_line needs distinct x values");
  LineFit f;
  f.n = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    rss += r * r;
  }
  f.slope_std_error = std::sqrt(rss / (n - 2.0) / sxx);
  return f;
}

namespace {

// y = b0 + b1 x1 + b2 x2 by centred normal equations; returns coefficients
// and their standard errors.
struct PlaneFit {
  double b1 = 0;
  double b2 = 0;
  double se1 = 0;
  double se2 = 0;
};

PlaneFit fit_plane(const std::vector<double>& x1, const std::vector<double>& x2, const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double m1 = 0;
  double m2 = 0;
  double my = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    m1 += x1[i];
    m2 += x2[i];
    my += y[i];
  }
  m1 /= n;
  m2 /= n;
  my /= n;
  double s11 = 0;
  double s22 = 0;
  double s12 = 0;
  double s1y = 0;
  double s2y = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double a = x1[i] - m1;
    const double b = x2[i] - m2;
    const double c = y[i] - my;
    s11 += a * a;
    s22 += b * b;
    s12 += a * b;
    s1y += a * c;
    s2y += b * c;
  }
  const double det = s11 * s22 - s12 * s12;
  if (!(std::abs(det) > 1e-14 * s11 * s22)) throw Error(Errc::kInvalidArgument, "regressors are collinear");
  PlaneFit f;
  f.b1 = (s22 * s1y - s12 * s2y) / det;
  f.b2 = (s11 * s2y - s12 * s1y) / det;
  double rss = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = (y[i] - my) - f.b1 * (x1[i] - m1) - f.b2 * (x2[i] - m2);
    rss += r * r;
  }
  const double sigma2 = rss / (n - 3.0);
  f.se1 = std::sqrt(sigma2 * s22 / det);
  f.se2 = std::sqrt(sigma2 * s11 / det);
  return f;
}

}  // namespace

TailFit fit_tail(const SurvivalCurve& curve, TailWindow window, const FitOptions& opts) {
  if (!(window.lo > 0.0) || !(window.lo < window.hi)) throw Error(Errc::kInvalidArgument, "window needs 0 < lo < hi");
  if (curve.censor_level && window.hi >= *curve.censor_level) {
    throw Error(Errc::kInvalidArgument, "window reaches the censor level");
  }
  const bool uses_loglog = opts.fit_logpow || opts.pinned_logpow.has_value();
  if (uses_loglog && window.lo <= 1.0) throw Error(Errc::kInvalidArgument, "log-power fits need z_lo > 1");
  std::vector<double> lz;
  std::vector<double> llz;
  std::vector<double> lp;
  for (const SurvivalPoint& pt : curve.points) {
    if (pt.z < window.lo || pt.z > window.hi || !(pt.p > 0.0)) continue;
    lz.push_back(std::log(pt.z));
    llz.push_back(uses_loglog ? std::log(lz.back()) : 0.0);
    lp.push_back(std::log(pt.p));
  }
  if (lz.size() < 20) {
    std::ostringstream os;
    os << "window [" << window.lo << ", " << window.hi << "] holds " << lz.size() << " points, need 20";
    throw Error(Errc::kWindowTooSparse, os.str());
  }
  TailFit fit;
  fit.window = window;
  fit.points = lz.size();
  if (!opts.fit_logpow) {
    const double k = opts.pinned_logpow.value_or(0);
    std::vector<double> y(lp.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = lp[i] - k * llz[i];
    const LineFit f = fit_line(lz, y);
    fit.exponent_hat = -f.slope;
    fit.std_error = f.slope_std_error;
    if (opts.pinned_logpow) fit.logpow_hat = k;
  } else if (opts.pinned_exponent) {
    const double nu = *opts.pinned_exponent;
    std::vector<double> y(lp.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = lp[i] + nu * lz[i];
    const LineFit f = fit_line(llz, y);
    fit.exponent_hat = nu;
    fit.logpow_hat = f.slope;
    fit.logpow_std_error = f.slope_std_error;
  } else {
    const PlaneFit f = fit_plane(lz, llz, lp);
    fit.exponent_hat = -f.b1;
    fit.std_error = f.se1;
    fit.logpow_hat = f.b2;
    fit.logpow_std_error = f.se2;
  }
  return fit;
}

TailWindow default_window(const SurvivalCurve& curve) {
  const std::size_t m = curve.points.size();
  if (m < 12) throw Error(Errc::kWindowTooSparse, "need at least 12 uncensored points for a default window");
  const auto k = static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(curve.n_total), 2.0 / 3.0)));
  const double hi = curve.points[m - 11].z;
  const double lo = std::max(curve.points[m - std::min(k, m)].z, std::exp(1.0));
  if (!(lo < hi)) throw Error(Errc::kWindowTooSparse, "tail window is empty");
  return {lo, hi};
}

TailFit hill_estimate(std::span<const double> samples, std::optional<std::size_t> k) {
  const std::size_t n = samples.size();
  const std::size_t kk = k ? *k : static_cast<std::size_t>(std::ceil(std::pow(static_cast<double>(n), 2.0 / 3.0)));
  if (kk == 0 || kk >= n) throw Error(Errc::kInsufficientData, "hill estimate needs 0 < k < n");
  std::vector<double> v(samples.begin(), samples.end());
  for (const double x : v) {
    if (!(x > 0.0)) throw Error(Errc::kInvalidArgument, "hill estimate needs positive samples");
  }
  // Largest kk + 1 values in descending order.
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(kk), v.end(), std::greater<>());
  const double threshold = v[kk];
  double acc = 0;
  for (std::size_t i = 0; i < kk; ++i) acc += std::log(v[i] / threshold);
  TailFit fit;
  fit.method = FitMethod::kHill;
  fit.points = kk;
  const double xi = acc / static_cast<double>(kk);
  fit.exponent_hat = xi > 0 ? 1.0 / xi : std::numeric_limits<double>::infinity();
  fit.std_error = fit.exponent_hat / std::sqrt(static_cast<double>(kk));
  fit.window = {threshold, *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(kk))};
  return fit;
}

MeanEstimate mean_estimate(std::span<const double> values) {
  if (values.size() < 2) throw Error(Errc::kInsufficientData, "need at least 2 values");
  const double n = static_cast<double>(values.size());
  double sum = 0;
  for (const double v : values) sum += v;
  const double mean = sum / n;
  // Jackknife over leave-one-out means; for the mean this reduces to the
  // usual s / sqrt(n), computed here from the pseudo-values directly.
  double ss = 0;
  for (const double v : values) {
    const double loo = (sum - v) / (n - 1.0);
    ss += (loo - mean) * (loo - mean);
  }
  return {mean, std::sqrt((n - 1.0) / n * ss), values.size()};
}

MellinValue mc_mellin(std::span<const double> samples, double s) {
  MellinValue v;
  v.s = s;
  v.method = MellinMethod::kMonteCarlo;
  if (s == 1.0) {
    v.value = 1.0;
    return v;
  }
  std::vector<double> w;
  w.reserve(samples.size());
  for (const double z : samples) {
    if (!(z > 0.0)) throw Error(Errc::kInvalidArgument, "mc_mellin needs positive samples");
    w.push_back(std::pow(z, s - 1.0));
  }
  const MeanEstimate m = mean_estimate(w);
  v.value = m.mean;
  v.std_error = m.std_error;
  v.error_bound = m.std_error;
  if (w.size() > 8) {
    const TailFit h = hill_estimate(w);
    if (h.exponent_hat < 2.0 + 2.0 * h.std_error) {
      v.nonfinite_variance = true;
      v.error_bound = std::numeric_limits<double>::infinity();
    }
  }
  return v;
}

MeanEstimate mc_log_moment(std::span<const double> samples) {
  std::vector<double> logs;
  logs.reserve(samples.size());
  for (const double z : samples) {
    if (!(z > 0.0)) throw Error(Errc::kInvalidArgument, "log moment needs positive samples");
    logs.push_back(std::log(z));
  }
  return mean_estimate(logs);
}

EcfReport ecf_check(std::span<const double> samples, const StableLaw& law, std::span<const double> lambdas,
                    double sigmas) {
  if (samples.size() < 10000) throw Error(Errc::kInsufficientData, "ecf_check needs at least 10^4 samples");
  EcfReport rep;
  rep.sigmas = sigmas;
  const double n = static_cast<double>(samples.size());
  for (const double lam : lambdas) {
    double sc = 0;
    double ss = 0;
    double sc2 = 0;
    double ss2 = 0;
    for (const double z : samples) {
      const double c = std::cos(lam * z);
      const double s = std::sin(lam * z);
      sc += c;
      ss += s;
      sc2 += c * c;
      ss2 += s * s;
    }
    EcfRow row;
    row.lambda = lam;
    row.empirical = {sc / n, ss / n};
    row.target = std::exp(char_exponent(law, lam));
    row.se_re = std::sqrt(std::max(0.0, sc2 / n - row.empirical.real() * row.empirical.real()) / n);
    row.se_im = std::sqrt(std::max(0.0, ss2 / n - row.empirical.imag() * row.empirical.imag()) / n);
    const double dre = std::abs(row.empirical.real() - row.target.real());
    const double dim = std::abs(row.empirical.imag() - row.target.imag());
    // A zero standard error (lambda = 0) demands agreement to rounding.
    const double tol = 1e-12;
    row.ok = dre <= sigmas * row.se_re + tol && dim <= sigmas * row.se_im + tol;
    rep.all_ok = rep.all_ok && row.ok;
    rep.rows.push_back(row);
  }
  return rep;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(Errc::kInsufficientData, "KS test needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  KsResult r;
  r.statistic = d;
  const double ne = std::sqrt(na * nb / (na + nb));
  const double lam = (ne + 0.12 + 0.11 / ne) * d;
  // Kolmogorov distribution tail: 2 sum (-1)^(k-1) exp(-2 k^2 lam^2).
  if (lam < 0.2) {
    r.p_value = 1.0;
  } else {
    double sum = 0;
    for (int k = 1; k <= 100; ++k) {
      const double term = std::exp(-2.0 * k * k * lam * lam);
      sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
      if (term < 1e-16) break;
    }
    r.p_value = std::clamp(2.0 * sum, 0.0, 1.0);
  }
  return r;
}

}  // namespace kolmo
