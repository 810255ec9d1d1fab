#include "kolmo/lab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kolmo/error.hpp"
#include "kolmo/parallel.hpp"

namespace kolmo::lab {

using std::numbers::pi;

Identities identity_residuals(const StableLaw& law) {
  const DerivedConstants d = derived_constants(law);
  const double a = law.alpha;
  Identities r;
  r.velocity_times_kappa = d.velocity() * d.kappa() + pi;
  r.gamma_sum = d.gamma + d.gamma_bar - a / (1.0 + a);
  r.kappa_from_log_moments = 0.5 * a * (log_moment_ell(law, -1) + log_moment_ell(law, 1)) - d.kappa();
  r.density_exponent = density_tail_exponents(law).at_zero - 1.0 / (1.0 - d.gamma);
  return r;
}

IdentityAudit audit_identities(int side) {
  IdentityAudit audit;
  auto track = [](double& acc, double v) { acc = std::max(acc, std::abs(v)); };
  for (int i = 1; i <= side; ++i) {
    const double alpha = 2.0 * i / side;
    const double lo = alpha > 1.0 ? 1.0 - 1.0 / alpha : 0.0;
    const double hi = alpha > 1.0 ? 1.0 / alpha : 1.0;
    for (int j = 1; j <= side; ++j) {
      const double rho = alpha == 2.0 ? 0.5 : lo + (hi - lo) * j / (side + 1.0);
      const Identities r = identity_residuals(validate_params(alpha, rho));
      track(audit.max_abs.velocity_times_kappa, r.velocity_times_kappa);
      track(audit.max_abs.gamma_sum, r.gamma_sum);
      track(audit.max_abs.kappa_from_log_moments, r.kappa_from_log_moments);
      track(audit.max_abs.density_exponent, r.density_exponent);
      ++audit.laws;
    }
  }
  return audit;
}

std::vector<double> draw_unit_samples(const StableLaw& law, std::size_t n, std::uint64_t seed, unsigned workers) {
  constexpr std::size_t kChunk = 4096;
  std::vector<double> out(n);
  const StableSampler sampler(law);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, workers, [&](std::size_t j) {
    RandomStream rng = make_stream(seed, StreamDomain::kSampler, j);
    const std::size_t end = std::min(n, (j + 1) * kChunk);
    for (std::size_t i = j * kChunk; i < end; ++i) out[i] = sampler.unit(rng);
  });
  return out;
}

SamplerValidation validate_sampler(const SamplerParams& p) {
  const std::vector<double> xs = draw_unit_samples(p.law, p.samples, p.seed, p.workers);
  SamplerValidation v;
  v.ecf = ecf_check(xs, p.law, p.lambdas);
  const double n = static_cast<double>(xs.size());
  const auto positive = static_cast<double>(std::count_if(xs.begin(), xs.end(), [](double x) { return x >= 0.0; }));
  v.positive_fraction = positive / n;
  v.positive_se = std::sqrt(p.law.rho * (1.0 - p.law.rho) / n);
  if (p.law.alpha == 2.0) {
    double m2 = 0;
    double m4 = 0;
    for (const double x : xs) {
      m2 += x * x;
      m4 += x * x * x * x;
    }
    m2 /= n;
    m4 /= n;
    v.variance = m2;
    v.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  }
  return v;
}

namespace {

SignStudy study_sign(const StableLaw& law, const ReturnPool& pool, const std::vector<double>& s_values) {
  SignStudy st;
  st.sign = pool.sign();
  st.kept = pool.size();
  st.censored = pool.censored_count();
  st.censored_fraction = pool.censored_fraction();
  st.log_moment = mean_estimate(pool.log_ell());
  st.log_moment_theory = log_moment_ell(law, pool.sign());
  for (const double s : s_values) st.mellin.push_back({mc_mellin(pool.ell(), s), mellin_ell(law, pool.sign(), s)});
  return st;
}

}  // namespace

ReturnStudy study_returns(const StableLaw& law, const ReturnPools& pools, const std::vector<double>& s_values) {
  return {study_sign(law, pools.minus, s_values), study_sign(law, pools.plus, s_values)};
}

TheoremAResult theorem_a(const StableLaw& law, const ReturnPools& pools, const TheoremAParams& p) {
  TheoremAResult r;
  const DerivedConstants d = derived_constants(law);
  r.kappa_theory = d.kappa();
  r.velocity_theory = d.velocity();
  r.log_l_rate_theory = 0.5 * (log_moment_ell(law, -1) + log_moment_ell(law, 1));

  std::vector<ReturnSample> starts;
  if (p.start == CascadeStart::kPool) {
    const std::size_t m = std::min(pools.minus.size(), p.cascades);
    for (std::size_t i = 0; i < m; ++i) starts.push_back(pools.minus.at(i));
  } else {
    starts = sample_starts(law, p.start_point, p.cascades, p.start_options);
  }
  r.cascades = run_cascades(law, pools, starts, p.cascades, p.n_max, p.seed, p.workers);
  r.estimate = estimate_kappa(r.cascades);
  std::vector<double> rates;
  rates.reserve(r.cascades.size());
  for (const auto& c : r.cascades) rates.push_back(c.back().log_l / static_cast<double>(c.back().n));
  r.log_l_rate = mean_estimate(rates);
  return r;
}

namespace {

TailStudy study_tail(const StableLaw& law, int n, Region region, const std::vector<double>& values,
                     std::optional<double> censor) {
  TailStudy t;
  t.n = n;
  t.predicted = theorem_b_prediction(law, n, region);
  t.curve = survival_curve(values, censor);
  t.samples = t.curve.n_total;
  t.censored = t.curve.n_censored;
  t.window = default_window(t.curve);
  t.free_fit = fit_tail(t.curve, t.window);
  FitOptions pin_logpow;
  pin_logpow.pinned_logpow = t.predicted.logpow;
  t.exponent_fit = fit_tail(t.curve, t.window, pin_logpow);
  FitOptions pin_exponent;
  pin_exponent.fit_logpow = true;
  pin_exponent.pinned_exponent = t.predicted.exponent;
  t.logpow_fit = fit_tail(t.curve, t.window, pin_exponent);
  return t;
}

}  // namespace

TheoremBResult theorem_b(const StableLaw& law, const ReturnPools* pools, const TheoremBParams& p) {
  if (p.ns.empty()) throw Error(Errc::kInvalidArgument, "theorem_b needs at least one n");
  const Region region = p.start.region();
  if (region == Region::kOrigin) throw Error(Errc::kInvalidArgument, "start must differ from the origin");
  TheoremBResult r;
  r.starts = sample_starts(law, p.start, p.paths, p.start_options);
  const int n_max = *std::max_element(p.ns.begin(), p.ns.end());
  if (n_max < 1) throw Error(Errc::kInvalidArgument, "n must be >= 1");

  std::vector<std::vector<CascadeState>> cascades;
  if (n_max >= 2) {
    if (pools == nullptr) throw Error(Errc::kEmptyPool, "n >= 2 needs return pools");
    std::vector<ReturnSample> usable;
    for (const ReturnSample& s : r.starts) {
      if (!s.censored) usable.push_back(s);
    }
    cascades = run_cascades(law, *pools, usable, usable.size(), n_max, p.cascade_seed, p.start_options.workers);
  }
  for (const int n : p.ns) {
    std::vector<double> values;
    std::optional<double> censor;
    if (n == 1) {
      for (const ReturnSample& s : r.starts) values.push_back(s.tau);
      censor = p.start_options.horizon_cap;
    } else {
      // exp overflows past log T ~ 709; such values sit far above any
      // fitting window and are only counted.
      for (const auto& c : cascades) values.push_back(std::exp(std::min(c[static_cast<std::size_t>(n - 1)].log_t, 700.0)));
      censor = std::exp(700.0);
    }
    r.tails.push_back(study_tail(law, n, region, values, censor));
  }
  return r;
}

HarmonicResult harmonic_study(const StableLaw& law, const HarmonicParams& p) {
  HarmonicResult r;
  std::vector<double> ells;
  if (p.mc_samples > 0) {
    const std::vector<ReturnSample> draws = sample_starts(law, p.start, p.mc_samples, p.start_options);
    for (const ReturnSample& s : draws) {
      if (s.censored || !s.ell) {
        ++r.mc_censored;
      } else {
        ells.push_back(*s.ell);
      }
    }
  }
  for (const double s : p.s_values) {
    HarmonicRow row;
    row.s = s;
    row.quadrature = harmonic_mellin(law, p.start, s, p.quad);
    if (p.start.x == 0.0 && p.start.y < 0.0) {
      // Scaling: from (0, y) the exit speed is |y| times the one from (0, -1).
      MellinValue c = mellin_ell(law, -1, s);
      c.value *= std::pow(-p.start.y, s - 1.0);
      row.closed = c;
    }
    if (!ells.empty()) row.mc = mc_mellin(ells, s);
    r.rows.push_back(row);
  }
  return r;
}

LemmaCase lemma_case(TailClass x, TailClass y, double z_lo, double z_hi, std::size_t points) {
  if (points < 3 || !(z_lo > 1.0) || !(z_hi > z_lo)) throw Error(Errc::kInvalidArgument, "lemma_case needs 1 < z_lo < z_hi and >= 3 points");
  LemmaCase c;
  c.x = x;
  c.y = y;
  c.predicted = tail_product_predict(x, y);
  const double l0 = std::log(z_lo);
  const double l1 = std::log(z_hi);
  for (std::size_t i = 0; i < points; ++i) c.z.push_back(std::exp(l0 + (l1 - l0) * i / (points - 1.0)));
  c.tail = tail_product_oracle(TailSpec::power_log(x.exponent, x.logpow), TailSpec::power_log(y.exponent, y.logpow), c.z);
  std::vector<double> lz;
  std::vector<double> llz;
  std::vector<double> lp;
  std::vector<double> lpz;
  for (std::size_t i = 0; i < points; ++i) {
    lz.push_back(std::log(c.z[i]));
    llz.push_back(std::log(lz.back()));
    lp.push_back(std::log(c.tail.survival[i]));
    lpz.push_back(lp.back() + c.predicted.exponent * lz.back());
  }
  c.loglog = fit_line(lz, lp);
  c.logfactor = fit_line(llz, lpz);
  return c;
}

PathAudit audit_paths(const StableLaw& law, const PathAuditParams& p) {
  std::vector<PathAudit> per(p.paths);
  parallel_for(p.paths, p.workers, [&](std::size_t i) {
    RandomStream rng = make_stream(p.seed, StreamDomain::kPath, i);
    const PathRecord rec = simulate_path(law, p.start, p.horizon, p.policy, rng);
    PathAudit& a = per[i];
    a.paths = 1;
    a.hits = rec.hits.size();
    a.steps = rec.steps;
    a.truncated = rec.truncation ? 1 : 0;
    int expected = -region_sign(p.start.region());
    double last_time = 0;
    for (const HitRecord& h : rec.hits) {
      const int speed_sign = h.speed > 0 ? 1 : (h.speed < 0 ? -1 : 0);
      if (speed_sign != expected || h.sign != expected) ++a.alternation_violations;
      expected = -expected;
      if (!(h.time > last_time)) ++a.monotone_violations;
      last_time = h.time;
    }
    std::size_t k = 0;
    for (std::size_t j = 0; j < rec.grid.size(); ++j) {
      while (k < rec.hits.size() && rec.hits[k].time <= rec.grid[j].t) ++k;
      const double gap = std::abs(rec.omega[j] + pi * static_cast<double>(k));
      a.max_winding_gap = std::max(a.max_winding_gap, gap);
      if (!(gap < 2.0 * pi)) ++a.winding_violations;
    }
  });
  PathAudit total;
  for (const PathAudit& a : per) {
    total.paths += a.paths;
    total.hits += a.hits;
    total.steps += a.steps;
    total.truncated += a.truncated;
    total.alternation_violations += a.alternation_violations;
    total.monotone_violations += a.monotone_violations;
    total.winding_violations += a.winding_violations;
    total.max_winding_gap = std::max(total.max_winding_gap, a.max_winding_gap);
  }
  return total;
}

namespace {

// Linear interpolation of X on the recorded grid.
double x_at(const PathRecord& r, double t) {
  const auto it = std::lower_bound(r.grid.begin(), r.grid.end(), t, [](const GridPoint& g, double v) { return g.t < v; });
  if (it == r.grid.begin()) return it->x;
  if (it == r.grid.end()) return r.grid.back().x;
  const auto prev = it - 1;
  return prev->x + (it->x - prev->x) * (t - prev->t) / (it->t - prev->t);
}

// Accumulated Euler X-error bound sum dt |Delta L| up to time t.
double x_error_until(const PathRecord& r, double t) {
  double e = 0;
  for (std::size_t i = 1; i < r.grid.size() && r.grid[i].t <= t; ++i)
    e += (r.grid[i].t - r.grid[i - 1].t) * std::abs(r.grid[i].l - r.grid[i - 1].l);
  return e;
}

}  // namespace

RefinementAudit audit_refinement(const StableLaw& law, const PlaneState& start, double dt0, double horizon,
                                 std::size_t pairs, std::uint64_t seed) {
  DtPolicy coarse;
  coarse.mode = DtPolicy::Mode::kFixed;
  coarse.adaptive = false;
  coarse.dt0 = dt0;
  DtPolicy fine = coarse;
  fine.dt0 = 0.5 * dt0;
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt0));
  const StableSampler sampler(law);
  SimulateOptions opts;
  opts.max_hits = 1;
  RefinementAudit audit;
  for (std::size_t i = 0; i < pairs; ++i) {
    RandomStream rng = make_stream(seed, StreamDomain::kMisc, i);
    // Two spare coarse steps absorb round-off in the accumulated time.
    std::vector<double> fine_inc(2 * steps + 4);
    for (double& v : fine_inc) v = sampler.increment(fine.dt0, rng);
    std::vector<double> coarse_inc(steps + 2);
    for (std::size_t j = 0; j < coarse_inc.size(); ++j) coarse_inc[j] = fine_inc[2 * j] + fine_inc[2 * j + 1];
    const PathRecord rc = simulate_path(law, start, steps * dt0, coarse, sequence_source(coarse_inc), opts);
    const PathRecord rf = simulate_path(law, start, steps * dt0, fine, sequence_source(fine_inc), opts);
    ++audit.pairs;
    if (rc.hits.empty() || rf.hits.empty()) {
      const double t = rc.hits.empty() ? (rf.hits.empty() ? horizon : rf.hits.front().time) : rc.hits.front().time;
      if (t < 0.9 * horizon) ++audit.unmatched;
      continue;
    }
    ++audit.compared;
    const HitRecord& hc = rc.hits.front();
    const HitRecord& hf = rf.hits.front();
    const double ratio = std::abs(hc.time - hf.time) / (hc.time_tolerance + hf.time_tolerance);
    if (ratio <= 1.0) {
      audit.max_gap_ratio = std::max(audit.max_gap_ratio, ratio);
      continue;
    }
    // A graze: the run that has not crossed yet is within the combined
    // discretisation error of zero at the other run's crossing.
    const double t_early = std::min(hc.time, hf.time);
    const PathRecord& later = hc.time > hf.time ? rc : rf;
    const double slack = x_error_until(rc, t_early) + x_error_until(rf, t_early);
    if (std::abs(x_at(later, t_early)) <= slack) {
      ++audit.grazes;
    } else {
      ++audit.violations;
      audit.max_gap_ratio = std::max(audit.max_gap_ratio, ratio);
    }
  }
  return audit;
}

}  // namespace kolmo::lab
