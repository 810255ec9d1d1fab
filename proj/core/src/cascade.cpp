#include "kolmo/cascade.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "kolmo/error.hpp"
#include "kolmo/parallel.hpp"

namespace kolmo {

ReturnPool::ReturnPool(int sign) : sign_(sign) {
  if (sign != 1 && sign != -1) throw Error(Errc::kInvalidArgument, "pool sign must be +1 or -1");
}

void ReturnPool::add(const ReturnSample& s) {
  if (s.start_sign != sign_) throw Error(Errc::kInvalidArgument, "sample sign does not match pool");
  if (s.censored || !s.ell) {
    ++censored_;
    return;
  }
  if (!(*s.ell > 0.0) || !(s.tau > 0.0)) throw Error(Errc::kInvalidArgument, "return sample must be positive");
  tau_.push_back(s.tau);
  ell_.push_back(*s.ell);
  log_tau_.push_back(std::log(s.tau));
  log_ell_.push_back(std::log(*s.ell));
}

double ReturnPool::censored_fraction() const {
  const double total = static_cast<double>(size() + censored_);
  return total > 0 ? static_cast<double>(censored_) / total : 0.0;
}

ReturnSample ReturnPool::at(std::size_t i) const {
  ReturnSample s;
  s.start_sign = sign_;
  s.tau = tau_.at(i);
  s.ell = ell_.at(i);
  return s;
}

double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

CascadeState cascade_start(const ReturnSample& start) {
  if (start.censored || !start.ell) throw Error(Errc::kCensoredDraw, "cascade start is censored");
  if (!(*start.ell > 0.0)) throw Error(Errc::kInvalidDraw, "cascade start has ell = 0");
  return {1, std::log(start.tau), std::log(*start.ell), -start.start_sign};
}

CascadeState cascade_step(const CascadeState& state, const ReturnSample& draw, double alpha) {
  if (draw.start_sign != state.next_sign) {
    std::ostringstream os;
    os << "state n=" << state.n << " needs a draw from sign " << state.next_sign << ", got " << draw.start_sign;
    throw Error(Errc::kParityMismatch, os.str());
  }
  if (draw.censored || !draw.ell) throw Error(Errc::kCensoredDraw, "censored draw");
  if (!(*draw.ell > 0.0) || !(draw.tau > 0.0)) throw Error(Errc::kInvalidDraw, "draw must have tau, ell > 0");
  if (!std::isfinite(state.log_l)) throw Error(Errc::kInvalidDraw, "state has |L| = 0");
  return cascade_step_log(state, std::log(draw.tau), std::log(*draw.ell), alpha);
}

std::vector<CascadeState> run_cascade(const StableLaw& law, const ReturnPools& pools, const ReturnSample& start,
                                      std::int64_t n_max, RandomStream& rng, const CascadeConfig& cfg) {
  if (n_max < 1) throw Error(Errc::kInvalidArgument, "n_max must be >= 1");
  std::vector<CascadeState> out;
  out.reserve(static_cast<std::size_t>(n_max));
  out.push_back(cascade_start(start));
  if (cfg.mode == DrawMode::kBootstrap && n_max > 1) {
    if (pools.minus.empty() || pools.plus.empty()) throw Error(Errc::kEmptyPool, "cascade needs both pools");
  }
  const double alpha = law.alpha;
  while (static_cast<std::int64_t>(out.size()) < n_max) {
    const CascadeState& s = out.back();
    if (cfg.mode == DrawMode::kBootstrap) {
      const ReturnPool& pool = pools.for_sign(s.next_sign);
      const std::size_t i = rng.below(pool.size());
      out.push_back(cascade_step_log(s, pool.log_tau()[i], pool.log_ell()[i], alpha));
    } else {
      ReturnSample draw;
      do {
        draw = sample_return(law, s.next_sign, cfg.policy, cfg.horizon_cap, rng);
      } while (draw.censored);
      out.push_back(cascade_step(s, draw, alpha));
    }
  }
  return out;
}

KappaEstimate estimate_kappa(std::span<const std::vector<CascadeState>> cascades) {
  if (cascades.size() < 30) throw Error(Errc::kInsufficientData, "need at least 30 cascades");
  const std::size_t len = cascades.front().size();
  if (len < 10) throw Error(Errc::kInsufficientData, "need n_max >= 10");
  double sum = 0;
  double sum2 = 0;
  for (const auto& c : cascades) {
    if (c.size() != len) throw Error(Errc::kInsufficientData, "cascades must share n_max");
    const CascadeState& last = c.back();
    const double rate = last.log_t / static_cast<double>(last.n);
    sum += rate;
    sum2 += rate * rate;
  }
  const double m = static_cast<double>(cascades.size());
  KappaEstimate est;
  est.cascades = cascades.size();
  est.n_max = cascades.front().back().n;
  est.kappa_hat = sum / m;
  const double var = std::max(0.0, (sum2 - m * est.kappa_hat * est.kappa_hat) / (m - 1.0));
  est.std_error = std::sqrt(var / m);
  est.velocity_hat = -std::numbers::pi / est.kappa_hat;
  return est;
}

namespace {

std::vector<ReturnSample> draw_returns(const StableLaw& law, int sign, const PoolOptions& opts, ReturnPool& pool) {
  const StreamDomain domain = sign < 0 ? StreamDomain::kReturnMinus : StreamDomain::kReturnPlus;
  std::vector<ReturnSample> all;
  std::size_t next = 0;
  while (pool.size() < opts.size_per_sign) {
    const std::size_t missing = opts.size_per_sign - pool.size();
    const std::size_t batch = missing + missing / 50 + 16;
    std::vector<ReturnSample> fresh(batch);
    parallel_for(batch, opts.workers, [&](std::size_t i) {
      RandomStream rng = make_stream(opts.seed, domain, next + i);
      fresh[i] = sample_return(law, sign, opts.policy, opts.horizon_cap, rng);
    });
    next += batch;
    for (const ReturnSample& r : fresh) {
      if (pool.size() == opts.size_per_sign) break;
      all.push_back(r);
      pool.add(r);
    }
    if (pool.censored_count() > pool.size() + 16) {
      std::ostringstream os;
      os << "more than half of the sign " << sign << " returns are censored at cap " << opts.horizon_cap;
      throw Error(Errc::kCensoredDraw, os.str());
    }
  }
  return all;
}

}  // namespace

PoolBuild build_pools(const StableLaw& law, const PoolOptions& opts) {
  if (opts.size_per_sign == 0) throw Error(Errc::kInvalidArgument, "pool size must be positive");
  PoolBuild b;
  b.minus_draws = draw_returns(law, -1, opts, b.pools.minus);
  b.plus_draws = draw_returns(law, 1, opts, b.pools.plus);
  return b;
}

std::vector<ReturnSample> sample_starts(const StableLaw& law, const PlaneState& start, std::size_t count,
                                        const PoolOptions& opts) {
  std::vector<ReturnSample> out(count);
  parallel_for(count, opts.workers, [&](std::size_t i) {
    RandomStream rng = make_stream(opts.seed, StreamDomain::kGeneralStart, i);
    out[i] = sample_first_return(law, start, opts.policy, opts.horizon_cap, rng);
  });
  return out;
}

std::vector<std::vector<CascadeState>> run_cascades(const StableLaw& law, const ReturnPools& pools,
                                                    std::span<const ReturnSample> starts, std::size_t count,
                                                    std::int64_t n_max, std::uint64_t seed, unsigned workers) {
  std::vector<const ReturnSample*> usable;
  for (const ReturnSample& s : starts) {
    if (!s.censored && s.ell) usable.push_back(&s);
  }
  if (usable.empty()) throw Error(Errc::kCensoredDraw, "no uncensored cascade start");
  std::vector<std::vector<CascadeState>> out(count);
  parallel_for(count, workers, [&](std::size_t i) {
    RandomStream rng = make_stream(seed, StreamDomain::kCascade, i);
    out[i] = run_cascade(law, pools, *usable[i % usable.size()], n_max, rng);
  });
  return out;
}

}  // namespace kolmo
