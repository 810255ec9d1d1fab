#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kolmo/path_sim.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/stable_core.hpp"

namespace kolmo {

// State of the half-winding chain after n hits, in log domain:
// log_t = log T0^(n), log_l = log |L at T0^(n)|. next_sign is the start sign
// of the return law feeding the next hit (+1 after an upward crossing).
struct CascadeState {
  std::int64_t n = 0;
  double log_t = 0;
  double log_l = 0;
  int next_sign = 1;
};

// i.i.d. first returns from (0, sign). Only uncensored draws are kept; logs
// are cached because the cascade works in log domain.
class ReturnPool {
 public:
  ReturnPool() = default;
  explicit ReturnPool(int sign);

  // Censored samples are counted and dropped. Throws Error{kInvalidArgument}
  // on a sign mismatch or a non-positive ell.
  void add(const ReturnSample& s);

  int sign() const { return sign_; }
  std::size_t size() const { return tau_.size(); }
  bool empty() const { return tau_.empty(); }
  std::size_t censored_count() const { return censored_; }
  double censored_fraction() const;

  std::span<const double> tau() const { return tau_; }
  std::span<const double> ell() const { return ell_; }
  std::span<const double> log_tau() const { return log_tau_; }
  std::span<const double> log_ell() const { return log_ell_; }
  ReturnSample at(std::size_t i) const;

 private:
  int sign_ = -1;
  std::vector<double> tau_;
  std::vector<double> ell_;
  std::vector<double> log_tau_;
  std::vector<double> log_ell_;
  std::size_t censored_ = 0;
};

// Numerically stable log(e^a + e^b).
double log_add(double a, double b);

CascadeState cascade_start(const ReturnSample& start);

// T' = T + |L|^alpha tau, |L'| = |L| ell, computed in log domain.
// Throws Error{kParityMismatch} when draw.start_sign != state.next_sign,
// Error{kCensoredDraw} for censored draws and Error{kInvalidDraw} when
// ell = 0 or the state carries log_l = -inf.
CascadeState cascade_step(const CascadeState& state, const ReturnSample& draw, double alpha);

// Same update from cached logs, without the validation.
inline CascadeState cascade_step_log(const CascadeState& s, double log_tau, double log_ell, double alpha) {
  return {s.n + 1, log_add(s.log_t, alpha * s.log_l + log_tau), s.log_l + log_ell, -s.next_sign};
}

struct ReturnPools {
  ReturnPool minus{-1};
  ReturnPool plus{1};

  const ReturnPool& for_sign(int sign) const { return sign < 0 ? minus : plus; }
};

enum class DrawMode { kBootstrap, kLive };

struct CascadeConfig {
  DrawMode mode = DrawMode::kBootstrap;
  // Used only in kLive mode.
  DtPolicy policy;
  double horizon_cap = 1e18;
};

// States for n = 1..n_max; entry 0 echoes `start`.
// Throws Error{kEmptyPool} when a needed pool is empty in bootstrap mode.
std::vector<CascadeState> run_cascade(const StableLaw& law, const ReturnPools& pools, const ReturnSample& start,
                                      std::int64_t n_max, RandomStream& rng, const CascadeConfig& cfg = {});

struct KappaEstimate {
  double kappa_hat = 0;
  double std_error = 0;
  double velocity_hat = 0;
  std::size_t cascades = 0;
  std::int64_t n_max = 0;
};

// kappa_hat = mean over cascades of log T0^(n_max) / n_max.
// Throws Error{kInsufficientData} for fewer than 30 cascades, n_max < 10,
// or ragged cascades.
KappaEstimate estimate_kappa(std::span<const std::vector<CascadeState>> cascades);

struct PoolOptions {
  std::size_t size_per_sign = 10000;
  DtPolicy policy;
  double horizon_cap = 1e18;
  std::uint64_t seed = 0;
  unsigned workers = 1;
};

struct PoolBuild {
  ReturnPools pools;
  // Every draw made, censored ones included, in index order.
  std::vector<ReturnSample> minus_draws;
  std::vector<ReturnSample> plus_draws;
};

// Draw i of sign s uses stream (seed, kReturnMinus/kReturnPlus, i), and the
// first size_per_sign uncensored draws are kept, so pools do not depend on
// the worker count. Throws Error{kCensoredDraw} if more than half of the
// draws are censored.
PoolBuild build_pools(const StableLaw& law, const PoolOptions& opts);

// `count` first returns from `start`, draw i on stream (seed, kGeneralStart, i).
std::vector<ReturnSample> sample_starts(const StableLaw& law, const PlaneState& start, std::size_t count,
                                        const PoolOptions& opts);

// Cascade i starts from starts[i % starts.size()] and draws on stream
// (seed, kCascade, i). Censored starts are skipped (the next start is used).
std::vector<std::vector<CascadeState>> run_cascades(const StableLaw& law, const ReturnPools& pools,
                                                    std::span<const ReturnSample> starts, std::size_t count,
                                                    std::int64_t n_max, std::uint64_t seed, unsigned workers);

}  // namespace kolmo
