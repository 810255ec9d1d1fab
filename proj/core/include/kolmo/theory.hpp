#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "kolmo/path_sim.hpp"
#include "kolmo/stable_core.hpp"

namespace kolmo {

// Survival shape z^-exponent (log z)^logpow, up to bounded constants.
struct TailClass {
  double exponent = 0;
  int logpow = 0;

  friend bool operator==(const TailClass&, const TailClass&) = default;
};

enum class MellinMethod { kClosedForm, kQuadrature, kMonteCarlo };
std::string_view to_string(MellinMethod m);

struct MellinValue {
  double s = 0;
  double value = 0;
  MellinMethod method = MellinMethod::kClosedForm;
  double error_bound = 0;
  // Monte Carlo only: jackknife standard error, finite even when the
  // variance is flagged as infinite (error_bound is then +inf).
  double std_error = 0;
  bool nonfinite_variance = false;
};

// gamma for sign -1, gamma_bar for sign +1.
double gamma_for_sign(const StableLaw& law, int sign);

// E[ell^(s-1)] for ell = ell^-(sign -1) or ell^+ (sign +1):
// sin(pi g s) / sin(pi (1 - g) s). Defined on |s| < 1/(1 - g), with the
// value g/(1 - g) at s = 0. Throws Error{kOutsideStrip} otherwise and
// Error{kDegenerate} for rho in {0, 1}.
MellinValue mellin_ell(const StableLaw& law, int sign, double s);

// E[log ell] = pi cot(pi g).
double log_moment_ell(const StableLaw& law, int sign);

// Density of |L_T0|: f(z) ~ c1 z^at_zero as z -> 0 and f(z) ~ c2 z^-at_infinity
// as z -> inf, with at_zero = alpha theta / gamma = 1 / (1 - gamma) and
// at_infinity = alpha theta + 1. The constants are not known.
struct DensityExponents {
  double at_zero = 0;
  double at_infinity = 0;
};

DensityExponents density_tail_exponents(const StableLaw& law);

// Tail class of P[T0^(n) > t] from a start in `region`.
TailClass theorem_b_prediction(const StableLaw& law, int n, Region region);

// Tail class of a product of independent variables with classes x and y.
// Arguments are ordered internally, so the result is symmetric.
TailClass tail_product_predict(TailClass x, TailClass y);

// Class of the k-th summand of T0^(n) (S_1 = T0, S_k = |L_T0|^alpha tau
// prod ell^alpha), obtained by folding tail_product_predict over its
// independent factors.
TailClass summand_tail_class(const StableLaw& law, int k, Region region);

// Same prediction as theorem_b_prediction, rebuilt as the heaviest summand
// class among S_1..S_n.
TailClass folded_prediction(const StableLaw& law, int n, Region region);

// Exact survival function on (0, inf): either a point mass at `z0`, or
// S(z) = 1 for z <= z0 and C z^-nu (log z)^n above, with z0 >= e^(n/nu)
// so that S is non-increasing, and C chosen to make S continuous.
class TailSpec {
 public:
  static TailSpec point_mass(double at);
  // z0 = 0 picks the smallest admissible threshold, max(1, e^(n/nu)), but
  // at least e when n > 0 (so log z0 > 0).
  static TailSpec power_log(double nu, int n, double z0 = 0);

  bool is_point_mass() const { return point_; }
  double z0() const { return z0_; }
  double exponent() const { return nu_; }
  int logpow() const { return n_; }

  double survival(double z) const;
  double density(double z) const;
  TailClass tail_class() const { return {nu_, n_}; }

 private:
  bool point_ = false;
  double nu_ = 0;
  int n_ = 0;
  double z0_ = 1;
  double c_ = 1;
};

struct ProductTail {
  std::vector<double> survival;
  std::vector<double> error;  // absolute quadrature error per point
};

// P[XY > z] on z_grid by quadrature of int S_X(z/y) f_Y(y) dy.
// Throws Error{kQuadratureFailure} if a point misses 1e-6 relative accuracy
// and Error{kInvalidArgument} for a non-positive or non-increasing grid.
ProductTail tail_product_oracle(const TailSpec& x, const TailSpec& y, std::span<const double> z_grid);

struct HarmonicOptions {
  double rel_tol = 1e-9;
  // |w| beyond which the inner integral switches to its asymptotic series.
  double w_switch = 40.0;
  double damping_cutoff = 1e-16;
  std::size_t max_panels = 20000;
  int max_depth = 18;
  // QuadratureFailure is raised when the final bound exceeds this.
  double max_error = 1e-6;
};

// E_(x,y)[|L_T0|^(s-1)] for a start in P_MINUS and s in (0, 1), by nested
// quadrature of the harmonic-measure Mellin representation.
// Throws Error{kInvalidArgument} (start or s), Error{kQuadratureFailure},
// Error{kOscillationOverflow}.
MellinValue harmonic_mellin(const StableLaw& law, const PlaneState& start, double s,
                            const HarmonicOptions& opts = {});

}  // namespace kolmo
