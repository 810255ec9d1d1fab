#pragma once

#include <complex>
#include <optional>

#include "kolmo/rng.hpp"

namespace kolmo {

// Strictly alpha-stable law with characteristic exponent
//   Psi(lambda) = -|lambda|^alpha * exp(-i pi alpha (rho - 1/2) sgn(lambda)),
// where rho = P[L_1 >= 0]. Construct through validate_params().
struct StableLaw {
  double alpha = 2.0;
  double rho = 0.5;

  // |L| is a subordinator: the process never winds.
  bool degenerate_winding() const { return rho == 0.0 || rho == 1.0; }
  // alpha == 1 with rho != 1/2 is a drifted Cauchy law.
  bool alpha_one() const { return alpha == 1.0 && rho != 0.5; }

  friend bool operator==(const StableLaw&, const StableLaw&) = default;
};

// Throws Error{kOutOfRange} when alpha is outside (0, 2] or rho outside
// [0, 1], and Error{kInadmissible} when alpha > 1 and rho is outside
// [1 - 1/alpha, 1/alpha] (alpha = 2 forces rho = 1/2).
StableLaw validate_params(double alpha, double rho);

class DerivedConstants {
 public:
  double gamma = 0;      // rho alpha / (1 + alpha)
  double gamma_bar = 0;  // (1 - rho) alpha / (1 + alpha)
  double theta = 0;      // rho / (1 + alpha (1 - rho))
  double theta_bar = 0;  // (1 - rho) / (1 + alpha rho)
  double c_scale = 0;    // cos(pi alpha (rho - 1/2)) / (alpha + 1)
  double s_scale = 0;    // sin(pi alpha (rho - 1/2)) / (alpha + 1)
  bool degenerate = false;

  // Growth rate of the half-winding times, (pi alpha / 2)(cot pi gamma + cot pi gamma_bar).
  // Throws Error{kDegenerate} when rho is 0 or 1.
  double kappa() const;
  // Almost-sure winding velocity omega(t) / log t. Throws like kappa().
  double velocity() const;

  std::optional<double> kappa_if_defined() const { return kappa_; }
  std::optional<double> velocity_if_defined() const { return velocity_; }

 private:
  friend DerivedConstants derived_constants(const StableLaw& law);
  std::optional<double> kappa_;
  std::optional<double> velocity_;
};

DerivedConstants derived_constants(const StableLaw& law);

std::complex<double> char_exponent(const StableLaw& law, double lambda);

// Chambers-Mallows-Stuck sampler written directly in the (alpha, rho)
// parametrisation: with V uniform on (-pi/2, pi/2), W standard exponential
// and b = pi (rho - 1/2),
//   L_1 = sin(alpha (V + b)) / cos(V)^(1/alpha)
//         * (cos(V - alpha (V + b)) / W)^((1 - alpha) / alpha).
// For alpha = 1 this reduces to cos(b) tan(V) + sin(b), a Cauchy law with
// scale sin(pi rho) and drift -cos(pi rho).
class StableSampler {
 public:
  explicit StableSampler(const StableLaw& law);

  double unit(RandomStream& rng) const;
  double increment(double dt, RandomStream& rng) const { return scale_for(dt) * unit(rng); }
  double scale_for(double dt) const;

  const StableLaw& law() const { return law_; }

 private:
  StableLaw law_;
  double shift_;
  double inv_alpha_;
  double tail_power_;
  bool cauchy_;
  bool gaussian_;
};

double sample_increment(const StableLaw& law, double dt, RandomStream& rng);

}  // namespace kolmo
