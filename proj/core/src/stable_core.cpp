#include "kolmo/stable_core.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kolmo/error.hpp"

namespace kolmo {

using std::numbers::pi;

StableLaw validate_params(double alpha, double rho) {
  if (!(alpha > 0.0 && alpha <= 2.0) || !(rho >= 0.0 && rho <= 1.0)) {
    std::ostringstream os;
    os << "alpha=" << alpha << " rho=" << rho << " (need alpha in (0,2], rho in [0,1])";
    throw Error(Errc::kOutOfRange, os.str());
  }
  if (alpha > 1.0) {
    // A strictly stable law with alpha > 1 has P[L_1 >= 0] in [1 - 1/alpha, 1/alpha].
    const double lo = 1.0 - 1.0 / alpha;
    const double hi = 1.0 / alpha;
    const double slack = 1e-14;
    if (rho < lo - slack || rho > hi + slack) {
      std::ostringstream os;
      os << "alpha=" << alpha << " admits rho in [" << lo << ", " << hi << "], got " << rho;
      throw Error(Errc::kInadmissible, os.str());
    }
  }
  if (alpha == 2.0 && rho != 0.5) {
    throw Error(Errc::kInadmissible, "alpha=2 requires rho=1/2");
  }
  return StableLaw{alpha, rho};
}

double DerivedConstants::kappa() const {
  if (!kappa_) throw Error(Errc::kDegenerate, "kappa undefined for rho in {0,1}");
  return *kappa_;
}

double DerivedConstants::velocity() const {
  if (!velocity_) throw Error(Errc::kDegenerate, "velocity undefined for rho in {0,1}");
  return *velocity_;
}

DerivedConstants derived_constants(const StableLaw& law) {
  const double a = law.alpha;
  const double r = law.rho;
  DerivedConstants d;
  d.gamma = r * a / (1.0 + a);
  d.gamma_bar = (1.0 - r) * a / (1.0 + a);
  d.theta = r / (1.0 + a * (1.0 - r));
  d.theta_bar = (1.0 - r) / (1.0 + a * r);
  d.c_scale = std::cos(pi * a * (r - 0.5)) / (a + 1.0);
  d.s_scale = std::sin(pi * a * (r - 0.5)) / (a + 1.0);
  d.degenerate = law.degenerate_winding();
  if (!d.degenerate) {
    const double sg = std::sin(pi * d.gamma);
    const double sgb = std::sin(pi * d.gamma_bar);
    const double ssum = std::sin(pi * (d.gamma + d.gamma_bar));
    d.kappa_ = pi * a * ssum / (2.0 * sg * sgb);
    d.velocity_ = -2.0 * sg * sgb / (a * ssum);
  }
  return d;
}

std::complex<double> char_exponent(const StableLaw& law, double lambda) {
  if (lambda == 0.0) return {0.0, 0.0};
  const double mag = std::pow(std::abs(lambda), law.alpha);
  const double phase = -pi * law.alpha * (law.rho - 0.5) * (lambda > 0 ? 1.0 : -1.0);
  return -mag * std::complex<double>(std::cos(phase), std::sin(phase));
}

StableSampler::StableSampler(const StableLaw& law)
    : law_(law),
      shift_(pi * (law.rho - 0.5)),
      inv_alpha_(1.0 / law.alpha),
      tail_power_((1.0 - law.alpha) / law.alpha),
      cauchy_(law.alpha == 1.0),
      gaussian_(law.alpha == 2.0) {}

double StableSampler::scale_for(double dt) const {
  if (gaussian_) return std::sqrt(dt);
  if (cauchy_) return dt;
  return std::pow(dt, inv_alpha_);
}

double StableSampler::unit(RandomStream& rng) const {
  const double v = pi * (rng.uniform() - 0.5);
  if (cauchy_) {
    return std::cos(shift_) * std::tan(v) + std::sin(shift_);
  }
  const double w = rng.exponential();
  if (gaussian_) {
    // sin(2V) / sqrt(cos V) * sqrt(W / cos V) = 2 sin(V) sqrt(W).
    return 2.0 * std::sin(v) * std::sqrt(w);
  }
  const double a = law_.alpha;
  const double arg = a * (v + shift_);
  const double num = std::sin(arg) / std::pow(std::cos(v), inv_alpha_);
  return num * std::pow(std::cos(v - arg) / w, tail_power_);
}

double sample_increment(const StableLaw& law, double dt, RandomStream& rng) {
  if (!(dt > 0.0)) throw Error(Errc::kInvalidArgument, "dt must be positive");
  return StableSampler(law).increment(dt, rng);
}

}  // namespace kolmo
