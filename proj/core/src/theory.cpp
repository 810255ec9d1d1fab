#include "kolmo/theory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>

#include "gk.hpp"
#include "kolmo/error.hpp"

namespace kolmo {

using std::numbers::pi;

namespace {

constexpr double kExponentTol = 1e-12;

bool same_exponent(double a, double b) { return std::abs(a - b) <= kExponentTol * std::max(1.0, std::abs(a)); }

void require_nondegenerate(const StableLaw& law, const char* what) {
  if (law.degenerate_winding()) {
    throw Error(Errc::kDegenerate, std::string(what) + " needs rho in (0,1)");
  }
}

void require_sign(int sign) {
  if (sign != 1 && sign != -1) throw Error(Errc::kInvalidArgument, "sign must be +1 or -1");
}

// Heavier of two tails: smaller exponent, then larger log power.
TailClass heavier(TailClass a, TailClass b) {
  if (same_exponent(a.exponent, b.exponent)) return a.logpow >= b.logpow ? a : b;
  return a.exponent < b.exponent ? a : b;
}

StableLaw mirrored(const StableLaw& law) { return StableLaw{law.alpha, 1.0 - law.rho}; }

}  // namespace

std::string_view to_string(MellinMethod m) {
  switch (m) {
    case MellinMethod::kClosedForm: return "closed_form";
    case MellinMethod::kQuadrature: return "quadrature";
    case MellinMethod::kMonteCarlo: return "monte_carlo";
  }
  return "?";
}

double gamma_for_sign(const StableLaw& law, int sign) {
  require_sign(sign);
  const DerivedConstants d = derived_constants(law);
  return sign < 0 ? d.gamma : d.gamma_bar;
}

MellinValue mellin_ell(const StableLaw& law, int sign, double s) {
  require_nondegenerate(law, "mellin_ell");
  const double g = gamma_for_sign(law, sign);
  const double edge = 1.0 / (1.0 - g);
  if (!(std::abs(s) < edge)) {
    std::ostringstream os;
    os << "s=" << s << " outside (" << -edge << ", " << edge << ")";
    throw Error(Errc::kOutsideStrip, os.str());
  }
  MellinValue v;
  v.s = s;
  if (s == 1.0) {
    v.value = 1.0;
  } else if (s == 0.0) {
    v.value = g / (1.0 - g);
  } else {
    v.value = std::sin(pi * g * s) / std::sin(pi * (1.0 - g) * s);
  }
  return v;
}

double log_moment_ell(const StableLaw& law, int sign) {
  require_nondegenerate(law, "log_moment_ell");
  return pi / std::tan(pi * gamma_for_sign(law, sign));
}

DensityExponents density_tail_exponents(const StableLaw& law) {
  require_nondegenerate(law, "density_tail_exponents");
  const DerivedConstants d = derived_constants(law);
  return {law.alpha * d.theta / d.gamma, law.alpha * d.theta + 1.0};
}

TailClass theorem_b_prediction(const StableLaw& law, int n, Region region) {
  if (n < 1) throw Error(Errc::kInvalidArgument, "n must be >= 1");
  if (region == Region::kOrigin) throw Error(Errc::kInvalidArgument, "region must be P_MINUS or P_PLUS");
  require_nondegenerate(law, "theorem_b_prediction");
  // A start in P_PLUS is the mirror image of a start in P_MINUS for -L,
  // whose positivity parameter is 1 - rho.
  if (region == Region::kPlus) return theorem_b_prediction(mirrored(law), n, Region::kMinus);
  const DerivedConstants d = derived_constants(law);
  if (n == 1) return {d.theta, 0};
  if (law.rho < 0.5) return {d.theta, (n - 1) / 2};
  if (law.rho > 0.5) return {d.theta_bar, n / 2 - 1};
  return {d.theta, n - 1};
}

TailClass tail_product_predict(TailClass x, TailClass y) {
  if (!(x.exponent > 0.0) || !(y.exponent > 0.0) || x.logpow < 0 || y.logpow < 0) {
    throw Error(Errc::kInvalidArgument, "tail classes need exponent > 0 and logpow >= 0");
  }
  if (same_exponent(x.exponent, y.exponent)) return {std::min(x.exponent, y.exponent), x.logpow + y.logpow + 1};
  return x.exponent < y.exponent ? x : y;
}

TailClass summand_tail_class(const StableLaw& law, int k, Region region) {
  if (k < 1) throw Error(Errc::kInvalidArgument, "k must be >= 1");
  if (region == Region::kOrigin) throw Error(Errc::kInvalidArgument, "region must be P_MINUS or P_PLUS");
  require_nondegenerate(law, "summand_tail_class");
  const DerivedConstants d = derived_constants(law);
  // tau and ell^alpha drawn from (0, sign) both carry the class of T0 from
  // that half-plane.
  auto factor = [&](int sign) { return TailClass{sign < 0 ? d.theta : d.theta_bar, 0}; };
  const int start = region_sign(region);
  if (k == 1) return factor(start);
  // |L_T0|^alpha, then tau for hit k, then ell^alpha for hits 2..k-1. The
  // draw feeding hit j comes from the half-plane opposite to the start
  // when j is even.
  auto draw_sign = [&](int j) { return j % 2 == 0 ? -start : start; };
  TailClass acc = factor(start);
  acc = tail_product_predict(acc, factor(draw_sign(k)));
  for (int j = 2; j < k; ++j) acc = tail_product_predict(acc, factor(draw_sign(j)));
  return acc;
}

TailClass folded_prediction(const StableLaw& law, int n, Region region) {
  if (n < 1) throw Error(Errc::kInvalidArgument, "n must be >= 1");
  TailClass best = summand_tail_class(law, 1, region);
  for (int k = 2; k <= n; ++k) best = heavier(best, summand_tail_class(law, k, region));
  return best;
}

TailSpec TailSpec::point_mass(double at) {
  if (!(at > 0.0) || !std::isfinite(at)) throw Error(Errc::kInvalidArgument, "point mass must be positive");
  TailSpec t;
  t.point_ = true;
  t.z0_ = at;
  return t;
}

TailSpec TailSpec::power_log(double nu, int n, double z0) {
  if (!(nu > 0.0) || n < 0) throw Error(Errc::kInvalidArgument, "power_log needs nu > 0 and n >= 0");
  const double least = n == 0 ? 1.0 : std::max(std::numbers::e, std::exp(n / nu));
  if (z0 == 0.0) z0 = least;
  if (z0 < least * (1.0 - 1e-15)) {
    std::ostringstream os;
    os << "z0=" << z0 << " below the monotone threshold " << least;
    throw Error(Errc::kInvalidArgument, os.str());
  }
  TailSpec t;
  t.nu_ = nu;
  t.n_ = n;
  t.z0_ = z0;
  t.c_ = std::pow(z0, nu) / std::pow(std::log(z0), n);
  return t;
}

double TailSpec::survival(double z) const {
  if (point_) return z < z0_ ? 1.0 : 0.0;
  if (z <= z0_) return 1.0;
  const double lz = std::log(z);
  return c_ * std::exp(-nu_ * lz) * std::pow(lz, n_);
}

double TailSpec::density(double z) const {
  if (point_ || z <= z0_) return 0.0;
  return survival(z) * (nu_ - n_ / std::log(z)) / z;
}

ProductTail tail_product_oracle(const TailSpec& x, const TailSpec& y, std::span<const double> z_grid) {
  for (std::size_t i = 0; i < z_grid.size(); ++i) {
    if (!(z_grid[i] > 0.0) || (i > 0 && !(z_grid[i] > z_grid[i - 1]))) {
      throw Error(Errc::kInvalidArgument, "z grid must be positive and increasing");
    }
  }
  ProductTail out;
  out.survival.reserve(z_grid.size());
  out.error.reserve(z_grid.size());
  for (const double z : z_grid) {
    if (x.is_point_mass()) {
      out.survival.push_back(y.survival(z / x.z0()));
      out.error.push_back(0.0);
      continue;
    }
    if (y.is_point_mass()) {
      out.survival.push_back(x.survival(z / y.z0()));
      out.error.push_back(0.0);
      continue;
    }
    // S_X(z/y) = 1 once y >= z / x0; that part contributes S_Y(z / x0).
    const double y_star = z / x.z0();
    if (y_star <= y.z0()) {
      out.survival.push_back(1.0);
      out.error.push_back(0.0);
      continue;
    }
    auto integrand = [&](double u) {
      const double yy = std::exp(u);
      return std::pair<double, double>{x.survival(z / yy) * y.density(yy) * yy, 0.0};
    };
    const detail::GkResult r =
        detail::adaptive_gk(integrand, std::log(y.z0()), std::log(y_star), 1e-300, 1e-12, 30);
    const double value = r.value + y.survival(y_star);
    const double err = r.error + 1e-15 * r.l1;
    if (!(err <= 1e-6 * value)) {
      std::ostringstream os;
      os << "product tail at z=" << z << ": error " << err << " vs value " << value;
      throw Error(Errc::kQuadratureFailure, os.str());
    }
    out.survival.push_back(value);
    out.error.push_back(err);
  }
  return out;
}

namespace {

// Evaluates G(w) = int_0^inf u^(nu-1) e^(-c u^alpha) sin(w u + sa u^alpha + pi nu / 2) du
// with an absolute error estimate.
class InnerIntegral {
 public:
  InnerIntegral(double alpha, double c, double sa, double nu, const HarmonicOptions& opts)
      : alpha_(alpha), c_(c), sa_(sa), nu_(nu), opts_(opts) {
    upper_ = std::pow(-std::log(opts.damping_cutoff) / c, 1.0 / alpha);
    // L1 norm of the integrand, bounds |G| for every w.
    l1_ = std::tgamma(nu / alpha) / (alpha * std::pow(c, nu / alpha));
    tol_ = opts.rel_tol * l1_;
    kappa_ = std::complex<double>(c, -sa);
  }

  struct Result {
    double value = 0;
    double error = 0;
  };

  Result operator()(double w) {
    if (std::abs(w) >= opts_.w_switch) {
      Result r;
      if (asymptotic(w, r)) return r;
    }
    return quadrature(w);
  }

  double tolerance() const { return tol_; }
  std::size_t max_panels_seen() const { return max_panels_; }

 private:
  // Watson-type expansion of the damping factor around u = 0:
  // sum_k Im[e^(i pi nu/2) (-kappa)^k / k! Gamma(nu + alpha k) (-i w)^-(nu + alpha k)].
  // The error estimate is the first omitted term. Returns false when the
  // terms stop decreasing before reaching the tolerance.
  bool asymptotic(double w, Result& r) const {
    const double aw = std::abs(w);
    const double sgn = w > 0 ? 1.0 : -1.0;
    const double log_kappa = std::log(std::abs(kappa_));
    const double arg_k = std::arg(-kappa_);
    double sum = 0;
    double prev = std::numeric_limits<double>::infinity();
    // Relative to the leading scale |w|^-nu, so the outer weight t^-p
    // cannot amplify the truncation error near t = 0.
    const double stop = 1e-3 * opts_.rel_tol * std::min(l1_, std::tgamma(nu_) * std::pow(aw, -nu_));
    for (int k = 0; k < 4000; ++k) {
      const double b = nu_ + alpha_ * k;
      const double log_mag = k * log_kappa - std::lgamma(k + 1.0) + std::lgamma(b) - b * std::log(aw);
      const double mag = std::exp(log_mag);
      if (mag <= stop) {
        r.value = sum;
        r.error = mag;
        return true;
      }
      if (mag > prev) return false;
      prev = mag;
      const double phase = 0.5 * pi * nu_ + k * arg_k + sgn * 0.5 * pi * b;
      sum += mag * std::sin(phase);
    }
    return false;
  }

  double phase_bound(double u0, double u1, double w) const {
    return std::abs(w) * (u1 - u0) + std::abs(sa_) * (std::pow(u1, alpha_) - std::pow(u0, alpha_));
  }

  Result quadrature(double w) {
    const double quarter = 0.5 * pi;
    const double max_width = upper_ / 16.0;
    std::vector<double> edges{0.0};
    while (edges.back() < upper_) {
      const double u0 = edges.back();
      double h = std::min(max_width, std::abs(w) > 0 ? quarter / std::abs(w) : max_width);
      while (phase_bound(u0, u0 + h, w) > quarter) h *= 0.5;
      edges.push_back(std::min(u0 + h, upper_));
      if (edges.size() > opts_.max_panels + 1) {
        std::ostringstream os;
        os << "inner integral at w=" << w << " needs more than " << opts_.max_panels << " panels";
        throw Error(Errc::kOscillationOverflow, os.str());
      }
    }
    const std::size_t panels = edges.size() - 1;
    max_panels_ = std::max(max_panels_, panels);
    const double panel_tol = tol_ / static_cast<double>(panels);
    const double shift = 0.5 * pi * nu_;
    Result r;
    // First panel in v = u^nu removes the u^(nu-1) singularity.
    {
      auto f = [&](double v) {
        const double u = std::pow(v, 1.0 / nu_);
        const double ua = std::pow(u, alpha_);
        return std::pair<double, double>{std::exp(-c_ * ua) * std::sin(w * u + sa_ * ua + shift) / nu_, 0.0};
      };
      const auto g = detail::adaptive_gk(f, 0.0, std::pow(edges[1], nu_), panel_tol, 0.0, opts_.max_depth);
      r.value += g.value;
      r.error += g.error;
    }
    auto f = [&](double u) {
      const double ua = std::pow(u, alpha_);
      return std::pair<double, double>{std::pow(u, nu_ - 1.0) * std::exp(-c_ * ua) * std::sin(w * u + sa_ * ua + shift),
                                       0.0};
    };
    for (std::size_t j = 1; j < panels; ++j) {
      const auto g = detail::adaptive_gk(f, edges[j], edges[j + 1], panel_tol, 0.0, opts_.max_depth);
      r.value += g.value;
      r.error += g.error;
    }
    // Truncated tail beyond the cutoff.
    r.error += opts_.damping_cutoff * std::pow(upper_, nu_ - 1.0) * upper_;
    return r;
  }

  double alpha_;
  double c_;
  double sa_;
  double nu_;
  HarmonicOptions opts_;
  double upper_ = 0;
  double l1_ = 0;
  double tol_ = 0;
  std::complex<double> kappa_;
  std::size_t max_panels_ = 0;
};

}  // namespace

MellinValue harmonic_mellin(const StableLaw& law, const PlaneState& start, double s, const HarmonicOptions& opts) {
  require_nondegenerate(law, "harmonic_mellin");
  if (start.region() != Region::kMinus) throw Error(Errc::kInvalidArgument, "start must lie in P_MINUS");
  if (!(s > 0.0 && s < 1.0)) throw Error(Errc::kInvalidArgument, "s must lie in (0,1)");
  const double a = law.alpha;
  const DerivedConstants d = derived_constants(law);
  const double nu = 1.0 - s / (1.0 + a);
  const double p = nu * (1.0 + a) / a;
  const double q = (1.0 + a) / a;
  const double x = start.x;
  const double y = start.y;
  InnerIntegral inner(a, d.c_scale, d.s_scale, nu, opts);

  auto w_of_log_t = [&](double log_t) {
    const double wx = x == 0.0 ? 0.0 : x * std::exp(-q * log_t);
    const double wy = y == 0.0 ? 0.0 : y * std::exp(-log_t / a);
    return wx + wy;
  };
  // t in (0, 1] as t = v^2: integrand 2 v t^-p G(w(t)).
  auto piece_a = [&](double v) {
    if (v == 0.0) return std::pair<double, double>{0.0, 0.0};
    const double log_t = 2.0 * std::log(v);
    const auto g = inner(w_of_log_t(log_t));
    const double jac = 2.0 * v * std::exp(-p * log_t);
    return std::pair<double, double>{jac * g.value, jac * g.error};
  };
  // t in [1, inf): G(0) / (p - 1) exactly, plus the decaying remainder
  // t^-p (G(w(t)) - G(0)) ~ t^-(p + beta), mapped by t = u^(-1/r) so that the
  // mapped integrand vanishes linearly at u = 0.
  const double pm1 = p - 1.0;
  const auto g0 = inner(0.0);
  const double beta = y != 0.0 ? 1.0 / a : q;
  const double r = 0.5 * (pm1 + beta);
  auto piece_b = [&](double u) {
    if (u == 0.0) return std::pair<double, double>{0.0, 0.0};
    const double log_t = -std::log(u) / r;
    const auto g = inner(w_of_log_t(log_t));
    const double jac = std::exp((1.0 - p) * log_t - std::log(u)) / r;
    return std::pair<double, double>{jac * (g.value - g0.value), jac * (g.error + g0.error)};
  };

  const double norm = std::pow(1.0 + a, 1.0 - nu) * std::tgamma(1.0 - nu) * std::tgamma(1.0 - s) *
                      std::sin(pi * s * (1.0 - d.gamma));
  const double abs_tol = 1e-3 * opts.max_error * std::abs(norm);
  const auto ra = detail::adaptive_gk(piece_a, 0.0, 1.0, abs_tol, opts.rel_tol, opts.max_depth);
  const auto rb = detail::adaptive_gk(piece_b, 0.0, 1.0, abs_tol, opts.rel_tol, opts.max_depth);

  MellinValue v;
  v.s = s;
  v.method = MellinMethod::kQuadrature;
  v.value = (ra.value + rb.value + g0.value / pm1) / norm;
  const double eps = std::numeric_limits<double>::epsilon();
  v.error_bound = (ra.error + rb.error + ra.aux + rb.aux + g0.error / pm1 +
                   64 * eps * (ra.l1 + rb.l1 + std::abs(g0.value) / pm1)) /
                  std::abs(norm);
  if (!std::isfinite(v.value) || !(v.error_bound <= opts.max_error)) {
    std::ostringstream os;
    os << "harmonic Mellin at s=" << s << ": value " << v.value << ", error bound " << v.error_bound;
    throw Error(Errc::kQuadratureFailure, os.str());
  }
  return v;
}

}  // namespace kolmo
