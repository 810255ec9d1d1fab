#pragma once

// Adaptive Gauss-Kronrod on a finite interval. Unlike the Boost driver this
// one also integrates a second "error density" alongside the integrand, so
// nested quadratures can propagate the inner error into the outer bound.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <utility>

namespace kolmo::detail {

struct GkResult {
  double value = 0;
  double error = 0;  // Kronrod-Gauss difference, summed over leaves
  double aux = 0;    // integral of the second component
  double l1 = 0;
  bool converged = true;
  int evaluations = 0;
};

// f(x) returns std::pair<double, double>{integrand, aux density}.
template <class F>
class AdaptiveGk {
 public:
  using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;

  AdaptiveGk(F f, double abs_tol, double rel_tol, int max_depth)
      : f_(std::move(f)), abs_tol_(abs_tol), rel_tol_(rel_tol), max_depth_(max_depth) {}

  GkResult run(double a, double b) {
    GkResult out;
    const Leaf whole = rule(a, b, out);
    const double target = std::max(abs_tol_, rel_tol_ * std::abs(whole.k));
    recurse(a, b, whole, target, 0, out);
    return out;
  }

 private:
  struct Leaf {
    double k = 0;
    double g = 0;
    double aux = 0;
    double l1 = 0;
  };

  Leaf rule(double a, double b, GkResult& out) {
    const auto& x = Rule::abscissa();
    const auto& wk = Rule::weights();
    const auto& wg = boost::math::quadrature::gauss<double, 10>::weights();
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    Leaf leaf;
    // Odd indices are the 10-point Gauss nodes.
    for (std::size_t i = 0; i < x.size(); ++i) {
      const bool center = x[i] == 0.0;
      const auto p1 = f_(c + h * x[i]);
      std::pair<double, double> p2{0.0, 0.0};
      if (!center) p2 = f_(c - h * x[i]);
      out.evaluations += center ? 1 : 2;
      const double sum = p1.first + p2.first;
      leaf.k += wk[i] * sum;
      leaf.aux += wk[i] * (p1.second + p2.second);
      leaf.l1 += wk[i] * (std::abs(p1.first) + std::abs(p2.first));
      if (i % 2 == 1) leaf.g += wg[i / 2] * sum;
    }
    leaf.k *= h;
    leaf.g *= h;
    leaf.aux *= h;
    leaf.l1 *= std::abs(h);
    return leaf;
  }

  void recurse(double a, double b, const Leaf& leaf, double target, int depth, GkResult& out) {
    const double err = std::abs(leaf.k - leaf.g);
    if (err <= target || depth >= max_depth_ || !(std::abs(b - a) > 4 * std::numeric_limits<double>::epsilon() * std::abs(a))) {
      if (err > target) out.converged = false;
      out.value += leaf.k;
      out.error += err;
      out.aux += leaf.aux;
      out.l1 += leaf.l1;
      return;
    }
    const double m = 0.5 * (a + b);
    const Leaf left = rule(a, m, out);
    const Leaf right = rule(m, b, out);
    recurse(a, m, left, 0.5 * target, depth + 1, out);
    recurse(m, b, right, 0.5 * target, depth + 1, out);
  }

  F f_;
  double abs_tol_;
  double rel_tol_;
  int max_depth_;
};

template <class F>
GkResult adaptive_gk(F f, double a, double b, double abs_tol, double rel_tol, int max_depth) {
  return AdaptiveGk<F>(std::move(f), abs_tol, rel_tol, max_depth).run(a, b);
}

}  // namespace kolmo::detail
