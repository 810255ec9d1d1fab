#include "kolmo/path_sim.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

namespace kolmo {

Region classify(double x, double y) {
  if (x < 0.0) return Region::kMinus;
  if (x > 0.0) return Region::kPlus;
  if (y < 0.0) return Region::kMinus;
  if (y > 0.0) return Region::kPlus;
  return Region::kOrigin;
}

std::string_view to_string(Region r) {
  switch (r) {
    case Region::kMinus: return "P_MINUS";
    case Region::kPlus: return "P_PLUS";
    case Region::kOrigin: return "ORIGIN";
  }
  return "?";
}

int region_sign(Region r) {
  switch (r) {
    case Region::kMinus: return -1;
    case Region::kPlus: return 1;
    case Region::kOrigin: return 0;
  }
  return 0;
}

double DtPolicy::base_step(double alpha, double x, double y) const {
  if (mode == Mode::kFixed) return dt0;
  const double rx = std::pow(std::abs(x), alpha / (1.0 + alpha));
  const double ry = std::pow(std::abs(y), alpha);
  return dt0 * std::max(rx, ry);
}

double DtPolicy::floor_step() const { return std::ldexp(dt0, -floor_halvings); }

std::string DtPolicy::describe() const {
  std::ostringstream os;
  os << (mode == Mode::kFixed ? "fixed" : "scaled") << "(dt0=" << dt0 << ",floor=2^-" << floor_halvings
     << ",max_angle=" << max_chord_angle << ",adaptive=" << (adaptive ? "on" : "off") << ")";
  return os.str();
}

std::size_t PathRecord::hits_before(double t) const {
  return static_cast<std::size_t>(
      std::upper_bound(hits.begin(), hits.end(), t, [](double v, const HitRecord& h) { return v < h.time; }) -
      hits.begin());
}

IncrementSource sequence_source(std::vector<double> values) {
  auto data = std::make_shared<std::vector<double>>(std::move(values));
  auto pos = std::make_shared<std::size_t>(0);
  return [data, pos](double) {
    if (*pos >= data->size()) throw Error(Errc::kInvalidArgument, "increment sequence exhausted");
    return (*data)[(*pos)++];
  };
}

IncrementSource zero_source() {
  return [](double) { return 0.0; };
}

Crossing refine_crossing(double x0, double l0, double x1, double l1, double t0, double dt) {
  double t_star = t0 + dt * x0 / (x0 - x1);  // chord
  if (l0 != 0.0) {
    const double root = t0 - x0 / l0;
    if (root > t0 && root < t0 + dt) t_star = root;
  }
  const double frac = (t_star - t0) / dt;
  return {t_star, l0 + (l1 - l0) * frac};
}

double winding_increment(double x0, double y0, double x1, double y1) {
  if (x0 == 0.0 && x1 == 0.0 && y0 * y1 < 0.0) {
    throw Error(Errc::kSegmentThroughOrigin, "vertical segment crosses the origin");
  }
  return std::atan2(x0 * y1 - x1 * y0, x0 * x1 + y0 * y1);
}

namespace {

struct SamplerSource {
  StableSampler sampler;
  RandomStream* rng;
  double operator()(double dt) { return sampler.increment(dt, *rng); }
};

struct FunctionSource {
  const IncrementSource* fn;
  double operator()(double dt) { return (*fn)(dt); }
};

struct Step {
  double t0 = 0;
  double dt = 0;
  double x0 = 0;
  double y0 = 0;
  double x1 = 0;
  double y1 = 0;
  double dl = 0;
  double dtheta = 0;
  bool crossed = false;
  Crossing crossing;
  int sign = 0;
  double angle_to_axis = 0;  // winding from (x0, y0) to the crossing point
  double x_error_before = 0;
};

template <class Source>
class Integrator {
 public:
  Integrator(const StableLaw& law, const PlaneState& start, const DtPolicy& policy, Source source)
      : alpha_(law.alpha), policy_(policy), source_(std::move(source)), x_(start.x), y_(start.y),
        region_(start.region()), floor_(policy.floor_step()) {
    if (region_ == Region::kOrigin) throw Error(Errc::kInvalidArgument, "start must differ from the origin");
  }

  // Advances by one step without passing t_limit. Returns false when the
  // horizon is reached or the path had to be truncated.
  bool step(double t_limit, Step& out) {
    if (t_ >= t_limit) return false;
    const double base = policy_.base_step(alpha_, x_, y_);
    const double floor = floor_;
    double dt = base;
    if (policy_.adaptive) {
      while (dt > floor && (crossing_possible(dt) || drift_angle(dt) > policy_.max_chord_angle)) {
        dt = std::max(0.5 * dt, floor);
      }
      if (drift_angle(dt) > policy_.max_chord_angle) {
        truncation_ = Errc::kStepUnderflow;
        return false;
      }
    }
    for (;;) {
      const bool last = dt >= t_limit - t_;
      if (last) dt = t_limit - t_;
      const double dl = source_(dt);
      const double x1 = x_ + y_ * dt;
      const double y1 = y_ + dl;
      const Region r1 = classify(x1, y1);
      if (r1 == Region::kOrigin) {
        truncation_ = Errc::kStepUnderflow;
        return false;
      }
      double vertical = 0;
      try {
        vertical = winding_increment(x1, y_, x1, y1);
      } catch (const Error&) {
        if (dt <= floor) {
          truncation_ = Errc::kSegmentThroughOrigin;
          return false;
        }
        dt = std::max(0.5 * dt, floor);
        continue;
      }
      out = Step{};
      out.t0 = t_;
      out.dt = dt;
      out.x0 = x_;
      out.y0 = y_;
      out.x1 = x1;
      out.y1 = y1;
      out.dl = dl;
      out.dtheta = winding_increment(x_, y_, x1, y_) + vertical;
      out.x_error_before = x_error_;
      if (r1 != region_) {
        out.crossed = true;
        out.sign = region_sign(r1);
        if (x_ * x1 < 0.0) {
          out.crossing = refine_crossing(x_, y_, x1, y1, t_, dt);
          // The crossing direction is fixed by the frozen slope; never let
          // the interpolated speed contradict it.
          if (out.crossing.speed * out.sign <= 0.0) out.crossing.speed = y_;
        } else {
          out.crossing = {t_ + dt, y_ != 0.0 ? y_ : y1};
        }
        out.angle_to_axis = x_ != 0.0 ? winding_increment(x_, y_, 0.0, y_) : 0.0;
      }
      x_error_ += dt * std::abs(dl);
      t_ = last ? t_limit : t_ + dt;
      x_ = x1;
      y_ = y1;
      region_ = r1;
      ++steps_;
      return true;
    }
  }

  double t() const { return t_; }
  double x_error() const { return x_error_; }
  std::size_t steps() const { return steps_; }
  std::optional<Errc> truncation() const { return truncation_; }

 private:
  bool crossing_possible(double dt) const { return x_ * y_ < 0.0 && std::abs(x_) < std::abs(y_) * dt; }
  double drift_angle(double dt) const {
    if (y_ == 0.0) return 0.0;
    return std::abs(winding_increment(x_, y_, x_ + y_ * dt, y_));
  }

  double alpha_;
  DtPolicy policy_;
  Source source_;
  double t_ = 0;
  double x_;
  double y_;
  Region region_;
  double floor_;
  double x_error_ = 0;
  std::size_t steps_ = 0;
  std::optional<Errc> truncation_;
};

template <class Source>
PathRecord run_path(const StableLaw& law, const PlaneState& start, double horizon, const DtPolicy& policy,
                    Source source, const SimulateOptions& opts) {
  if (!(horizon > 0.0)) throw Error(Errc::kInvalidArgument, "horizon must be positive");
  Integrator<Source> integ(law, start, policy, std::move(source));
  PathRecord rec;
  rec.law = law;
  rec.start = start;
  rec.dt_policy = policy;
  rec.horizon = horizon;
  if (opts.record_grid) {
    rec.grid.push_back({0.0, start.x, start.y, start.y});
    rec.omega.push_back(0.0);
  }
  double omega = 0.0;
  Step s;
  while (integ.step(horizon, s)) {
    if (s.crossed) {
      HitRecord h;
      h.n = static_cast<int>(rec.hits.size()) + 1;
      h.time = s.crossing.t_star;
      h.speed = s.crossing.speed;
      h.sign = s.sign;
      h.time_tolerance = s.x_error_before / std::abs(h.speed) + s.dt;
      if (rec.hits.empty()) rec.theta0 = omega + s.angle_to_axis;
      rec.hits.push_back(h);
    }
    omega += s.dtheta;
    if (opts.record_grid) {
      rec.grid.push_back({s.t0 + s.dt, s.x1, s.y0, s.y1});
      rec.omega.push_back(omega);
    }
    if (opts.max_hits != 0 && rec.hits.size() >= opts.max_hits) break;
  }
  rec.truncation = integ.truncation();
  rec.x_error_bound = integ.x_error();
  rec.steps = integ.steps();
  return rec;
}

template <class Source>
ReturnSample run_first_return(const StableLaw& law, const PlaneState& start, const DtPolicy& policy,
                              double horizon_cap, Source source) {
  if (!(horizon_cap > 0.0)) throw Error(Errc::kInvalidArgument, "horizon_cap must be positive");
  Integrator<Source> integ(law, start, policy, std::move(source));
  ReturnSample out;
  out.start_sign = region_sign(start.region());
  Step s;
  while (integ.step(horizon_cap, s)) {
    if (s.crossed) {
      out.tau = s.crossing.t_star;
      out.ell = std::abs(s.crossing.speed);
      return out;
    }
  }
  out.tau = horizon_cap;
  out.censored = true;
  out.underflow = integ.truncation().has_value();
  return out;
}

}  // namespace

PathRecord simulate_path(const StableLaw& law, const PlaneState& start, double horizon, const DtPolicy& policy,
                         RandomStream& rng, const SimulateOptions& opts) {
  PathRecord rec = run_path(law, start, horizon, policy, SamplerSource{StableSampler(law), &rng}, opts);
  rec.seed = rng.seed();
  return rec;
}

PathRecord simulate_path(const StableLaw& law, const PlaneState& start, double horizon, const DtPolicy& policy,
                         const IncrementSource& increments, const SimulateOptions& opts) {
  return run_path(law, start, horizon, policy, FunctionSource{&increments}, opts);
}

ReturnSample sample_return(const StableLaw& law, int start_sign, const DtPolicy& policy, double horizon_cap,
                           RandomStream& rng) {
  if (start_sign != 1 && start_sign != -1) throw Error(Errc::kInvalidArgument, "start_sign must be +1 or -1");
  if (law.degenerate_winding()) throw Error(Errc::kDegenerate, "return sampling needs rho in (0,1)");
  return run_first_return(law, PlaneState{0.0, static_cast<double>(start_sign)}, policy, horizon_cap,
                          SamplerSource{StableSampler(law), &rng});
}

ReturnSample sample_first_return(const StableLaw& law, const PlaneState& start, const DtPolicy& policy,
                                 double horizon_cap, RandomStream& rng) {
  return run_first_return(law, start, policy, horizon_cap, SamplerSource{StableSampler(law), &rng});
}

ReturnSample sample_first_return(const StableLaw& law, const PlaneState& start, const DtPolicy& policy,
                                 double horizon_cap, const IncrementSource& increments) {
  return run_first_return(law, start, policy, horizon_cap, FunctionSource{&increments});
}

}  // namespace kolmo
