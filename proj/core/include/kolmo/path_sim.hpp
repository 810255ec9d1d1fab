#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kolmo/error.hpp"
#include "kolmo/rng.hpp"
#include "kolmo/stable_core.hpp"

namespace kolmo {

// P_MINUS = {x < 0} u {x = 0, y < 0}, P_PLUS = {x > 0} u {x = 0, y > 0}.
enum class Region { kMinus, kPlus, kOrigin };

Region classify(double x, double y);
std::string_view to_string(Region r);
// -1 for P_MINUS, +1 for P_PLUS, 0 at the origin.
int region_sign(Region r);

struct PlaneState {
  double x = -1.0;
  double y = 0.0;

  Region region() const { return classify(x, y); }
};

// Step-size policy for the Euler scheme X_{t+dt} = X_t + L_t dt.
//
// kFixed uses dt0 everywhere. kScaled uses dt0 * r(x, y) with the
// self-similar radius r = max(|x|^(alpha/(1+alpha)), |y|^alpha), which has
// the units of time, so the number of steps per unit of log-time stays
// bounded and very long horizons are affordable.
//
// With `adaptive` set, the proposed step is halved while a crossing of
// {x = 0} is possible within it (x y < 0 and |x| < |y| dt) or while the
// drift segment would subtend more than max_chord_angle, down to a floor
// of dt0 * 2^-floor_halvings. Steps already below the floor are not shrunk.
struct DtPolicy {
  enum class Mode { kFixed, kScaled };

  Mode mode = Mode::kScaled;
  double dt0 = 0.01;
  int floor_halvings = 20;
  double max_chord_angle = 0.39269908169872414;  // pi / 8
  bool adaptive = true;

  double base_step(double alpha, double x, double y) const;
  double floor_step() const;
  std::string describe() const;
};

struct GridPoint {
  double t = 0;
  double x = 0;
  double l_pre = 0;  // L just before the node (left limit)
  double l = 0;      // L at the node, after the jump
};

struct HitRecord {
  int n = 0;
  double time = 0;
  double speed = 0;
  int sign = 0;
  // Declared accuracy of `time`: accumulated Euler X-error bound divided by
  // |speed|, plus the width of the crossing step.
  double time_tolerance = 0;
};

struct PathRecord {
  StableLaw law;
  PlaneState start;
  std::vector<GridPoint> grid;
  std::vector<double> omega;  // winding angle at each grid node, omega[0] = 0
  std::vector<HitRecord> hits;
  DtPolicy dt_policy;
  std::uint64_t seed = 0;
  double horizon = 0;
  double x_error_bound = 0;  // sum over steps of dt * |Delta L|
  std::optional<double> theta0;  // winding angle at the first hit
  std::optional<Errc> truncation;  // set when the path stopped early
  std::size_t steps = 0;

  // Number of hits with time <= t.
  std::size_t hits_before(double t) const;
};

// Returns the increment of L over a step of length dt. Used both for the
// stable sampler and for caller-supplied increment sequences in tests.
using IncrementSource = std::function<double(double dt)>;

// Increments taken in order from `values`; throws Error{kInvalidArgument}
// once the sequence is exhausted.
IncrementSource sequence_source(std::vector<double> values);
IncrementSource zero_source();

struct SimulateOptions {
  bool record_grid = true;
  // Stop after this many hits (0 = run to the horizon).
  std::size_t max_hits = 0;
};

PathRecord simulate_path(const StableLaw& law, const PlaneState& start, double horizon,
                         const DtPolicy& policy, RandomStream& rng, const SimulateOptions& opts = {});

// Same as above with the stable sampler replaced by `increments`.
PathRecord simulate_path(const StableLaw& law, const PlaneState& start, double horizon,
                         const DtPolicy& policy, const IncrementSource& increments,
                         const SimulateOptions& opts = {});

struct Crossing {
  double t_star = 0;
  double speed = 0;
};

// Crossing time inside a step where x changes strict sign. Uses the frozen
// slope root x0 + l0 (t - t0) = 0 when it lies in the step, otherwise the
// chord between (t0, x0) and (t0 + dt, x1). Speed is L interpolated
// linearly at t_star.
Crossing refine_crossing(double x0, double l0, double x1, double l1, double t0, double dt);

// Signed angle swept along the segment (x0, y0) -> (x1, y1) seen from the
// origin, in (-pi, pi). Throws Error{kSegmentThroughOrigin} for a vertical
// segment on x = 0 that straddles the origin.
double winding_increment(double x0, double y0, double x1, double y1);

struct ReturnSample {
  int start_sign = -1;  // -1: started in P_MINUS, +1: started in P_PLUS
  double tau = 0;
  std::optional<double> ell;
  bool censored = false;
  bool underflow = false;  // stopped by StepUnderflow, reported as censored
};

// First return of X to 0 from (0, start_sign).
ReturnSample sample_return(const StableLaw& law, int start_sign, const DtPolicy& policy,
                           double horizon_cap, RandomStream& rng);

// First return from an arbitrary non-origin start; start_sign records the
// starting half-plane.
ReturnSample sample_first_return(const StableLaw& law, const PlaneState& start,
                                 const DtPolicy& policy, double horizon_cap, RandomStream& rng);

ReturnSample sample_first_return(const StableLaw& law, const PlaneState& start,
                                 const DtPolicy& policy, double horizon_cap,
                                 const IncrementSource& increments);

}  // namespace kolmo
