#pragma once

#include "gloc/common/rng.hpp"
#include "gloc/sim/state.hpp"

namespace gloc::sim {

// Domain randomization ranges follow the published table:
// friction U(0.5, 2.2), P gain U(0.75, 1.25) x default,
// control delay U(20, 40) ms, push interval 8 s at 0.5 m/s.
struct RandomizationDraw {
  double friction = 1.0;
  double gain_multiplier = 1.0;
  double control_delay_ms = 0.0;
  double push_interval_s = 0.0;   // 0 disables pushes
  double push_velocity = 0.0;     // m/s
};

struct RandomizationRanges {
  bool enabled = true;
  double friction_lo = 0.5, friction_hi = 2.2;
  double gain_lo = 0.75, gain_hi = 1.25;
  double delay_lo_ms = 20.0, delay_hi_ms = 40.0;
  double push_interval_s = 8.0;
  double push_velocity = 0.5;
};

// Samples each field uniformly within its range using the seeded stream.
// With randomization disabled the draw is the identity pass-through:
// friction 1, multiplier 1, zero delay, no pushes.
RandomizationDraw draw_randomization(const RandomizationRanges& ranges,
                                     std::uint64_t seed);

// Velocity impulse of the drawn magnitude in a random planar direction,
// applied when `time` lies on a push-interval boundary (within tol).
SimState apply_push(const SimState& state, const RandomizationDraw& draw,
                    double time, double tol, Rng& rng);

}  // namespace gloc::sim
