#include "gloc/sim/random.hpp"

#include <cmath>

namespace gloc::sim {

RandomizationDraw draw_randomization(const RandomizationRanges& ranges,
                                     std::uint64_t seed) {
  RandomizationDraw d;
  if (!ranges.enabled) return d;  // pass-through: identity physics
  Rng rng(seed);
  d.friction = rng.uniform(ranges.friction_lo, ranges.friction_hi);
  d.gain_multiplier = rng.uniform(ranges.gain_lo, ranges.gain_hi);
  d.control_delay_ms = rng.uniform(ranges.delay_lo_ms, ranges.delay_hi_ms);
  d.push_interval_s = ranges.push_interval_s;
  d.push_velocity = ranges.push_velocity;
  return d;
}

SimState apply_push(const SimState& state, const RandomizationDraw& draw,
                    double time, double tol, Rng& rng) {
  SimState out = state;
  if (draw.push_interval_s <= 0.0 || draw.push_velocity <= 0.0) return out;
  const double k = std::round(time / draw.push_interval_s);
  if (k < 1.0 || std::abs(time - k * draw.push_interval_s) > tol) return out;
  const double angle = rng.uniform(0.0, 2.0 * M_PI);
  out.root_vel.x() += draw.push_velocity * std::cos(angle);
  out.root_vel.y() += draw.push_velocity * std::sin(angle);
  return out;
}

}  // namespace gloc::sim
