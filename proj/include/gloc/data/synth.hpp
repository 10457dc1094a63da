#pragma once

#include <vector>

#include "gloc/data/clip.hpp"

namespace gloc::data {

// Synthetic corpus generator: deterministic, physically smooth parametric
// gaits with analytic velocity channels. Families: walk, hop, squat,
// kick, stand.
struct FamilyRange {
  double lo = 0.0, hi = 0.0;
  double sample(Rng& rng) const { return rng.uniform(lo, hi); }
};

struct CorpusSpec {
  std::vector<std::pair<std::string, int>> families;  // (name, clip count)
  double frame_rate = 100.0;
  double duration_s = 8.0;
  // Parameter ranges per family (kept gentle so finite differences of the
  // position channels reproduce the analytic velocities within 1e-3).
  FamilyRange walk_cadence{0.45, 0.6};   // Hz
  FamilyRange walk_stride{0.15, 0.3};    // m per cycle
  FamilyRange hop_cadence{0.8, 1.1};     // Hz
  FamilyRange hop_depth{0.12, 0.22};     // rad of knee pump
  FamilyRange squat_cadence{0.25, 0.35};
  FamilyRange squat_depth{0.5, 0.9};
  FamilyRange kick_amplitude{0.35, 0.6};
};

std::vector<MotionClip> synthesize_corpus(const CorpusSpec& spec,
                                          const sim::RobotModel& model,
                                          std::uint64_t seed);

// Single-clip synthesis (used by tests); family must be one of the five
// known names or a DataError is thrown.
MotionClip synthesize_clip(const std::string& family, const CorpusSpec& spec,
                           const sim::RobotModel& model, std::uint64_t seed,
                           const std::string& clip_id);

}  // namespace gloc::data
