#pragma once

#include <vector>

#include "gloc/data/clip.hpp"

namespace gloc::data {

// CoM/CoP stability filter for kinematic clips. A frame is stable iff the
// ground-projected CoM-to-CoP distance is below epsilon. CoP for kinematic
// data is approximated as the centroid of foot keypoints lower than the
// contact height threshold; a frame with no low foot keypoint is unstable.
struct StabilityResult {
  bool keep = false;
  std::vector<std::uint8_t> stable;  // per frame
  int longest_unstable_run = 0;
};

struct StabilityParams {
  double epsilon_stab = 0.12;      // m
  int max_unstable_run = 100;      // frames
  double contact_height = 0.02;    // m, foot keypoint counted as support
};

StabilityResult stability_filter(const MotionClip& clip,
                                 const sim::RobotModel& model,
                                 const StabilityParams& params);

// Keep decision from per-frame flags alone: first and last frames stable
// and the longest consecutive unstable run shorter than max_run.
bool stability_decision(const std::vector<std::uint8_t>& stable, int max_run);

}  // namespace gloc::data
