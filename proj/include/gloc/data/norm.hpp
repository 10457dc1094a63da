#pragma once

#include <vector>

#include "gloc/data/clip.hpp"

namespace gloc::data {

// Per-channel z-normalization statistics over a training split.
// Standard deviations are floored at 1e-6.
struct NormStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& z) const;
  Eigen::VectorXd apply_vec(const Eigen::VectorXd& x) const;
  Eigen::VectorXd invert_vec(const Eigen::VectorXd& z) const;
};

constexpr double kStdFloor = 1e-6;

// Statistics over all frames of the given clips; throws on an empty split.
NormStats compute_norm_stats(const std::vector<MotionClip>& clips);

}  // namespace gloc::data
