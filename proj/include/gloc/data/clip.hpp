#pragma once

#include <Eigen/Core>
#include <string>

#include "gloc/sim/engine.hpp"

namespace gloc::data {

// A reference motion: channel-major frame matrix (one column per frame).
// Channel layout:
//   [0] root x   [1] root z   [2] pitch
//   [3] root vx  [4] root vz  [5] pitch rate
//   [6 .. 6+J)        joint positions (rad)
//   [6+J .. 6+2J)     joint velocities (rad/s)
//   [6+2J .. 6+2J+2K) keypoint positions, (x, z) per keypoint (m)
struct MotionClip {
  std::string id;
  std::string label;
  double frame_rate = 100.0;
  int joint_count = 0;
  int keypoint_count = 0;
  Eigen::MatrixXd frames;  // channels x frame count

  int frame_count() const { return static_cast<int>(frames.cols()); }
  int channels() const { return 6 + 2 * joint_count + 2 * keypoint_count; }
  double duration() const {
    return frame_count() > 1 ? (frame_count() - 1) / frame_rate : 0.0;
  }

  static int channels_for(int joints, int keypoints) {
    return 6 + 2 * joints + 2 * keypoints;
  }

  sim::MotionFrameView frame_view(int i) const {
    const auto& c = frames.col(i);
    sim::MotionFrameView v;
    v.root_pos = Eigen::Vector2d(c[0], c[1]);
    v.pitch = c[2];
    v.root_vel = Eigen::Vector2d(c[3], c[4]);
    v.pitch_rate = c[5];
    v.q = c.segment(6, joint_count);
    v.qd = c.segment(6 + joint_count, joint_count);
    return v;
  }

  Eigen::Vector2d keypoint(int frame, int k) const {
    const int base = 6 + 2 * joint_count;
    return Eigen::Vector2d(frames(base + 2 * k, frame),
                           frames(base + 2 * k + 1, frame));
  }

  // Linear interpolation between frames at phase in [0, 1].
  Eigen::VectorXd interpolate_phase(double phase) const {
    const double f = phase * (frame_count() - 1);
    const int lo = std::clamp(static_cast<int>(std::floor(f)), 0,
                              frame_count() - 1);
    const int hi = std::min(lo + 1, frame_count() - 1);
    const double a = f - lo;
    return (1.0 - a) * frames.col(lo) + a * frames.col(hi);
  }

  sim::MotionFrameView view_of(const Eigen::VectorXd& col) const {
    sim::MotionFrameView v;
    v.root_pos = Eigen::Vector2d(col[0], col[1]);
    v.pitch = col[2];
    v.root_vel = Eigen::Vector2d(col[3], col[4]);
    v.pitch_rate = col[5];
    v.q = col.segment(6, joint_count);
    v.qd = col.segment(6 + joint_count, joint_count);
    return v;
  }
};

}  // namespace gloc::data
