#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

namespace gloc::sim {

// Full dynamic state of the planar robot. Roll and yaw are identically
// zero in planar mode; observation builders emit those slots as zeros.
struct SimState {
  Eigen::Vector2d root_pos = Eigen::Vector2d::Zero();  // x, z (m)
  double pitch = 0.0;                                  // rad
  Eigen::Vector2d root_vel = Eigen::Vector2d::Zero();  // m/s
  double pitch_rate = 0.0;                             // rad/s
  Eigen::VectorXd q;   // joint positions (rad)
  Eigen::VectorXd qd;  // joint velocities (rad/s)
  double time = 0.0;   // s

  // Per-foot contact force (x, z) summed over that foot's contact points,
  // refreshed every step.
  std::vector<Eigen::Vector2d> foot_force;
  // Per-joint flags from the last step.
  std::vector<std::uint8_t> limit_hit;
  std::vector<std::uint8_t> torque_saturated;

  bool finite() const {
    return root_pos.allFinite() && std::isfinite(pitch) &&
           root_vel.allFinite() && std::isfinite(pitch_rate) &&
           q.allFinite() && qd.allFinite();
  }
};

}  // namespace gloc::sim
