#pragma once

#include <deque>
#include <optional>

#include "gloc/sim/model.hpp"
#include "gloc/sim/random.hpp"
#include "gloc/sim/state.hpp"

namespace gloc::sim {

struct LinkPose {
  double theta = 0.0;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();
  double omega = 0.0;
  Eigen::Vector2d vel = Eigen::Vector2d::Zero();
};

// Forward kinematics for a given configuration (no velocities).
std::vector<LinkPose> fk_poses(const RobotModel& model,
                               const Eigen::Vector2d& root_pos, double pitch,
                               const Eigen::VectorXd& q);

// World keypoint positions, one column per keypoint.
Eigen::Matrix2Xd fk_keypoints(const RobotModel& model,
                              const Eigen::Vector2d& root_pos, double pitch,
                              const Eigen::VectorXd& q);

struct ComCop {
  Eigen::Vector2d com = Eigen::Vector2d::Zero();  // world (x, z)
  std::optional<double> cop_x;  // ground x; absent when no normal force
};

// CoM = mass-weighted mean of link COMs; CoP = normal-force-weighted mean
// of contact point x when total normal force > 0.
ComCop compute_com_cop(const SimState& state, const RobotModel& model);

// Deterministic planar articulated simulator: PD joint servos with a
// control-delay buffer, penalty ground contact with Coulomb friction,
// semi-implicit Euler integration. One instance is single-threaded;
// independent instances may run in parallel.
class PlanarSim {
 public:
  PlanarSim(RobotModel model, RandomizationDraw draw, double physics_dt);

  void reset(const SimState& state);

  // One physics step commanding PD targets (length = joint count).
  // The target actually applied is the one commanded `delay` ms ago.
  void step(const Eigen::VectorXd& target_joint_positions);

  // Applies the scheduled push impulse when due (integer-step schedule).
  // Call once per physics step after step(); uses the owned rng stream.
  void maybe_push(Rng& rng);

  const SimState& state() const { return state_; }
  SimState& mutable_state() { return state_; }
  const RobotModel& model() const { return model_; }
  const RandomizationDraw& draw() const { return draw_; }
  double dt() const { return dt_; }
  int delay_steps() const { return delay_steps_; }

  // Kinetic + gravitational potential energy of the current state.
  double mechanical_energy() const;

  // Torques applied during the most recent step (after clamping).
  const Eigen::VectorXd& last_torques() const { return last_tau_; }

 private:
  Eigen::VectorXd rnea(const Eigen::VectorXd& u, const Eigen::VectorXd& udot,
                       bool with_gravity) const;
  void update_kinematics();

  RobotModel model_;
  RandomizationDraw draw_;
  double dt_;
  int delay_steps_ = 0;
  long step_count_ = 0;
  long push_period_steps_ = 0;

  SimState state_;
  std::deque<Eigen::VectorXd> target_buffer_;
  std::vector<LinkPose> poses_;
  Eigen::VectorXd last_tau_;
};

// Initializes the state from the clip frame at the given phase in [0, 1]
// (linear interpolation between frames).
struct MotionFrameView {
  Eigen::Vector2d root_pos;
  double pitch;
  Eigen::Vector2d root_vel;
  double pitch_rate;
  Eigen::VectorXd q;
  Eigen::VectorXd qd;
};

SimState state_from_frame(const MotionFrameView& f, const RobotModel& model);

}  // namespace gloc::sim
