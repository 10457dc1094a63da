#include "gloc/sim/engine.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace gloc::sim {

namespace {

// Rotation about the out-of-plane axis: p_world = R(theta) p_body.
inline Eigen::Matrix2d rot(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, s, -s, c;
  return r;
}

// omega x u for planar vectors (rotation about the +y axis).
inline Eigen::Vector2d omega_cross(double omega, const Eigen::Vector2d& u) {
  return omega * Eigen::Vector2d(u.y(), -u.x());
}

// Scalar (a x b) about the +y axis: a_z b_x - a_x b_z.
inline double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.y() * b.x() - a.x() * b.y();
}

}  // namespace

std::vector<LinkPose> fk_poses(const RobotModel& model,
                               const Eigen::Vector2d& root_pos, double pitch,
                               const Eigen::VectorXd& q) {
  std::vector<LinkPose> poses(model.link_count());
  poses[0].theta = pitch;
  poses[0].origin = root_pos;
  for (int j = 0; j < model.joint_count(); ++j) {
    const JointSpec& jt = model.joints[j];
    const LinkPose& pp = poses[jt.parent];
    LinkPose& cp = poses[jt.child];
    cp.theta = pp.theta + q[j];
    cp.origin = pp.origin + rot(pp.theta) * jt.pivot;
  }
  return poses;
}

Eigen::Matrix2Xd fk_keypoints(const RobotModel& model,
                              const Eigen::Vector2d& root_pos, double pitch,
                              const Eigen::VectorXd& q) {
  auto poses = fk_poses(model, root_pos, pitch, q);
  Eigen::Matrix2Xd out(2, model.keypoint_count());
  for (int k = 0; k < model.keypoint_count(); ++k) {
    const KeypointSpec& kp = model.keypoints[k];
    out.col(k) = poses[kp.link].origin + rot(poses[kp.link].theta) * kp.offset;
  }
  return out;
}

ComCop compute_com_cop(const SimState& state, const RobotModel& model) {
  auto poses = fk_poses(model, state.root_pos, state.pitch, state.q);
  ComCop result;
  double total_mass = 0.0;
  Eigen::Vector2d weighted = Eigen::Vector2d::Zero();
  for (int i = 0; i < model.link_count(); ++i) {
    const LinkSpec& link = model.links[i];
    const Eigen::Vector2d com_w =
        poses[i].origin + rot(poses[i].theta) * link.com;
    weighted += link.mass * com_w;
    total_mass += link.mass;
  }
  result.com = weighted / total_mass;

  // CoP from recorded foot contact forces and current contact geometry.
  double fz_total = 0.0;
  double moment = 0.0;
  for (std::size_t f = 0; f < state.foot_force.size(); ++f) {
    const double fz = state.foot_force[f].y();
    if (fz <= 0.0) continue;
    const int link = model.foot_links[f];
    // Weight by each foot's normal force at that foot's mean contact x.
    double cx = 0.0;
    int n = 0;
    for (const auto& cpt : model.contacts) {
      if (cpt.link != link) continue;
      const Eigen::Vector2d p =
          poses[link].origin + rot(poses[link].theta) * cpt.offset;
      cx += p.x();
      ++n;
    }
    if (n == 0) continue;
    cx /= n;
    fz_total += fz;
    moment += fz * cx;
  }
  if (fz_total > 0.0) result.cop_x = moment / fz_total;
  return result;
}

SimState state_from_frame(const MotionFrameView& f, const RobotModel& model) {
  SimState s;
  s.root_pos = f.root_pos;
  s.pitch = f.pitch;
  s.root_vel = f.root_vel;
  s.pitch_rate = f.pitch_rate;
  s.q = f.q;
  s.qd = f.qd;
  s.foot_force.assign(model.foot_count(), Eigen::Vector2d::Zero());
  s.limit_hit.assign(model.joint_count(), 0);
  s.torque_saturated.assign(model.joint_count(), 0);
  return s;
}

PlanarSim::PlanarSim(RobotModel model, RandomizationDraw draw,
                     double physics_dt)
    : model_(std::move(model)), draw_(draw), dt_(physics_dt) {
  if (dt_ <= 0.0) throw std::invalid_argument("PlanarSim: dt must be > 0");
  model_.validate();
  delay_steps_ =
      static_cast<int>(std::lround(draw_.control_delay_ms * 1e-3 / dt_));
  push_period_steps_ =
      draw_.push_interval_s > 0.0
          ? static_cast<long>(std::lround(draw_.push_interval_s / dt_))
          : 0;
  SimState s;
  s.q = model_.default_pose();
  s.qd = Eigen::VectorXd::Zero(model_.joint_count());
  s.root_pos = Eigen::Vector2d(0.0, 1.0);
  reset(state_from_frame(
      MotionFrameView{s.root_pos, 0.0, Eigen::Vector2d::Zero(), 0.0, s.q,
                      s.qd},
      model_));
}

void PlanarSim::reset(const SimState& state) {
  state_ = state;
  if (state_.q.size() != model_.joint_count())
    throw std::invalid_argument("PlanarSim::reset: joint dimension mismatch");
  state_.foot_force.assign(model_.foot_count(), Eigen::Vector2d::Zero());
  state_.limit_hit.assign(model_.joint_count(), 0);
  state_.torque_saturated.assign(model_.joint_count(), 0);
  target_buffer_.clear();
  // The delay buffer starts holding the current pose.
  for (int i = 0; i < delay_steps_; ++i) target_buffer_.push_back(state_.q);
  step_count_ = 0;
  last_tau_ = Eigen::VectorXd::Zero(model_.joint_count());
  update_kinematics();
}

void PlanarSim::update_kinematics() {
  poses_ = fk_poses(model_, state_.root_pos, state_.pitch, state_.q);
  // Velocity pass.
  poses_[0].omega = state_.pitch_rate;
  poses_[0].vel = state_.root_vel;
  for (int j = 0; j < model_.joint_count(); ++j) {
    const JointSpec& jt = model_.joints[j];
    const LinkPose& pp = poses_[jt.parent];
    LinkPose& cp = poses_[jt.child];
    const Eigen::Vector2d r = rot(pp.theta) * jt.pivot;
    cp.omega = pp.omega + state_.qd[j];
    cp.vel = pp.vel + omega_cross(pp.omega, r);
  }
}

// Recursive Newton-Euler over the planar tree. Generalized coordinates are
// [root x, root z, root pitch, q_0..q_J-1]; returns the generalized force
// that would produce the candidate acceleration udot at the current
// configuration with velocity u.
Eigen::VectorXd PlanarSim::rnea(const Eigen::VectorXd& u,
                                const Eigen::VectorXd& udot,
                                bool with_gravity) const {
  const int nl = model_.link_count();
  const int nj = model_.joint_count();
  std::vector<double> omega(nl), alpha(nl);
  std::vector<Eigen::Vector2d> vel(nl), acc(nl);

  omega[0] = u[2];
  vel[0] = u.head<2>();
  alpha[0] = udot[2];
  acc[0] = udot.head<2>();
  if (with_gravity) acc[0].y() += model_.gravity;  // base acceleration trick

  for (int j = 0; j < nj; ++j) {
    const JointSpec& jt = model_.joints[j];
    const int p = jt.parent, c = jt.child;
    const Eigen::Vector2d r = rot(poses_[p].theta) * jt.pivot;
    omega[c] = omega[p] + u[3 + j];
    alpha[c] = alpha[p] + udot[3 + j];
    vel[c] = vel[p] + omega_cross(omega[p], r);
    acc[c] = acc[p] + omega_cross(alpha[p], r) - omega[p] * omega[p] * r;
  }

  // Net force/moment about each link origin.
  std::vector<Eigen::Vector2d> f(nl);
  std::vector<double> n(nl);
  for (int i = 0; i < nl; ++i) {
    const LinkSpec& link = model_.links[i];
    const Eigen::Vector2d c_w = rot(poses_[i].theta) * link.com;
    const Eigen::Vector2d a_com =
        acc[i] + omega_cross(alpha[i], c_w) - omega[i] * omega[i] * c_w;
    f[i] = link.mass * a_com;
    n[i] = link.inertia * alpha[i] + cross2(c_w, f[i]);
  }

  // Accumulate child wrenches into parents (children have higher indices).
  Eigen::VectorXd tau = Eigen::VectorXd::Zero(3 + nj);
  for (int j = nj - 1; j >= 0; --j) {
    const JointSpec& jt = model_.joints[j];
    const int p = jt.parent, c = jt.child;
    tau[3 + j] = n[c];
    const Eigen::Vector2d r = poses_[c].origin - poses_[p].origin;
    f[p] += f[c];
    n[p] += n[c] + cross2(r, f[c]);
  }
  tau[0] = f[0].x();
  tau[1] = f[0].y();
  tau[2] = n[0];
  return tau;
}

void PlanarSim::step(const Eigen::VectorXd& target) {
  const int nj = model_.joint_count();
  if (target.size() != nj)
    throw std::invalid_argument("PlanarSim::step: target dimension mismatch");
  if (!target.allFinite())
    throw std::invalid_argument("PlanarSim::step: non-finite target");

  // Control delay: apply the target commanded delay_steps_ ago.
  target_buffer_.push_back(target);
  Eigen::VectorXd applied = target_buffer_.front();
  if (static_cast<int>(target_buffer_.size()) > delay_steps_)
    target_buffer_.pop_front();

  update_kinematics();

  // PD torques with the gain multiplier, clamped per joint.
  Eigen::VectorXd tau_j(nj);
  for (int j = 0; j < nj; ++j) {
    const JointSpec& jt = model_.joints[j];
    double t = jt.kp * draw_.gain_multiplier * (applied[j] - state_.q[j]) -
               jt.kd * draw_.gain_multiplier * state_.qd[j];
    const double lim = jt.torque_limit;
    state_.torque_saturated[j] = (t > lim || t < -lim) ? 1 : 0;
    tau_j[j] = std::clamp(t, -lim, lim);
  }
  last_tau_ = tau_j;

  // Ground contact: penalty spring-damper with a Coulomb friction cone.
  const int n = 3 + nj;
  Eigen::VectorXd q_ext = Eigen::VectorXd::Zero(n);
  for (auto& ff : state_.foot_force) ff.setZero();
  for (const auto& cpt : model_.contacts) {
    const LinkPose& lp = poses_[cpt.link];
    const Eigen::Vector2d p = lp.origin + rot(lp.theta) * cpt.offset;
    if (p.y() >= 0.0) continue;
    const Eigen::Vector2d v = lp.vel + omega_cross(lp.omega, p - lp.origin);
    double fz = -model_.contact_stiffness * p.y() -
                model_.contact_damping * v.y();
    if (fz < 0.0) fz = 0.0;
    const double ft_max = draw_.friction * fz;
    double fx = -model_.contact_tangent_damping * v.x();
    fx = std::clamp(fx, -ft_max, ft_max);
    const Eigen::Vector2d force(fx, fz);

    // Map the point force into generalized coordinates via the point
    // Jacobian transpose.
    q_ext[0] += force.x();
    q_ext[1] += force.y();
    q_ext[2] += cross2(p - poses_[0].origin, force);
    int link = cpt.link;
    while (link != 0) {
      const int j = model_.parent_joint_of_link(link);
      const JointSpec& jt = model_.joints[j];
      const Eigen::Vector2d pivot_w =
          poses_[jt.parent].origin + rot(poses_[jt.parent].theta) * jt.pivot;
      q_ext[3 + j] += cross2(p - pivot_w, force);
      link = jt.parent;
    }

    for (int f = 0; f < model_.foot_count(); ++f) {
      if (model_.foot_links[f] == cpt.link) state_.foot_force[f] += force;
    }
  }

  Eigen::VectorXd u(n);
  u << state_.root_vel, state_.pitch_rate, state_.qd;

  // Mass matrix column-by-column via unit-acceleration RNEA, bias via
  // zero-acceleration RNEA with gravity.
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (int c = 0; c < n; ++c) {
    e[c] = 1.0;
    m.col(c) = rnea(Eigen::VectorXd::Zero(n), e, false);
    e[c] = 0.0;
  }
  const Eigen::VectorXd bias = rnea(u, Eigen::VectorXd::Zero(n), true);

  Eigen::VectorXd gen_force = Eigen::VectorXd::Zero(n);
  gen_force.tail(nj) = tau_j;
  gen_force += q_ext;

  const Eigen::VectorXd udot = m.ldlt().solve(gen_force - bias);

  // Semi-implicit Euler.
  u += udot * dt_;
  state_.root_vel = u.head<2>();
  state_.pitch_rate = u[2];
  state_.qd = u.tail(nj);
  state_.root_pos += state_.root_vel * dt_;
  state_.pitch += state_.pitch_rate * dt_;
  state_.q += state_.qd * dt_;

  // Hard position limits: clamp and kill outward velocity.
  for (int j = 0; j < nj; ++j) {
    const JointSpec& jt = model_.joints[j];
    state_.limit_hit[j] = 0;
    if (state_.q[j] < jt.q_min) {
      state_.q[j] = jt.q_min;
      if (state_.qd[j] < 0.0) state_.qd[j] = 0.0;
      state_.limit_hit[j] = 1;
    } else if (state_.q[j] > jt.q_max) {
      state_.q[j] = jt.q_max;
      if (state_.qd[j] > 0.0) state_.qd[j] = 0.0;
      state_.limit_hit[j] = 1;
    }
  }

  state_.time += dt_;
  ++step_count_;
}

void PlanarSim::maybe_push(Rng& rng) {
  if (push_period_steps_ <= 0 || draw_.push_velocity <= 0.0) return;
  if (step_count_ == 0 || step_count_ % push_period_steps_ != 0) return;
  const double angle = rng.uniform(0.0, 2.0 * M_PI);
  state_.root_vel.x() += draw_.push_velocity * std::cos(angle);
  state_.root_vel.y() += draw_.push_velocity * std::sin(angle);
}

double PlanarSim::mechanical_energy() const {
  auto poses = fk_poses(model_, state_.root_pos, state_.pitch, state_.q);
  // Velocity pass matching update_kinematics.
  poses[0].omega = state_.pitch_rate;
  poses[0].vel = state_.root_vel;
  for (int j = 0; j < model_.joint_count(); ++j) {
    const JointSpec& jt = model_.joints[j];
    const LinkPose& pp = poses[jt.parent];
    LinkPose& cp = poses[jt.child];
    const Eigen::Vector2d r = rot(pp.theta) * jt.pivot;
    cp.omega = pp.omega + state_.qd[j];
    cp.vel = pp.vel + omega_cross(pp.omega, r);
  }
  double e = 0.0;
  for (int i = 0; i < model_.link_count(); ++i) {
    const LinkSpec& link = model_.links[i];
    const Eigen::Vector2d c_w = rot(poses[i].theta) * link.com;
    const Eigen::Vector2d v_com = poses[i].vel + omega_cross(poses[i].omega, c_w);
    const double com_z = poses[i].origin.y() + c_w.y();
    e += 0.5 * link.mass * v_com.squaredNorm() +
         0.5 * link.inertia * poses[i].omega * poses[i].omega +
         link.mass * model_.gravity * com_z;
  }
  return e;
}

}  // namespace gloc::sim
