#pragma once

#include <stdexcept>
#include <vector>

#include "gloc/common/rng.hpp"
#include "gloc/nn/tensor.hpp"

namespace gloc {

enum class DiffusionObjective { NoisePrediction, VelocityPrediction };

// Shared noise schedule for the generator head and the student policy.
// alpha[t] (t = 1..steps) is the per-step noise variance (the standard
// small ramp); alpha_bar[t] = prod_{s<=t} (1 - alpha[s]) with
// alpha_bar[0] = 1, strictly decreasing.
class DiffusionSchedule {
 public:
  DiffusionSchedule() = default;
  DiffusionSchedule(int steps, double alpha_start, double alpha_end,
                    DiffusionObjective obj = DiffusionObjective::NoisePrediction)
      : steps_(steps), objective_(obj) {
    if (steps < 1) throw std::invalid_argument("DiffusionSchedule: steps < 1");
    alpha_.resize(steps + 1);
    alpha_bar_.resize(steps + 1);
    alpha_[0] = 0.0;
    alpha_bar_[0] = 1.0;
    for (int t = 1; t <= steps; ++t) {
      const double frac = steps == 1 ? 0.0 : double(t - 1) / double(steps - 1);
      alpha_[t] = alpha_start + (alpha_end - alpha_start) * frac;
      if (alpha_[t] <= 0.0 || alpha_[t] >= 1.0)
        throw std::invalid_argument("DiffusionSchedule: alpha_t outside (0,1)");
      alpha_bar_[t] = alpha_bar_[t - 1] * (1.0 - alpha_[t]);
    }
  }

  int steps() const { return steps_; }
  DiffusionObjective objective() const { return objective_; }
  void set_objective(DiffusionObjective obj) { objective_ = obj; }
  double alpha(int t) const { return alpha_.at(t); }
  double alpha_bar(int t) const { return alpha_bar_.at(t); }

  // Evenly spaced descending timestep sequence for DDIM sampling,
  // ending at 0: e.g. steps=50, n=5 -> {50, 40, 30, 20, 10, 0}.
  std::vector<int> ddim_timesteps(int n) const {
    if (n < 1 || n > steps_)
      throw std::invalid_argument("ddim_timesteps: need 1 <= n <= steps");
    std::vector<int> ts;
    ts.reserve(n + 1);
    for (int i = 0; i < n; ++i) {
      int t = static_cast<int>(std::lround(double(steps_) * double(n - i) / n));
      if (!ts.empty() && t >= ts.back()) t = ts.back() - 1;
      if (t < 1) t = 1;
      ts.push_back(t);
    }
    ts.push_back(0);
    return ts;
  }

 private:
  int steps_ = 0;
  DiffusionObjective objective_ = DiffusionObjective::NoisePrediction;
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
};

// Closed-form forward jump x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.
template <typename T>
nn::Vec<T> forward_diffuse(const nn::Vec<T>& x0, int t,
                           const DiffusionSchedule& sched,
                           const nn::Vec<T>& eps) {
  if (t < 1 || t > sched.steps())
    throw std::invalid_argument("forward_diffuse: t out of range");
  const T a = static_cast<T>(std::sqrt(sched.alpha_bar(t)));
  const T b = static_cast<T>(std::sqrt(1.0 - sched.alpha_bar(t)));
  return a * x0 + b * eps;
}

// x0 = (x_t - sqrt(1 - abar_t) eps_hat) / sqrt(abar_t).
template <typename T>
nn::Vec<T> recover_x0(const nn::Vec<T>& xt, int t, const nn::Vec<T>& eps_hat,
                      const DiffusionSchedule& sched) {
  if (t < 0 || t > sched.steps())
    throw std::invalid_argument("recover_x0: t out of range");
  const double abar = sched.alpha_bar(t);
  if (abar < 1e-8)
    throw std::runtime_error("recover_x0: alpha_bar below 1e-8 (schedule)");
  const T a = static_cast<T>(std::sqrt(abar));
  const T b = static_cast<T>(std::sqrt(1.0 - abar));
  return (xt - b * eps_hat) / a;
}

// Velocity target v = sqrt(abar_t) eps - sqrt(1 - abar_t) x0.
template <typename T>
nn::Vec<T> velocity_target(const nn::Vec<T>& x0, const nn::Vec<T>& eps, int t,
                           const DiffusionSchedule& sched) {
  const T a = static_cast<T>(std::sqrt(sched.alpha_bar(t)));
  const T b = static_cast<T>(std::sqrt(1.0 - sched.alpha_bar(t)));
  return a * eps - b * x0;
}

// Recover the noise estimate from a velocity prediction:
// eps = sqrt(1 - abar_t) x_t + sqrt(abar_t) v.
template <typename T>
nn::Vec<T> eps_from_velocity(const nn::Vec<T>& xt, const nn::Vec<T>& v, int t,
                             const DiffusionSchedule& sched) {
  const T a = static_cast<T>(std::sqrt(sched.alpha_bar(t)));
  const T b = static_cast<T>(std::sqrt(1.0 - sched.alpha_bar(t)));
  return b * xt + a * v;
}

// Deterministic DDIM update (eta = 0):
// x_{t_prev} = sqrt(abar_prev) x0_hat + sqrt(1 - abar_prev) eps_hat.
template <typename T>
nn::Vec<T> ddim_step(const nn::Vec<T>& xt, int t, int t_prev,
                     const nn::Vec<T>& eps_hat,
                     const DiffusionSchedule& sched) {
  if (!(t > t_prev && t_prev >= 0))
    throw std::invalid_argument("ddim_step: need t > t_prev >= 0");
  nn::Vec<T> x0 = recover_x0(xt, t, eps_hat, sched);
  const T a = static_cast<T>(std::sqrt(sched.alpha_bar(t_prev)));
  const T b = static_cast<T>(std::sqrt(1.0 - sched.alpha_bar(t_prev)));
  return a * x0 + b * eps_hat;
}

}  // namespace gloc
