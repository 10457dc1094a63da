#pragma once

#include <cmath>

#include "gloc/nn/params.hpp"

namespace gloc::nn {

// AdamW defaults follow the training hyperparameter table; weight decay is
// decoupled and defaults to 0.01 (no value is published for it).
struct OptimizerConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.01;
  double max_grad_norm = 1.0;
};

// Scales all trainable gradients so the global norm is at most max_norm.
// Returns the pre-clip norm.
template <typename T>
double clip_grad_norm(ParameterSet<T>& ps, double max_norm) {
  const double norm = ps.grad_norm();
  if (max_norm > 0.0 && norm > max_norm) {
    const T scale = static_cast<T>(max_norm / norm);
    for (auto& [name, p] : ps) {
      if (p.trainable) p.grad *= scale;
    }
  }
  return norm;
}

// One AdamW step with bias correction and decoupled weight decay. Gradients
// are clipped to cfg.max_grad_norm before touching the moments and cleared
// afterwards. step_index starts at 1.
template <typename T>
double adamw_step(ParameterSet<T>& ps, const OptimizerConfig& cfg,
                  long step_index) {
  if (step_index < 1)
    throw std::runtime_error("adamw_step: step_index must be >= 1");
  for (const auto& [name, p] : ps) {
    if (p.trainable && !p.grad.allFinite())
      throw std::runtime_error("adamw_step: non-finite gradient in parameter '" +
                               name + "'");
  }
  const double pre_clip = clip_grad_norm(ps, cfg.max_grad_norm);

  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_index));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_index));
  const T lr = static_cast<T>(cfg.lr);
  const T eps = static_cast<T>(cfg.eps);
  const T wd = static_cast<T>(cfg.weight_decay);

  for (auto& [name, p] : ps) {
    if (!p.trainable) continue;
    p.m = b1 * p.m + (T(1) - b1) * p.grad;
    p.v = (b2 * p.v.array() + (T(1) - b2) * p.grad.array().square()).matrix();
    Mat<T> m_hat = p.m / static_cast<T>(bc1);
    Mat<T> v_hat = p.v / static_cast<T>(bc2);
    if (wd != T(0)) p.value *= (T(1) - lr * wd);  // decoupled decay
    p.value -=
        lr * (m_hat.array() / (v_hat.array().sqrt() + eps)).matrix();
    p.grad.setZero();
  }
  return pre_clip;
}

}  // namespace gloc::nn
