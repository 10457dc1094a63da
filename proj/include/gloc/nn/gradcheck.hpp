#pragma once

#include <functional>
#include <string>
#include <vector>

#include "gloc/nn/params.hpp"

namespace gloc::nn {

// Finite-difference gradient verification, run fully in 64-bit.
// `loss` must be a deterministic function of the parameter values (any
// randomness fixed outside). `grads` must populate ps gradients for the
// same loss. Returns the worst relative error over all checked entries.
struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  int checked = 0;
};

inline GradCheckResult check_gradients(
    ParameterSet<double>& ps, const std::function<double()>& loss,
    const std::function<void()>& grads, double h = 1e-5) {
  ps.zero_grads();
  grads();
  // Snapshot analytic gradients before perturbing.
  std::vector<Mat<double>> analytic;
  std::vector<std::string> names;
  for (auto& [name, p] : ps) {
    if (!p.trainable) continue;
    analytic.push_back(p.grad);
    names.push_back(name);
  }
  GradCheckResult res;
  std::size_t idx = 0;
  for (auto& [name, p] : ps) {
    if (!p.trainable) continue;
    const Mat<double>& g = analytic[idx];
    for (Eigen::Index c = 0; c < p.cols(); ++c) {
      for (Eigen::Index r = 0; r < p.rows(); ++r) {
        const double orig = p.value(r, c);
        p.value(r, c) = orig + h;
        const double lp = loss();
        p.value(r, c) = orig - h;
        const double lm = loss();
        p.value(r, c) = orig;
        const double fd = (lp - lm) / (2.0 * h);
        const double ga = g(r, c);
        const double denom = std::max({std::abs(fd), std::abs(ga), 1e-6});
        const double rel = std::abs(fd - ga) / denom;
        ++res.checked;
        if (rel > res.max_rel_err) {
          res.max_rel_err = rel;
          res.worst_param = name;
        }
      }
    }
    ++idx;
  }
  ps.zero_grads();
  return res;
}

}  // namespace gloc::nn
