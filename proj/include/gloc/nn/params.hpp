#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "gloc/nn/tensor.hpp"

namespace gloc::nn {

// One named parameter array with its gradient and AdamW moment buffers.
// Gradient and moments always share the parameter's shape; moments start
// at zero so the first optimizer step sees a clean slate.
template <typename T>
struct Param {
  Mat<T> value;
  Mat<T> grad;
  Mat<T> m;  // first moment
  Mat<T> v;  // second moment
  bool trainable = true;

  Eigen::Index rows() const { return value.rows(); }
  Eigen::Index cols() const { return value.cols(); }
  Eigen::Index size() const { return value.size(); }
};

// Named map of parameters. std::map keeps iteration order stable, which
// makes optimizer sweeps and checkpoints deterministic. Node-based storage
// also keeps Param* handles valid across later insertions, so modules may
// cache pointers to their own entries.
template <typename T>
class ParameterSet {
 public:
  Param<T>& add(const std::string& name, Eigen::Index rows,
                Eigen::Index cols, bool trainable = true) {
    auto [it, inserted] = entries_.try_emplace(name);
    if (!inserted)
      throw std::runtime_error("ParameterSet: duplicate parameter '" + name +
                               "'");
    Param<T>& p = it->second;
    p.value = Mat<T>::Zero(rows, cols);
    p.grad = Mat<T>::Zero(rows, cols);
    p.m = Mat<T>::Zero(rows, cols);
    p.v = Mat<T>::Zero(rows, cols);
    p.trainable = trainable;
    return p;
  }

  Param<T>& at(const std::string& name) {
    auto it = entries_.find(name);
    if (it == entries_.end())
      throw std::runtime_error("ParameterSet: unknown parameter '" + name +
                               "'");
    return it->second;
  }
  const Param<T>& at(const std::string& name) const {
    return const_cast<ParameterSet*>(this)->at(name);
  }
  bool contains(const std::string& name) const {
    return entries_.count(name) > 0;
  }

  void zero_grads() {
    for (auto& [name, p] : entries_) p.grad.setZero();
  }

  // Global gradient norm over trainable entries, accumulated in 64-bit.
  double grad_norm() const {
    double sq = 0.0;
    for (const auto& [name, p] : entries_) {
      if (!p.trainable) continue;
      sq += p.grad.template cast<double>().squaredNorm();
    }
    return std::sqrt(sq);
  }

  std::size_t size() const { return entries_.size(); }
  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::map<std::string, Param<T>> entries_;
};

}  // namespace gloc::nn
