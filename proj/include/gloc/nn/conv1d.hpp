#pragma once

#include <vector>

#include "gloc/nn/layers.hpp"

namespace gloc::nn {

// Causal 1-D convolution over a channel-major sequence (one time step per
// column). Output step t sees input steps <= t*stride + stride - 1 when the
// kernel equals the stride (downsampling) and steps <= t for stride 1
// (left-padded with zeros). This keeps every receptive field causal.
template <typename T>
class CausalConv1d {
 public:
  CausalConv1d() = default;
  CausalConv1d(ParameterSet<T>& ps, const std::string& prefix, int in_ch,
               int out_ch, int kernel, int stride, Rng& rng)
      : in_ch_(in_ch), out_ch_(out_ch), kernel_(kernel), stride_(stride) {
    if (stride != 1 && kernel != stride)
      throw std::runtime_error(
          "CausalConv1d: strided variant requires kernel == stride");
    w_.reserve(kernel);
    for (int k = 0; k < kernel; ++k) {
      Param<T>& p = ps.add(prefix + ".w" + std::to_string(k), out_ch, in_ch);
      const double bound = 1.0 / std::sqrt(static_cast<double>(in_ch * kernel));
      rng.fill_uniform(p.value, -bound, bound);
      w_.push_back(&p);
    }
    b_ = &ps.add(prefix + ".b", out_ch, 1);
  }

  int out_steps(int in_steps) const {
    if (stride_ == 1) return in_steps;
    return (in_steps + stride_ - 1) / stride_;  // ceil
  }

  Mat<T> forward(const Mat<T>& x) {
    if (x.rows() != in_ch_)
      throw std::runtime_error("CausalConv1d: channel mismatch");
    x_cache_ = x;
    const Eigen::Index n_in = x.cols();
    const Eigen::Index n_out = out_steps(static_cast<int>(n_in));
    Mat<T> y(out_ch_, n_out);
    y.colwise() = b_->value.col(0);
    for (Eigen::Index t = 0; t < n_out; ++t) {
      for (int k = 0; k < kernel_; ++k) {
        const Eigen::Index src = input_index(t, k);
        if (src < 0 || src >= n_in) continue;  // zero padding
        y.col(t).noalias() += w_[k]->value * x.col(src);
      }
    }
    return y;
  }

  Mat<T> backward(const Mat<T>& dy) {
    const Eigen::Index n_in = x_cache_.cols();
    Mat<T> dx = Mat<T>::Zero(in_ch_, n_in);
    for (Eigen::Index t = 0; t < dy.cols(); ++t) {
      b_->grad.col(0) += dy.col(t);
      for (int k = 0; k < kernel_; ++k) {
        const Eigen::Index src = input_index(t, k);
        if (src < 0 || src >= n_in) continue;
        w_[k]->grad.noalias() += dy.col(t) * x_cache_.col(src).transpose();
        dx.col(src).noalias() += w_[k]->value.transpose() * dy.col(t);
      }
    }
    return dx;
  }

 private:
  // Input column consumed by output step t, kernel tap k.
  Eigen::Index input_index(Eigen::Index t, int k) const {
    if (stride_ == 1) return t - (kernel_ - 1) + k;  // left pad
    return t * stride_ + k;                          // chunked downsample
  }

  int in_ch_ = 0, out_ch_ = 0, kernel_ = 1, stride_ = 1;
  std::vector<Param<T>*> w_;
  Param<T>* b_ = nullptr;
  Mat<T> x_cache_;
};

}  // namespace gloc::nn
