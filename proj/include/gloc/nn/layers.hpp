#pragma once

#include <cmath>
#include <string>

#include "gloc/common/rng.hpp"
#include "gloc/nn/params.hpp"

namespace gloc::nn {

constexpr double kLayerNormEps = 1e-5;

// Scaled-uniform fan-in init for weights; biases stay zero.
template <typename T>
void init_fan_in(Param<T>& w, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols()));
  rng.fill_uniform(w.value, -bound, bound);
}

enum class Activation { Linear, SiLU, Tanh, Relu };

template <typename T>
Mat<T> activate(Activation act, const Mat<T>& x) {
  switch (act) {
    case Activation::Linear:
      return x;
    case Activation::SiLU:
      return (x.array() / (T(1) + (-x.array()).exp())).matrix();
    case Activation::Tanh:
      return x.array().tanh().matrix();
    case Activation::Relu:
      return x.cwiseMax(T(0));
  }
  return x;
}

// d activation / d x evaluated at pre-activation x.
template <typename T>
Mat<T> activate_grad(Activation act, const Mat<T>& x) {
  switch (act) {
    case Activation::Linear:
      return Mat<T>::Ones(x.rows(), x.cols());
    case Activation::SiLU: {
      Mat<T> s = (T(1) / (T(1) + (-x.array()).exp())).matrix();
      return (s.array() * (T(1) + x.array() * (T(1) - s.array()))).matrix();
    }
    case Activation::Tanh: {
      Mat<T> t = x.array().tanh().matrix();
      return (T(1) - t.array().square()).matrix();
    }
    case Activation::Relu:
      return (x.array() > T(0)).template cast<T>().matrix();
  }
  return Mat<T>::Ones(x.rows(), x.cols());
}

// Dense layer y = W x + b over column-sample batches. Caches its input for
// the backward pass; backward accumulates into grads and returns dx.
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(ParameterSet<T>& ps, const std::string& prefix, int in, int out,
         Rng& rng, bool zero_init = false)
      : w_(&ps.add(prefix + ".w", out, in)),
        b_(&ps.add(prefix + ".b", out, 1)) {
    if (!zero_init) init_fan_in(*w_, rng);
  }

  int in_dim() const { return static_cast<int>(w_->cols()); }
  int out_dim() const { return static_cast<int>(w_->rows()); }

  Mat<T> forward(const Mat<T>& x) {
    if (x.rows() != w_->cols())
      throw std::runtime_error("Linear: input dim " + std::to_string(x.rows()) +
                               " != expected " + std::to_string(w_->cols()));
    x_cache_ = x;
    return (w_->value * x).colwise() + b_->value.col(0);
  }

  Mat<T> backward(const Mat<T>& dy) {
    w_->grad.noalias() += dy * x_cache_.transpose();
    b_->grad.col(0).noalias() += dy.rowwise().sum();
    return w_->value.transpose() * dy;
  }

  // Forward without touching the cache; safe for concurrent inference.
  Mat<T> infer(const Mat<T>& x) const {
    return (w_->value * x).colwise() + b_->value.col(0);
  }

  Param<T>& weight() { return *w_; }
  Param<T>& bias() { return *b_; }

 private:
  Param<T>* w_ = nullptr;
  Param<T>* b_ = nullptr;
  Mat<T> x_cache_;
};

// Per-column layer normalization, optionally with a learned affine.
// Variance is floored at kLayerNormEps so constant features normalize to 0.
template <typename T>
class LayerNorm {
 public:
  LayerNorm() = default;
  LayerNorm(ParameterSet<T>& ps, const std::string& prefix, int dim)
      : g_(&ps.add(prefix + ".g", dim, 1)), b_(&ps.add(prefix + ".b", dim, 1)) {
    g_->value.setOnes();
  }
  // Affine-free variant (used inside AdaLN where scale/shift are external).
  static LayerNorm plain() { return LayerNorm(); }

  Mat<T> forward(const Mat<T>& x) {
    const Eigen::Index d = x.rows();
    xhat_.resize(d, x.cols());
    inv_std_.resize(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const T mu = x.col(c).mean();
      const T var = (x.col(c).array() - mu).square().sum() / static_cast<T>(d);
      const T inv = T(1) / std::sqrt(var + static_cast<T>(kLayerNormEps));
      inv_std_[c] = inv;
      xhat_.col(c) = (x.col(c).array() - mu) * inv;
    }
    if (!g_) return xhat_;
    Mat<T> y = (xhat_.array().colwise() * g_->value.col(0).array()).matrix();
    y.colwise() += b_->value.col(0);
    return y;
  }

  Mat<T> backward(const Mat<T>& dy) {
    const Eigen::Index d = xhat_.rows();
    Mat<T> dxhat;
    if (g_) {
      g_->grad.col(0) += (dy.array() * xhat_.array()).matrix().rowwise().sum();
      b_->grad.col(0) += dy.rowwise().sum();
      dxhat = (dy.array().colwise() * g_->value.col(0).array()).matrix();
    } else {
      dxhat = dy;
    }
    Mat<T> dx(d, dy.cols());
    for (Eigen::Index c = 0; c < dy.cols(); ++c) {
      // dx = inv/d * (d*dxhat - sum(dxhat) - xhat * sum(dxhat .* xhat))
      const T s1 = dxhat.col(c).sum();
      const T s2 = (dxhat.col(c).array() * xhat_.col(c).array()).sum();
      dx.col(c) = ((inv_std_[c] / static_cast<T>(d)) *
                   (static_cast<T>(d) * dxhat.col(c).array() - s1 -
                    xhat_.col(c).array() * s2))
                      .matrix();
    }
    return dx;
  }

  const Mat<T>& normalized() const { return xhat_; }

 private:
  Param<T>* g_ = nullptr;
  Param<T>* b_ = nullptr;
  Mat<T> xhat_;
  Vec<T> inv_std_;
};

}  // namespace gloc::nn
