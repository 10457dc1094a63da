#pragma once

#include "gloc/nn/layers.hpp"

namespace gloc::nn {

// Adaptive layer normalization: normalize(features) * (1 + scale(cond)) +
// shift(cond). The scale/shift projections start at zero so modulation
// begins as plain layer normalization.
template <typename T>
class AdaLn {
 public:
  AdaLn() = default;
  AdaLn(ParameterSet<T>& ps, const std::string& prefix, int feat_dim,
        int cond_dim, Rng& rng)
      : scale_(ps, prefix + ".scale", cond_dim, feat_dim, rng,
               /*zero_init=*/true),
        shift_(ps, prefix + ".shift", cond_dim, feat_dim, rng,
               /*zero_init=*/true),
        ln_(LayerNorm<T>::plain()) {}

  Mat<T> forward(const Mat<T>& features, const Mat<T>& cond) {
    xhat_ = ln_.forward(features);
    s_ = scale_.forward(cond);
    t_ = shift_.forward(cond);
    return ((xhat_.array() * (T(1) + s_.array())) + t_.array()).matrix();
  }

  // Returns d features; d cond is accumulated into dcond.
  Mat<T> backward(const Mat<T>& dy, Mat<T>& dcond) {
    Mat<T> dxhat = (dy.array() * (T(1) + s_.array())).matrix();
    Mat<T> ds = (dy.array() * xhat_.array()).matrix();
    dcond += scale_.backward(ds);
    dcond += shift_.backward(dy);
    return ln_.backward(dxhat);
  }

 private:
  Linear<T> scale_;
  Linear<T> shift_;
  LayerNorm<T> ln_;
  Mat<T> xhat_, s_, t_;
};

}  // namespace gloc::nn
