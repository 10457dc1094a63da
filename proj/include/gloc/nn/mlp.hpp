#pragma once

#include <vector>

#include "gloc/nn/layers.hpp"

namespace gloc::nn {

// Fully connected stack: sizes = [in, h1, ..., out]. Hidden layers use the
// configured activation (SiLU by default); the output layer is linear.
template <typename T>
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParameterSet<T>& ps, const std::string& prefix,
      const std::vector<int>& sizes, Rng& rng,
      Activation act = Activation::SiLU)
      : act_(act) {
    if (sizes.size() < 2)
      throw std::runtime_error("Mlp: need at least input and output sizes");
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
      layers_.emplace_back(ps, prefix + ".fc" + std::to_string(i), sizes[i],
                           sizes[i + 1], rng);
    sizes_ = sizes;
  }

  int in_dim() const { return sizes_.front(); }
  int out_dim() const { return sizes_.back(); }

  Mat<T> forward(const Mat<T>& x) {
    if (x.rows() != sizes_.front())
      throw std::runtime_error(
          "Mlp: input dim " + std::to_string(x.rows()) + " != layer 0 size " +
          std::to_string(sizes_.front()));
    pre_.clear();
    Mat<T> h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      h = layers_[i].forward(h);
      if (i + 1 < layers_.size()) {
        pre_.push_back(h);
        h = activate(act_, h);
      }
    }
    forwarded_ = true;
    return h;
  }

  Vec<T> forward_vec(const Vec<T>& x) { return forward(Mat<T>(x)).col(0); }

  // Backpropagates the loss gradient through the cached forward pass and
  // accumulates parameter gradients. Returns the gradient w.r.t. the input.
  Mat<T> backward(const Mat<T>& dy) {
    if (!forwarded_)
      throw std::runtime_error("Mlp: backward called before forward");
    Mat<T> g = dy;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      if (i + 1 < layers_.size())
        g = (g.array() * activate_grad(act_, pre_[i]).array()).matrix();
      g = layers_[i].backward(g);
    }
    return g;
  }

  Mat<T> infer(const Mat<T>& x) const {
    Mat<T> h = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      h = layers_[i].infer(h);
      if (i + 1 < layers_.size()) h = activate(act_, h);
    }
    return h;
  }
  Vec<T> infer_vec(const Vec<T>& x) const { return infer(Mat<T>(x)).col(0); }

  std::vector<Linear<T>>& layers() { return layers_; }

 private:
  std::vector<Linear<T>> layers_;
  std::vector<Mat<T>> pre_;  // pre-activation cache per hidden layer
  std::vector<int> sizes_;
  Activation act_ = Activation::SiLU;
  bool forwarded_ = false;
};

}  // namespace gloc::nn
