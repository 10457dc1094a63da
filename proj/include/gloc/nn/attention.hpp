#pragma once

#include <limits>
#include <vector>

#include "gloc/nn/layers.hpp"

namespace gloc::nn {

// Causal multi-head self-attention over a token sequence (one token per
// column). Position i attends to positions 0..i only; softmax weights over
// the allowed positions sum to 1 per query.
struct AttentionConfig {
  int max_seq_len = 0;
  int width = 0;
  int heads = 1;
  bool causal = true;  // always true in this artifact

  void validate() const {
    if (width <= 0 || heads <= 0 || width % heads != 0)
      throw std::runtime_error(
          "AttentionConfig: head count must divide model width");
    if (!causal)
      throw std::runtime_error("AttentionConfig: causal flag must be set");
  }
};

template <typename T>
class CausalAttention {
 public:
  CausalAttention() = default;
  CausalAttention(ParameterSet<T>& ps, const std::string& prefix,
                  const AttentionConfig& cfg, Rng& rng)
      : cfg_(cfg),
        wq_(ps, prefix + ".q", cfg.width, cfg.width, rng),
        wk_(ps, prefix + ".k", cfg.width, cfg.width, rng),
        wv_(ps, prefix + ".v", cfg.width, cfg.width, rng),
        wo_(ps, prefix + ".o", cfg.width, cfg.width, rng) {
    cfg.validate();
  }

  Mat<T> forward(const Mat<T>& tokens) {
    const Eigen::Index n = tokens.cols();
    if (n == 0) throw std::runtime_error("CausalAttention: empty sequence");
    if (cfg_.max_seq_len > 0 && n > cfg_.max_seq_len)
      throw std::runtime_error("CausalAttention: sequence longer than config");
    q_ = wq_.forward(tokens);
    k_ = wk_.forward(tokens);
    v_ = wv_.forward(tokens);
    const int h = cfg_.heads;
    const Eigen::Index dh = cfg_.width / h;
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));

    attn_.assign(h, Mat<T>());
    Mat<T> concat(cfg_.width, n);
    for (int hd = 0; hd < h; ++hd) {
      auto Q = q_.middleRows(hd * dh, dh);
      auto K = k_.middleRows(hd * dh, dh);
      auto V = v_.middleRows(hd * dh, dh);
      Mat<T> scores = (Q.transpose() * K) * scale;  // (n x n), row = query
      Mat<T>& A = attn_[hd];
      A = Mat<T>::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        // softmax over keys 0..i
        const auto row = scores.row(i).head(i + 1);
        const T mx = row.maxCoeff();
        Eigen::Array<T, 1, Eigen::Dynamic> e = (row.array() - mx).exp();
        A.row(i).head(i + 1) = (e / e.sum()).matrix();
      }
      concat.middleRows(hd * dh, dh) = V * A.transpose();
    }
    o_in_ = concat;
    return wo_.forward(concat);
  }

  Mat<T> backward(const Mat<T>& dout) {
    const Eigen::Index n = dout.cols();
    const int h = cfg_.heads;
    const Eigen::Index dh = cfg_.width / h;
    const T scale = T(1) / std::sqrt(static_cast<T>(dh));

    Mat<T> dconcat = wo_.backward(dout);
    Mat<T> dq(cfg_.width, n), dk(cfg_.width, n), dv(cfg_.width, n);
    for (int hd = 0; hd < h; ++hd) {
      auto dO = dconcat.middleRows(hd * dh, dh);
      auto Q = q_.middleRows(hd * dh, dh);
      auto K = k_.middleRows(hd * dh, dh);
      auto V = v_.middleRows(hd * dh, dh);
      const Mat<T>& A = attn_[hd];

      Mat<T> dV = dO * A;              // (dh x n)
      Mat<T> dA = dO.transpose() * V;  // (n x n)
      Mat<T> dS = Mat<T>::Zero(n, n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto a = A.row(i).head(i + 1).array();
        const auto da = dA.row(i).head(i + 1).array();
        const T dot = (a * da).sum();
        dS.row(i).head(i + 1) = (a * (da - dot)).matrix();
      }
      dq.middleRows(hd * dh, dh) = K * dS.transpose() * scale;
      dk.middleRows(hd * dh, dh) = Q * dS * scale;
      dv.middleRows(hd * dh, dh) = dV;
    }
    Mat<T> dx = wq_.backward(dq);
    dx += wk_.backward(dk);
    dx += wv_.backward(dv);
    return dx;
  }

  const AttentionConfig& config() const { return cfg_; }

 private:
  AttentionConfig cfg_;
  Linear<T> wq_, wk_, wv_, wo_;
  Mat<T> q_, k_, v_, o_in_;
  std::vector<Mat<T>> attn_;
};

// Pre-LN transformer block: x + Attn(LN(x)), then x + Mlp(LN(x)).
template <typename T>
class TransformerBlock {
 public:
  TransformerBlock() = default;
  TransformerBlock(ParameterSet<T>& ps, const std::string& prefix,
                   const AttentionConfig& cfg, Rng& rng)
      : ln1_(ps, prefix + ".ln1", cfg.width),
        attn_(ps, prefix + ".attn", cfg, rng),
        ln2_(ps, prefix + ".ln2", cfg.width),
        fc1_(ps, prefix + ".mlp.fc0", cfg.width, 4 * cfg.width, rng),
        fc2_(ps, prefix + ".mlp.fc1", 4 * cfg.width, cfg.width, rng) {}

  Mat<T> forward(const Mat<T>& x) {
    Mat<T> a = attn_.forward(ln1_.forward(x));
    Mat<T> y = x + a;
    pre_ = fc1_.forward(ln2_.forward(y));
    Mat<T> m = fc2_.forward(activate(Activation::SiLU, pre_));
    return y + m;
  }

  Mat<T> backward(const Mat<T>& dout) {
    Mat<T> dm = fc2_.backward(dout);
    dm = (dm.array() * activate_grad(Activation::SiLU, pre_).array()).matrix();
    Mat<T> dy = dout + ln2_.backward(fc1_.backward(dm));
    Mat<T> da = attn_.backward(dy);
    return dy + ln1_.backward(da);
  }

 private:
  LayerNorm<T> ln1_;
  CausalAttention<T> attn_;
  LayerNorm<T> ln2_;
  Linear<T> fc1_, fc2_;
  Mat<T> pre_;
};

}  // namespace gloc::nn
