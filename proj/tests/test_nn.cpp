#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gloc/nn/adaln.hpp"
#include "gloc/nn/adamw.hpp"
#include "gloc/nn/attention.hpp"
#include "gloc/nn/conv1d.hpp"
#include "gloc/nn/embedding.hpp"
#include "gloc/nn/gradcheck.hpp"
#include "gloc/nn/mlp.hpp"

using namespace gloc;
using namespace gloc::nn;

namespace {

Vecd randn_vec(Rng& rng, int n) {
  Vecd v(n);
  rng.fill_normal(v);
  return v;
}

}  // namespace

TEST_CASE("mlp identity network maps input through unchanged") {
  ParameterSet<double> ps;
  Rng rng(1);
  Mlp<double> net(ps, "net", {2, 2, 2}, rng, Activation::Linear);
  ps.at("net.fc0.w").value.setIdentity();
  ps.at("net.fc1.w").value.setIdentity();
  ps.at("net.fc0.b").value.setZero();
  ps.at("net.fc1.b").value.setZero();
  Vecd x(2);
  x << 1.0, 2.0;
  Vecd y = net.forward_vec(x);
  CHECK(y(0) == doctest::Approx(1.0));
  CHECK(y(1) == doctest::Approx(2.0));
}

TEST_CASE("mlp zero weights return the bias regardless of input") {
  ParameterSet<double> ps;
  Rng rng(2);
  Mlp<double> net(ps, "net", {3, 2}, rng, Activation::Linear);
  ps.at("net.fc0.w").value.setZero();
  ps.at("net.fc0.b").value << 0.5, -1.5;
  for (int k = 0; k < 3; ++k) {
    Vecd x = randn_vec(rng, 3);
    Vecd y = net.forward_vec(x);
    CHECK(y(0) == doctest::Approx(0.5));
    CHECK(y(1) == doctest::Approx(-1.5));
  }
}

TEST_CASE("mlp forward equals straight-line recomputation") {
  // Independent oracle: recompute W3 s(W2 s(W1 x + b1) + b2) + b3 directly.
  ParameterSet<double> ps;
  Rng rng(3);
  Mlp<double> net(ps, "net", {4, 5, 3, 2}, rng, Activation::SiLU);
  Vecd x = randn_vec(rng, 4);
  Vecd y = net.forward_vec(x);

  auto silu = [](const Vecd& v) {
    return Vecd((v.array() / (1.0 + (-v.array()).exp())).matrix());
  };
  Vecd h1 = silu(ps.at("net.fc0.w").value * x + ps.at("net.fc0.b").value);
  Vecd h2 = silu(ps.at("net.fc1.w").value * h1 + ps.at("net.fc1.b").value);
  Vecd ref = ps.at("net.fc2.w").value * h2 + ps.at("net.fc2.b").value;
  CHECK((y - ref).norm() < 1e-12);
}

TEST_CASE("mlp rejects shape mismatch naming the layer") {
  ParameterSet<double> ps;
  Rng rng(4);
  Mlp<double> net(ps, "net", {4, 2}, rng);
  Vecd x = randn_vec(rng, 3);
  CHECK_THROWS_WITH_AS(net.forward_vec(x),
                       doctest::Contains("layer 0"), std::runtime_error);
}

TEST_CASE("backward on identity net: loss 0.5*|y|^2 gives weight grad x x^T") {
  ParameterSet<double> ps;
  Rng rng(5);
  Mlp<double> net(ps, "net", {2, 2}, rng, Activation::Linear);
  ps.at("net.fc0.w").value.setIdentity();
  ps.at("net.fc0.b").value.setZero();
  Vecd x(2);
  x << 3.0, -1.0;
  Vecd y = net.forward_vec(x);
  net.backward(Mat<double>(y));  // d(0.5*|y|^2)/dy = y
  Matd expected = x * x.transpose();
  CHECK((ps.at("net.fc0.w").grad - expected).norm() < 1e-12);
}

TEST_CASE("backward before forward throws") {
  ParameterSet<double> ps;
  Rng rng(6);
  Mlp<double> net(ps, "net", {2, 2}, rng);
  CHECK_THROWS_AS(net.backward(Matd::Ones(2, 1)), std::runtime_error);
}

TEST_CASE("zero loss gradient leaves all parameter gradients zero") {
  ParameterSet<double> ps;
  Rng rng(7);
  Mlp<double> net(ps, "net", {3, 4, 2}, rng);
  net.forward_vec(randn_vec(rng, 3));
  net.backward(Matd::Zero(2, 1));
  CHECK(ps.grad_norm() == 0.0);
}

TEST_CASE("mlp analytic gradients match central finite differences") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ParameterSet<double> ps;
    Rng rng(100 + seed);
    Mlp<double> net(ps, "net", {3, 5, 4, 2}, rng, Activation::SiLU);
    Vecd x = randn_vec(rng, 3);
    Vecd target = randn_vec(rng, 2);
    auto loss = [&]() {
      Vecd y = net.forward_vec(x);
      return 0.5 * (y - target).squaredNorm();
    };
    auto grads = [&]() {
      Vecd y = net.forward_vec(x);
      net.backward(Matd(y - target));
    };
    auto res = check_gradients(ps, loss, grads);
    INFO("worst param: ", res.worst_param);
    CHECK(res.max_rel_err < 1e-4);
  }
}

TEST_CASE("adamw first step matches hand-applied update") {
  ParameterSet<double> ps;
  auto& p = ps.add("w", 1, 1);
  p.value(0, 0) = 1.0;
  p.grad(0, 0) = 1.0;
  OptimizerConfig cfg;
  cfg.lr = 0.1;
  cfg.weight_decay = 0.0;
  cfg.max_grad_norm = 0.0;  // no clipping
  adamw_step(ps, cfg, 1);
  // m-hat = v-hat = 1 after bias correction: w = 1 - 0.1 * 1/(1 + eps)
  CHECK(p.value(0, 0) == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(p.grad(0, 0) == 0.0);
}

TEST_CASE("adamw with zero gradient and zero decay is the identity") {
  ParameterSet<double> ps;
  Rng rng(8);
  auto& p = ps.add("w", 3, 3);
  rng.fill_normal(p.value);
  Matd before = p.value;
  OptimizerConfig cfg;
  cfg.weight_decay = 0.0;
  for (int s = 1; s <= 5; ++s) adamw_step(ps, cfg, s);
  CHECK((p.value - before).norm() == 0.0);
}

TEST_CASE("gradient clipping scales to the max norm before moments") {
  ParameterSet<double> ps;
  auto& p = ps.add("w", 4, 1);
  p.grad << 6.0, 8.0, 0.0, 0.0;  // norm 10
  const double pre = clip_grad_norm(ps, 1.0);
  CHECK(pre == doctest::Approx(10.0));
  CHECK(ps.grad_norm() == doctest::Approx(1.0));
  CHECK(p.grad(0) == doctest::Approx(0.6));
  CHECK(p.grad(1) == doctest::Approx(0.8));
}

TEST_CASE("post-clip norm never exceeds the configured max") {
  Rng rng(9);
  for (int k = 0; k < 20; ++k) {
    ParameterSet<double> ps;
    auto& p = ps.add("w", 5, 2);
    rng.fill_normal(p.grad);
    p.grad *= rng.uniform(0.0, 4.0);
    clip_grad_norm(ps, 1.0);
    CHECK(ps.grad_norm() <= 1.0 + 1e-12);
  }
}

TEST_CASE("adamw rejects non-finite gradients naming the parameter") {
  ParameterSet<double> ps;
  auto& p = ps.add("bad.w", 2, 1);
  p.grad << 1.0, std::numeric_limits<double>::quiet_NaN();
  OptimizerConfig cfg;
  CHECK_THROWS_WITH_AS(adamw_step(ps, cfg, 1), doctest::Contains("bad.w"),
                       std::runtime_error);
}

TEST_CASE("causal attention output i ignores perturbations of token j > i") {
  ParameterSet<double> ps;
  Rng rng(10);
  AttentionConfig cfg{.max_seq_len = 8, .width = 12, .heads = 3};
  CausalAttention<double> attn(ps, "attn", cfg, rng);
  Matd tokens(12, 5);
  rng.fill_normal(tokens);
  Matd out1 = attn.forward(tokens);
  Matd tokens2 = tokens;
  tokens2.col(4).setConstant(99.0);  // perturb the last token
  Matd out2 = attn.forward(tokens2);
  for (int i = 0; i < 4; ++i)
    CHECK((out1.col(i) - out2.col(i)).norm() == 0.0);  // bit-identical
  CHECK((out1.col(4) - out2.col(4)).norm() > 0.0);
}

TEST_CASE("zero query/key projections give uniform attention over prefix") {
  ParameterSet<double> ps;
  Rng rng(11);
  AttentionConfig cfg{.max_seq_len = 8, .width = 4, .heads = 1};
  CausalAttention<double> attn(ps, "attn", cfg, rng);
  ps.at("attn.q.w").value.setZero();
  ps.at("attn.q.b").value.setZero();
  ps.at("attn.k.w").value.setZero();
  ps.at("attn.k.b").value.setZero();
  ps.at("attn.o.w").value.setIdentity();
  ps.at("attn.o.b").value.setZero();
  Matd tokens(4, 3);
  rng.fill_normal(tokens);
  Matd out = attn.forward(tokens);
  // Output i should equal the mean of value projections over 0..i.
  const Matd& vw = ps.at("attn.v.w").value;
  const Vecd vb = ps.at("attn.v.b").value.col(0);
  Matd vproj = (vw * tokens).colwise() + vb;
  for (int i = 0; i < 3; ++i) {
    Vecd mean = vproj.leftCols(i + 1).rowwise().mean();
    CHECK((out.col(i) - mean).norm() < 1e-12);
  }
}

TEST_CASE("single token attention returns its value projection") {
  ParameterSet<double> ps;
  Rng rng(12);
  AttentionConfig cfg{.max_seq_len = 4, .width = 6, .heads = 2};
  CausalAttention<double> attn(ps, "attn", cfg, rng);
  ps.at("attn.o.w").value.setIdentity();
  ps.at("attn.o.b").value.setZero();
  Matd tok(6, 1);
  rng.fill_normal(tok);
  Matd out = attn.forward(tok);
  const Matd& vw = ps.at("attn.v.w").value;
  const Vecd vb = ps.at("attn.v.b").value.col(0);
  CHECK((out.col(0) - (vw * tok.col(0) + vb)).norm() < 1e-12);
}

TEST_CASE("attention rejects an empty sequence") {
  ParameterSet<double> ps;
  Rng rng(13);
  AttentionConfig cfg{.max_seq_len = 4, .width = 6, .heads = 2};
  CausalAttention<double> attn(ps, "attn", cfg, rng);
  CHECK_THROWS_AS(attn.forward(Matd(6, 0)), std::runtime_error);
}

TEST_CASE("attention config requires head count dividing width") {
  AttentionConfig cfg{.max_seq_len = 4, .width = 6, .heads = 4};
  CHECK_THROWS_AS(cfg.validate(), std::runtime_error);
}

TEST_CASE("attention gradients match finite differences") {
  ParameterSet<double> ps;
  Rng rng(14);
  AttentionConfig cfg{.max_seq_len = 6, .width = 8, .heads = 2};
  CausalAttention<double> attn(ps, "attn", cfg, rng);
  Matd tokens(8, 4);
  rng.fill_normal(tokens);
  Matd target(8, 4);
  rng.fill_normal(target);
  auto loss = [&]() {
    Matd y = attn.forward(tokens);
    return 0.5 * (y - target).squaredNorm();
  };
  auto grads = [&]() {
    Matd y = attn.forward(tokens);
    attn.backward(Matd(y - target));
  };
  auto res = check_gradients(ps, loss, grads);
  INFO("worst param: ", res.worst_param);
  CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("transformer block gradients match finite differences") {
  ParameterSet<double> ps;
  Rng rng(15);
  AttentionConfig cfg{.max_seq_len = 5, .width = 6, .heads = 2};
  TransformerBlock<double> block(ps, "blk", cfg, rng);
  Matd tokens(6, 3);
  rng.fill_normal(tokens);
  Matd target(6, 3);
  rng.fill_normal(target);
  auto loss = [&]() {
    Matd y = block.forward(tokens);
    return 0.5 * (y - target).squaredNorm();
  };
  auto grads = [&]() {
    Matd y = block.forward(tokens);
    block.backward(Matd(y - target));
  };
  auto res = check_gradients(ps, loss, grads);
  INFO("worst param: ", res.worst_param);
  CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("adaln with zero projections is plain layer normalization") {
  ParameterSet<double> ps;
  Rng rng(16);
  AdaLn<double> mod(ps, "ada", 5, 3, rng);
  Vecd f = randn_vec(rng, 5);
  Vecd c = randn_vec(rng, 3);
  Matd out = mod.forward(Matd(f), Matd(c));
  const double mu = f.mean();
  const double var = (f.array() - mu).square().sum() / 5.0;
  Vecd ln = ((f.array() - mu) / std::sqrt(var + kLayerNormEps)).matrix();
  CHECK((out.col(0) - ln).norm() < 1e-12);
}

TEST_CASE("adaln on a constant feature vector returns the shift") {
  ParameterSet<double> ps;
  Rng rng(17);
  AdaLn<double> mod(ps, "ada", 4, 2, rng);
  rng.fill_normal(ps.at("ada.scale.w").value);
  rng.fill_normal(ps.at("ada.shift.w").value);
  Vecd f = Vecd::Constant(4, 2.5);  // zero variance -> normalized to 0
  Vecd c = randn_vec(rng, 2);
  Matd out = mod.forward(Matd(f), Matd(c));
  Vecd shift = ps.at("ada.shift.w").value * c + ps.at("ada.shift.b").value;
  CHECK((out.col(0) - shift).norm() < 1e-10);
}

TEST_CASE("adaln matches an independent recomputation of the formula") {
  ParameterSet<double> ps;
  Rng rng(18);
  AdaLn<double> mod(ps, "ada", 6, 4, rng);
  rng.fill_normal(ps.at("ada.scale.w").value);
  rng.fill_normal(ps.at("ada.shift.w").value);
  rng.fill_normal(ps.at("ada.scale.b").value);
  rng.fill_normal(ps.at("ada.shift.b").value);
  Vecd f = randn_vec(rng, 6);
  Vecd c = randn_vec(rng, 4);
  Matd out = mod.forward(Matd(f), Matd(c));

  const double mu = f.mean();
  const double var = (f.array() - mu).square().sum() / 6.0;
  Vecd xhat = ((f.array() - mu) / std::sqrt(var + kLayerNormEps)).matrix();
  Vecd scale = ps.at("ada.scale.w").value * c + ps.at("ada.scale.b").value;
  Vecd shift = ps.at("ada.shift.w").value * c + ps.at("ada.shift.b").value;
  Vecd ref =
      (xhat.array() * (1.0 + scale.array()) + shift.array()).matrix();
  CHECK((out.col(0) - ref).norm() < 1e-12);
}

TEST_CASE("adaln gradients (features and condition paths) match FD") {
  ParameterSet<double> ps;
  Rng rng(19);
  AdaLn<double> mod(ps, "ada", 5, 3, rng);
  rng.fill_normal(ps.at("ada.scale.w").value);
  rng.fill_normal(ps.at("ada.shift.w").value);
  Matd f(5, 2), c(3, 2), target(5, 2);
  rng.fill_normal(f);
  rng.fill_normal(c);
  rng.fill_normal(target);
  auto loss = [&]() {
    Matd y = mod.forward(f, c);
    return 0.5 * (y - target).squaredNorm();
  };
  auto grads = [&]() {
    Matd y = mod.forward(f, c);
    Matd dc = Matd::Zero(3, 2);
    mod.backward(Matd(y - target), dc);
  };
  auto res = check_gradients(ps, loss, grads);
  CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("causal conv1d gradients match finite differences") {
  for (auto [kernel, stride] : {std::pair{3, 1}, std::pair{4, 4}}) {
    ParameterSet<double> ps;
    Rng rng(20 + kernel);
    CausalConv1d<double> conv(ps, "conv", 3, 2, kernel, stride, rng);
    Matd x(3, 9);
    rng.fill_normal(x);
    Matd target(2, conv.out_steps(9));
    rng.fill_normal(target);
    auto loss = [&]() {
      Matd y = conv.forward(x);
      return 0.5 * (y - target).squaredNorm();
    };
    auto grads = [&]() {
      Matd y = conv.forward(x);
      conv.backward(Matd(y - target));
    };
    auto res = check_gradients(ps, loss, grads);
    CHECK(res.max_rel_err < 1e-4);
  }
}

TEST_CASE("strided causal conv token t sees only its input chunk") {
  ParameterSet<double> ps;
  Rng rng(22);
  CausalConv1d<double> conv(ps, "conv", 2, 3, 4, 4, rng);
  Matd x(2, 12);
  rng.fill_normal(x);
  Matd y1 = conv.forward(x);
  Matd x2 = x;
  x2.col(8).setConstant(50.0);  // inside the third chunk
  Matd y2 = conv.forward(x2);
  CHECK((y1.col(0) - y2.col(0)).norm() == 0.0);
  CHECK((y1.col(1) - y2.col(1)).norm() == 0.0);
  CHECK((y1.col(2) - y2.col(2)).norm() > 0.0);
}

TEST_CASE("forward passes are deterministic given parameters and inputs") {
  ParameterSet<double> ps;
  Rng rng(23);
  Mlp<double> net(ps, "net", {4, 8, 3}, rng);
  Vecd x = randn_vec(rng, 4);
  Vecd y1 = net.forward_vec(x);
  Vecd y2 = net.forward_vec(x);
  CHECK((y1 - y2).norm() == 0.0);
}

TEST_CASE("embedding lookup and gradient accumulation") {
  ParameterSet<double> ps;
  Rng rng(24);
  Embedding<double> emb(ps, "emb", 4, 3, rng);
  Vecd v = emb.lookup(1);
  CHECK(v.size() == 4);
  CHECK_THROWS_AS(emb.lookup(3), std::runtime_error);
  Vecd g = Vecd::Ones(4);
  emb.accumulate_grad(1, g);
  CHECK(ps.at("emb").grad.col(1).sum() == doctest::Approx(4.0));
  CHECK(ps.at("emb").grad.col(0).norm() == 0.0);
}
