#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "dlad/adam.hpp"
#include "dlad/error.hpp"
#include "dlad/losses.hpp"
#include "dlad/model.hpp"
#include "dlad/rng.hpp"

using namespace dlad;

namespace {

ModelSpec softmax_spec(std::size_t in, std::vector<LayerSpec> hidden,
                       std::size_t out) {
  ModelSpec s;
  s.input_dim = in;
  s.hidden = std::move(hidden);
  s.output_dim = out;
  s.head = Head::Softmax;
  return s;
}

ModelSpec sigmoid_spec(std::size_t in, std::vector<LayerSpec> hidden) {
  ModelSpec s;
  s.input_dim = in;
  s.hidden = std::move(hidden);
  s.output_dim = 1;
  s.head = Head::Sigmoid;
  return s;
}

Tensor batch_of(std::vector<std::vector<double>> rows) {
  Tensor t = Tensor::matrix(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) t.at(i, j) = rows[i][j];
  }
  return t;
}

}  // namespace

TEST_CASE("tensor shape mismatch is rejected") {
  CHECK_THROWS_AS(Tensor({2, 3}, {1.0, 2.0}), ShapeError);
}

TEST_CASE("zero-weight softmax model emits exactly uniform rows") {
  ModelSpec spec = softmax_spec(4, {}, 10);
  ModelParams params = zeros_like(spec);
  Tensor out = forward(spec, params, batch_of({{0.3, -1.0, 2.0, 0.0}}));
  for (std::size_t j = 0; j < 10; ++j) {
    CHECK(out.at(0, j) == out.at(0, 0));  // symmetry is exact
    CHECK(out.at(0, j) == doctest::Approx(0.1).epsilon(1e-12));
  }
}

TEST_CASE("zero-weight sigmoid model emits 0.5") {
  ModelSpec spec = sigmoid_spec(3, {{8, Activation::Relu}});
  ModelParams params = zeros_like(spec);
  Tensor out = forward(spec, params, batch_of({{1.0, 2.0, 3.0}, {0, 0, 0}}));
  CHECK(out.at(0, 0) == 0.5);
  CHECK(out.at(1, 0) == 0.5);
}

TEST_CASE("2-2-2 net matches a by-hand forward pass") {
  // One hidden layer of width 2; weights set by hand, expectation computed
  // with plain scalar arithmetic right here.
  ModelSpec spec = softmax_spec(2, {{2, Activation::Relu}}, 2);
  ModelParams params = zeros_like(spec);
  params.weights[0].values = {0.1, -0.2, 0.3, 0.4};  // [[.1,-.2],[.3,.4]]
  params.biases[0].values = {0.05, -0.05};
  params.weights[1].values = {-0.5, 0.6, 0.7, -0.8};
  params.biases[1].values = {0.0, 0.1};

  double x0 = 1.0, x1 = 2.0;
  double z0 = x0 * 0.1 + x1 * 0.3 + 0.05;   // 0.75
  double z1 = x0 * -0.2 + x1 * 0.4 - 0.05;  // 0.55
  double a0 = std::max(z0, 0.0), a1 = std::max(z1, 0.0);
  double l0 = a0 * -0.5 + a1 * 0.7 + 0.0;
  double l1 = a0 * 0.6 + a1 * -0.8 + 0.1;
  double e0 = std::exp(l0 - std::max(l0, l1));
  double e1 = std::exp(l1 - std::max(l0, l1));
  double p0 = e0 / (e0 + e1), p1 = e1 / (e0 + e1);

  Tensor out = forward(spec, params, batch_of({{x0, x1}}));
  CHECK(out.at(0, 0) == doctest::Approx(p0).epsilon(1e-15));
  CHECK(out.at(0, 1) == doctest::Approx(p1).epsilon(1e-15));

  // tanh variant through the same weights
  spec.hidden[0].act = Activation::Tanh;
  double t0 = std::tanh(z0), t1 = std::tanh(z1);
  double m0 = t0 * -0.5 + t1 * 0.7;
  double m1 = t0 * 0.6 + t1 * -0.8 + 0.1;
  double f0 = std::exp(m0 - std::max(m0, m1));
  double f1 = std::exp(m1 - std::max(m0, m1));
  Tensor out2 = forward(spec, params, batch_of({{x0, x1}}));
  CHECK(out2.at(0, 0) == doctest::Approx(f0 / (f0 + f1)).epsilon(1e-15));
  CHECK(out2.at(0, 1) == doctest::Approx(f1 / (f0 + f1)).epsilon(1e-15));
}

TEST_CASE("forward rejects width mismatches with a dimension report") {
  ModelSpec spec = softmax_spec(4, {}, 3);
  ModelParams params = zeros_like(spec);
  try {
    forward(spec, params, batch_of({{1.0, 2.0}}));
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    std::string msg = e.what();
    CHECK(msg.find("1x2") != std::string::npos);
    CHECK(msg.find("4") != std::string::npos);
  }
}

TEST_CASE("softmax rows sum to one within 1e-9 for random models") {
  Rng rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    ModelSpec spec = softmax_spec(6, {{9, Activation::Tanh}}, 7);
    ModelParams params = init_params(spec, rng);
    Tensor batch = Tensor::matrix(11, 6);
    for (double& v : batch.values) v = rng.next_double();
    Tensor out = forward(spec, params, batch);
    for (std::size_t i = 0; i < out.rows(); ++i) {
      double sum = 0.0;
      for (std::size_t j = 0; j < out.cols(); ++j) {
        CHECK(out.at(i, j) >= 0.0);
        CHECK(out.at(i, j) <= 1.0);
        sum += out.at(i, j);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

// --- losses -----------------------------------------------------------------

TEST_CASE("soft cross-entropy fixtures") {
  Tensor onehot = batch_of({{0, 1, 0}});
  CHECK(soft_cross_entropy(onehot, onehot) ==
        doctest::Approx(0.0).epsilon(1e-12));

  Tensor uniform = batch_of({std::vector<double>(10, 0.1)});
  CHECK(soft_cross_entropy(uniform, uniform) ==
        doctest::Approx(std::log(10.0)).epsilon(1e-12));

  Tensor target = batch_of({{0.8, 0.2}});
  Tensor pred = batch_of({{0.5, 0.5}});
  CHECK(soft_cross_entropy(target, pred) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  Tensor bad = batch_of({{0.5, 0.4}});
  CHECK_THROWS_AS(soft_cross_entropy(bad, pred), ValueError);
  CHECK_THROWS_AS(soft_cross_entropy(target, bad), ValueError);
}

TEST_CASE("weighted binary cross-entropy fixtures") {
  Tensor half = batch_of({{0.5}, {0.5}, {0.5}});
  Tensor ones = Tensor({3}, {1, 1, 0});
  Tensor w1 = Tensor({3}, {1, 1, 1});
  CHECK(weighted_binary_cross_entropy(half, ones, w1) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // Weighted mean normalizes by the weight sum: one sample, weight 1.5.
  Tensor p = Tensor({1}, {0.9});
  Tensor y = Tensor({1}, {1.0});
  Tensor w = Tensor({1}, {1.5});
  CHECK(weighted_binary_cross_entropy(p, y, w) ==
        doctest::Approx(-std::log(0.9)).epsilon(1e-12));

  Tensor near_one = Tensor({1}, {1.0 - 1e-9});
  CHECK(weighted_binary_cross_entropy(near_one, y, w) < 1e-8);

  Tensor w_bad = Tensor({1}, {0.0});
  CHECK_THROWS_AS(weighted_binary_cross_entropy(p, y, w_bad), ValueError);
}

TEST_CASE("equal weights reduce weighted BCE to the plain mean") {
  Rng rng(77);
  Tensor p = Tensor::vec(20);
  Tensor y = Tensor::vec(20);
  for (std::size_t i = 0; i < 20; ++i) {
    p[i] = 0.05 + 0.9 * rng.next_double();
    y[i] = rng.next_below(2) ? 1.0 : 0.0;
  }
  Tensor w_const = Tensor({20}, std::vector<double>(20, 3.7));
  double plain = 0.0;
  for (std::size_t i = 0; i < 20; ++i) {
    plain += -(y[i] * std::log(p[i]) + (1 - y[i]) * std::log(1 - p[i]));
  }
  plain /= 20.0;
  CHECK(weighted_binary_cross_entropy(p, y, w_const) ==
        doctest::Approx(plain).epsilon(1e-12));
}

// --- gradients ---------------------------------------------------------------

namespace {

double loss_at(const ModelSpec& spec, const ModelParams& params,
               const Tensor& batch, const LossSpec& loss) {
  return loss_value(forward(spec, params, batch), loss);
}

// Central finite differences over every parameter.
double max_rel_gradient_error(const ModelSpec& spec, ModelParams params,
                              const Tensor& batch, const LossSpec& loss) {
  const double h = 1e-5;
  Gradients analytic = backward(spec, params, batch, loss);
  double worst = 0.0;
  auto probe = [&](Tensor& p, const Tensor& g) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      double saved = p[i];
      p[i] = saved + h;
      double up = loss_at(spec, params, batch, loss);
      p[i] = saved - h;
      double down = loss_at(spec, params, batch, loss);
      p[i] = saved;
      double fd = (up - down) / (2.0 * h);
      double denom = std::max({std::abs(fd), std::abs(g[i]), 1e-6});
      worst = std::max(worst, std::abs(fd - g[i]) / denom);
    }
  };
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    probe(params.weights[l], analytic.weights[l]);
    probe(params.biases[l], analytic.biases[l]);
  }
  return worst;
}

}  // namespace

TEST_CASE("gradient vanishes at a constructed stationary point") {
  ModelSpec spec = softmax_spec(3, {}, 4);
  ModelParams params = zeros_like(spec);
  Tensor batch = batch_of({{0.2, 0.4, 0.6}, {0.1, 0.5, 0.9}});
  Tensor uniform =
      batch_of({std::vector<double>(4, 0.25), std::vector<double>(4, 0.25)});
  Gradients g = backward(spec, params, batch, SoftTargetLoss{&uniform});
  for (const Tensor& t : g.weights) {
    for (double v : t.values) CHECK(v == 0.0);
  }
  for (const Tensor& t : g.biases) {
    for (double v : t.values) CHECK(v == 0.0);
  }
}

TEST_CASE("analytic gradients match central finite differences") {
  struct Arch {
    std::vector<LayerSpec> hidden;
    std::size_t in, out;
  };
  std::vector<Arch> archs = {
      {{}, 4, 3},
      {{{6, Activation::Relu}}, 5, 4},
      {{{5, Activation::Tanh}, {4, Activation::Relu}}, 3, 2},
  };
  for (std::size_t a = 0; a < archs.size(); ++a) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      Rng rng(1000 * (a + 1) + seed);

      // softmax head + soft targets
      ModelSpec spec = softmax_spec(archs[a].in, archs[a].hidden, archs[a].out);
      ModelParams params = init_params(spec, rng);
      Tensor batch = Tensor::matrix(6, archs[a].in);
      for (double& v : batch.values) v = 2.0 * rng.next_double() - 1.0;
      Tensor targets = Tensor::matrix(6, archs[a].out);
      for (std::size_t i = 0; i < 6; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < archs[a].out; ++j) {
          targets.at(i, j) = 0.1 + rng.next_double();
          sum += targets.at(i, j);
        }
        for (std::size_t j = 0; j < archs[a].out; ++j) targets.at(i, j) /= sum;
      }
      CHECK(max_rel_gradient_error(spec, params, batch,
                                   SoftTargetLoss{&targets}) < 1e-3);

      // sigmoid head + weighted BCE
      ModelSpec bspec = sigmoid_spec(archs[a].in, archs[a].hidden);
      ModelParams bparams = init_params(bspec, rng);
      Tensor labels = Tensor::vec(6);
      Tensor weights = Tensor::vec(6);
      for (std::size_t i = 0; i < 6; ++i) {
        labels[i] = rng.next_below(2) ? 1.0 : 0.0;
        weights[i] = i % 2 == 0 ? 1.5 : 1.0;
      }
      CHECK(max_rel_gradient_error(bspec, bparams, batch,
                                   WeightedBceLoss{&labels, &weights}) < 1e-3);
    }
  }
}

TEST_CASE("linear softmax gradient equals (pred - target) outer input") {
  ModelSpec spec = softmax_spec(3, {}, 2);
  Rng rng(5);
  ModelParams params = init_params(spec, rng);
  Tensor x = batch_of({{0.5, -0.3, 0.8}});
  Tensor target = batch_of({{1.0, 0.0}});
  Tensor pred = forward(spec, params, x);
  Gradients g = backward(spec, params, x, SoftTargetLoss{&target});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      double expected = x.at(0, i) * (pred.at(0, j) - target.at(0, j));
      CHECK(g.weights[0].at(i, j) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(g.biases[0][j] ==
          doctest::Approx(pred.at(0, j) - target.at(0, j)).epsilon(1e-12));
  }
}

// --- adam ---------------------------------------------------------------------

TEST_CASE("zero gradient leaves parameters bit-identical") {
  ModelSpec spec = softmax_spec(3, {{4, Activation::Relu}}, 2);
  Rng rng(9);
  ModelParams params = init_params(spec, rng);
  ModelParams before = params;
  AdamState state = adam_init(spec);
  Gradients zero = zeros_like(spec);
  for (int i = 0; i < 5; ++i) adam_step(params, zero, state);
  CHECK(params == before);
  CHECK(state.step == 5);
}

TEST_CASE("moments decay toward zero after the driving gradient stops") {
  ModelSpec spec = softmax_spec(2, {}, 2);
  ModelParams params = zeros_like(spec);
  AdamState state = adam_init(spec);
  Gradients g = zeros_like(spec);
  g.weights[0].values = {1.0, -1.0, 0.5, -0.5};
  adam_step(params, g, state);
  double m_after_push = std::abs(state.m.weights[0][0]);
  Gradients zero = zeros_like(spec);
  for (int i = 0; i < 10; ++i) {
    double prev = std::abs(state.m.weights[0][0]);
    adam_step(params, zero, state);
    CHECK(std::abs(state.m.weights[0][0]) < prev);
  }
  CHECK(std::abs(state.m.weights[0][0]) < m_after_push * 0.4);
}

TEST_CASE("first step matches the closed form") {
  // Bias correction at t=1 gives mhat = g and vhat = g^2, so the update is
  // exactly lr * g / (|g| + eps).
  ModelSpec spec = softmax_spec(2, {}, 2);
  ModelParams params = zeros_like(spec);
  for (double& v : params.weights[0].values) v = 1.0;
  AdamState state = adam_init(spec);
  Gradients g = zeros_like(spec);
  g.weights[0].values = {0.5, -0.25, 2.0, -1e-3};
  adam_step(params, g, state);
  const AdamHyper& h = state.hyper;
  for (std::size_t i = 0; i < 4; ++i) {
    double gi = g.weights[0][i];
    double expected = 1.0 - h.lr * gi / (std::abs(gi) + h.epsilon);
    CHECK(params.weights[0][i] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(state.step == 1);
}

TEST_CASE("adam is deterministic") {
  ModelSpec spec = softmax_spec(3, {{4, Activation::Tanh}}, 2);
  auto run = [&] {
    Rng rng(123);
    ModelParams params = init_params(spec, rng);
    AdamState state = adam_init(spec);
    Tensor batch = Tensor::matrix(4, 3);
    Tensor targets = Tensor::matrix(4, 2);
    for (double& v : batch.values) v = rng.next_double();
    for (std::size_t i = 0; i < 4; ++i) {
      targets.at(i, 0) = 0.3;
      targets.at(i, 1) = 0.7;
    }
    for (int step = 0; step < 10; ++step) {
      Gradients grads =
          backward(spec, params, batch, SoftTargetLoss{&targets});
      adam_step(params, grads, state);
    }
    return params;
  };
  CHECK(run() == run());
}
