#include <cmath>
#include <random>

#include "doctest.h"
#include "gradcheck.hpp"
#include "risvec/adam.hpp"
#include "risvec/mlp.hpp"
#include "test_support.hpp"

using namespace risvec;
using risvec::testing::gradient_check;
using risvec::testing::rel_err;

TEST_CASE("spec describe/parse round trip") {
  const MlpSpec s = MlpSpec::make(28, {64, 32}, 1, OutputActivation::kIdentity);
  CHECK(s.describe() == "28-64-32-1:identity");
  CHECK(MlpSpec::parse(s.describe()) == s);
  CHECK(MlpSpec::parse("5-8-2:sigmoid").output == OutputActivation::kSigmoid);
  CHECK_THROWS(MlpSpec::parse("5-x-2:tanh"));
  CHECK_THROWS(MlpSpec::parse("5-8-2:relu"));
  CHECK_THROWS(MlpSpec::parse("5"));
}

TEST_CASE("init examples") {
  const MlpSpec s = MlpSpec::make(4, {8}, 3, OutputActivation::kTanh);
  Rng a(1), b(1);
  const ParameterSet p = init_parameters(s, a);
  const ParameterSet q = init_parameters(s, b);
  CHECK((p.weights[0].array().abs() <= 0.5).all());
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    CHECK(p.weights[l] == q.weights[l]);
    CHECK(p.biases[l].isZero());
  }
}

TEST_CASE("forward examples") {
  const MlpSpec lin{{3, 2}, OutputActivation::kIdentity};
  Rng rng(2);
  ParameterSet p = init_parameters(lin, rng);
  const Eigen::Vector3d x(0.5, -1.0, 2.0);
  CHECK((forward(p, lin, x) - p.weights[0] * x).norm() < 1e-15);

  ParameterSet z = ParameterSet::zeros_like(init_parameters(MlpSpec::make(3, {4}, 2, OutputActivation::kIdentity), rng));
  CHECK(forward(z, MlpSpec::make(3, {4}, 2, OutputActivation::kIdentity), x).isZero());

  const MlpSpec t = MlpSpec::make(6, {16, 16}, 4, OutputActivation::kTanh);
  const ParameterSet pt = init_parameters(t, rng);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd in(6);
    for (auto& v : in) v = n(rng);
    const Eigen::VectorXd y = forward(pt, t, in);
    CHECK((y.array().abs() < 1.0).all());
    CHECK(forward(pt, t, in) == y);
  }
}

TEST_CASE("batched and single-sample paths agree") {
  Rng rng(3);
  const MlpSpec s = MlpSpec::make(5, {7, 6}, 2, OutputActivation::kSigmoid);
  const ParameterSet p = init_parameters(s, rng);
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(5, 4);
  const Eigen::MatrixXd y = forward_batch(p, s, x);
  for (int c = 0; c < 4; ++c) CHECK((y.col(c) - forward(p, s, x.col(c))).norm() < 1e-14);
}

TEST_CASE("linear layer gradient is the outer product") {
  const MlpSpec lin{{3, 2}, OutputActivation::kIdentity};
  Rng rng(4);
  const ParameterSet p = init_parameters(lin, rng);
  const Eigen::Vector3d x(1.0, 2.0, -0.5);
  const Eigen::Vector2d up(0.3, -0.7);
  const auto r = backward(p, lin, x, up);
  CHECK((r.grads.weights[0] - up * x.transpose()).norm() < 1e-15);
  CHECK((r.grads.biases[0] - up).norm() < 1e-15);
  CHECK((r.input_grad - p.weights[0].transpose() * up).norm() < 1e-15);
}

TEST_CASE("backward matches central finite differences on 100 random networks") {
  Rng rng(5);
  std::uniform_int_distribution<int> width(1, 12), depth(0, 3), act(0, 2);
  double worst = 0.0;
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    std::vector<int> hidden(static_cast<std::size_t>(depth(rng)));
    for (auto& h : hidden) h = width(rng);
    const MlpSpec s = MlpSpec::make(width(rng), hidden, width(rng), static_cast<OutputActivation>(act(rng)));
    const auto r = gradient_check(s, rng);
    worst = std::max(worst, r.max_rel_err);
    checked += r.checked;
  }
  CHECK(checked > 1000);
  CHECK(worst <= 1e-4);
}

TEST_CASE("adam examples") {
  Rng rng(6);
  const MlpSpec s = MlpSpec::make(3, {4}, 2, OutputActivation::kIdentity);
  ParameterSet p = init_parameters(s, rng);
  const ParameterSet p0 = p;
  AdamState st = AdamState::for_params(p, 1e-2);
  adam_step(p, ParameterSet::zeros_like(p), st);
  CHECK(st.step == 1);
  for (std::size_t l = 0; l < p.weights.size(); ++l) CHECK(p.weights[l] == p0.weights[l]);

  ParameterSet q = p0;
  AdamState st2 = AdamState::for_params(q, 1e-2);
  ParameterSet g = ParameterSet::zeros_like(q);
  for (auto& w : g.weights) w.setRandom();
  for (auto& b : g.biases) b.setConstant(-3.0);
  adam_step(q, g, st2);
  for (std::size_t l = 0; l < q.weights.size(); ++l) {
    const Eigen::MatrixXd step = q.weights[l] - p0.weights[l];
    const Eigen::MatrixXd expected = -1e-2 * g.weights[l].array().sign().matrix();
    CHECK((step - expected).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(((q.biases[l] - p0.biases[l]).array() - 1e-2).abs().maxCoeff() < 1e-8);
  }
  CHECK(st2.step == 1);
}

TEST_CASE("soft update examples and geometric decay") {
  Rng rng(7);
  const MlpSpec s = MlpSpec::make(4, {6}, 2, OutputActivation::kTanh);
  const ParameterSet src = init_parameters(s, rng);
  ParameterSet tgt = init_parameters(s, rng);
  const ParameterSet t0 = tgt;

  ParameterSet a = tgt;
  soft_update(a, src, 1.0);
  CHECK(a.weights[0] == src.weights[0]);
  ParameterSet b = tgt;
  soft_update(b, src, 0.0);
  CHECK(b.weights[0] == t0.weights[0]);
  CHECK_THROWS(soft_update(b, src, 1.5));

  const double tau = 0.005;
  const int n = 1000;
  for (int i = 0; i < n; ++i) soft_update(tgt, src, tau);
  ParameterSet d0 = t0, dn = tgt;
  d0.add_scaled(src, -1.0);
  dn.add_scaled(src, -1.0);
  const double expected = std::pow(1.0 - tau, n);
  CHECK(rel_err(std::sqrt(dn.squared_norm()), expected * std::sqrt(d0.squared_norm())) <= 1e-6);
  CHECK(expected == doctest::Approx(0.0067).epsilon(0.01));
}

TEST_CASE("global-norm clipping") {
  Rng rng(8);
  const MlpSpec s = MlpSpec::make(4, {6}, 2, OutputActivation::kIdentity);
  ParameterSet g = init_parameters(s, rng);
  g.scale(100.0);
  const double before = std::sqrt(g.squared_norm());
  CHECK(clip_global_norm(g, 1.0) == doctest::Approx(before));
  CHECK(std::sqrt(g.squared_norm()) == doctest::Approx(1.0));
  ParameterSet small = ParameterSet::zeros_like(g);
  small.weights[0](0, 0) = 0.5;
  clip_global_norm(small, 1.0);
  CHECK(small.weights[0](0, 0) == 0.5);
}

TEST_CASE("parameter set algebra") {
  Rng rng(9);
  const MlpSpec s = MlpSpec::make(3, {5}, 1, OutputActivation::kIdentity);
  ParameterSet p = init_parameters(s, rng);
  CHECK(p.num_scalars() == 3 * 5 + 5 + 5 + 1);
  CHECK(p.all_finite());
  CHECK(p.same_shape(ParameterSet::zeros_like(p)));
  p.weights[0](0, 0) = std::nan("");
  CHECK_FALSE(p.all_finite());
}
