// Copyright 2026 The sgx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>

#include "fixtures.hpp"
#include "sgx/checkpoint.hpp"
#include "sgx/errors.hpp"
#include "sgx/grad_check.hpp"
#include "sgx/ops.hpp"
#include "sgx/optim.hpp"
#include "sgx/sparse.hpp"
#include "sgx/tensor.hpp"

using namespace sgx;
using namespace sgx::testing;

namespace {

std::shared_ptr<const SparseMatrix> adjacency_of(const Graph& g) {
  return std::make_shared<const SparseMatrix>(connectivity_operator(g, ConnectivityKind::kAdjacency));
}

// Random point whose entries stay at least 1e-3 away from zero, so relu is
// checked away from its kink.
Tensor off_kink(std::size_t r, std::size_t c, std::mt19937_64& rng) {
  Tensor t = random_tensor(r, c, rng);
  for (auto& v : t.mutable_values()) {
    if (std::abs(v) < 1e-3) v = v < 0 ? -0.5 : 0.5;
  }
  return t;
}

// Scalar readout sum_ij r_i s_j y_ij with fixed random r, s, so every entry
// of y gets a distinct non-trivial weight.
Tensor probe(const Tensor& y, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  std::vector<double> r(y.rows()), s(y.cols());
  for (auto& v : r) v = u(rng);
  for (auto& v : s) v = u(rng);
  return ops::sum_all(ops::matmul(ops::scale_rows(y, r), Tensor::from(y.cols(), 1, s)));
}

void expect_grad_ok(const std::function<Tensor()>& f, const NamedTensors& params, double tol = 1e-6) {
  const auto r = grad_check(f, params);
  INFO("worst parameter " << r.worst_param << "[" << r.worst_index << "]");
  CHECK(r.max_rel_error < tol);
  CHECK(r.coordinates > 0);
}

}  // namespace

TEST_CASE("linear forward examples") {
  const Tensor x = Tensor::from(1, 2, {1, 2});
  const Tensor w = Tensor::from(2, 2, {1, 0, 0, 1});
  const Tensor b = Tensor::from(1, 2, {0, 0});
  const Tensor y = ops::linear(x, w, b);
  CHECK(y.at(0, 0) == 1.0);
  CHECK(y.at(0, 1) == 2.0);
  CHECK(ops::linear(Tensor::from(1, 2, {1, 1}), Tensor::from(2, 1, {2, 3}), Tensor::from(1, 1, {1})).item() == 6.0);
  try {
    ops::linear(x, Tensor::zeros(3, 2), b);
    FAIL("expected a dimension error");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1x2") != std::string::npos);
    CHECK(msg.find("3x2") != std::string::npos);
  }
}

TEST_CASE("spmm forward examples") {
  const Tensor x = Tensor::from(2, 1, {1, 2});
  const auto id = std::make_shared<const SparseMatrix>(SparseMatrix::identity(2));
  CHECK(ops::spmm(id, x).values()[1] == 2.0);
  const auto a = adjacency_of(single_edge());
  const Tensor y = ops::spmm(a, x);
  CHECK(y.at(0, 0) == 2.0);
  CHECK(y.at(1, 0) == 1.0);
  const Tensor ones = Tensor::from(3, 1, {1, 1, 1});
  const Tensor t = ops::spmm(adjacency_of(triangle()), ones);
  for (double v : t.values()) CHECK(v == 2.0);
  CHECK_THROWS_AS(ops::spmm(a, ones), DimensionError);
  const std::vector<SparseMatrix::Entry> bad{{0, 5, 1.0}};
  CHECK_THROWS_AS(SparseMatrix(2, 2, bad), DimensionError);
}

TEST_CASE("elementwise and reduction examples") {
  const Tensor r = ops::relu(Tensor::from(1, 3, {-1, 0, 2}));
  CHECK(r.values()[0] == 0.0);
  CHECK(r.values()[1] == 0.0);
  CHECK(r.values()[2] == 2.0);
  const Tensor s = ops::sum_rows(Tensor::from(2, 2, {1, 2, 3, 4}));
  CHECK(s.values()[0] == 4.0);
  CHECK(s.values()[1] == 6.0);
  const Tensor m = ops::mean_rows(Tensor::from(2, 2, {1, 2, 3, 4}));
  CHECK(m.values()[0] == 2.0);

  // relu subgradient at exactly 0 is 0
  Tensor z = Tensor::from(1, 2, {0.0, 1.0}, true);
  backward(ops::sum_all(ops::relu(z)));
  CHECK(z.grad()[0] == 0.0);
  CHECK(z.grad()[1] == 1.0);
}

TEST_CASE("softmax cross-entropy") {
  CHECK(ops::softmax_cross_entropy(Tensor::from(1, 2, {0, 0}), 0).item() == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  // probs (0.8, 0.2) <=> logit gap ln 4
  const double gap = std::log(4.0);
  CHECK(ops::softmax_cross_entropy(Tensor::from(1, 2, {gap, 0}), 0).item() ==
        doctest::Approx(-std::log(0.8)).epsilon(1e-12));
  CHECK_THROWS_AS(ops::softmax_cross_entropy(Tensor::from(1, 2, {0, 0}), 2), ArgumentError);
  CHECK_THROWS_AS(ops::softmax_cross_entropy(Tensor::from(1, 2, {0, 0}), -1), ArgumentError);

  std::mt19937_64 rng(1);
  for (int t = 0; t < 10; ++t) {
    Tensor logits = random_tensor(1, 4, rng, -3, 3);
    Tensor loss = ops::softmax_cross_entropy(logits, t % 4);
    CHECK(loss.item() >= 0.0);
    backward(loss);
    double sum = 0.0;
    for (double g : logits.grad()) sum += g;
    CHECK(std::abs(sum) < 1e-12);
  }
  const Tensor uniform = Tensor::from(1, 5, {0.3, 0.3, 0.3, 0.3, 0.3});
  CHECK(ops::softmax_cross_entropy(uniform, 3).item() == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("grad_check oracle behaviour") {
  std::mt19937_64 rng(2);
  Tensor x = random_tensor(3, 2, rng);
  Tensor w = random_tensor(2, 2, rng);
  Tensor b = random_tensor(1, 2, rng);
  expect_grad_ok([&] { return ops::sum_all(ops::linear(x, w, b)); }, {{"x", x}, {"w", w}, {"b", b}});

  // constant function: analytic gradient exactly zero
  Tensor c = random_tensor(2, 2, rng);
  const auto r = grad_check([&] { return Tensor::scalar(3.0); }, {{"c", c}});
  CHECK(r.max_rel_error == 0.0);

  CHECK_THROWS_AS(grad_check([&] { return ops::sum_all(x); }, {{"x", x}}, 1e-3), ArgumentError);
  CHECK_THROWS_AS(grad_check([&] { return ops::sum_all(x); }, {{"x", x}}, 1e-8), ArgumentError);
  Tensor bad = Tensor::from(1, 1, {NAN}, true);
  CHECK_THROWS_AS(grad_check([&] { return ops::sum_all(bad); }, {{"bad", bad}}), OracleError);
}

TEST_CASE("every differentiable primitive matches central differences at 10 points") {
  std::mt19937_64 grng(4);
  const Graph g = random_graph(5, 3, 1, grng);
  const auto a = adjacency_of(g);
  std::vector<EdgePattern::Entry> pat;
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    pat.push_back({g.edges[k].u, g.edges[k].v, static_cast<int>(k)});
    pat.push_back({g.edges[k].v, g.edges[k].u, static_cast<int>(k)});
  }
  const auto pattern =
      std::make_shared<const EdgePattern>(static_cast<std::size_t>(g.num_nodes), g.num_edges(), pat);

  for (std::uint64_t point = 0; point < 10; ++point) {
    CAPTURE(point);
    std::mt19937_64 rng(100 + point);
    Tensor x = random_tensor(5, 3, rng);
    Tensor w = random_tensor(3, 4, rng);
    Tensor b = random_tensor(1, 4, rng);
    Tensor y = random_tensor(5, 3, rng);
    Tensor eps = random_tensor(1, 1, rng);
    Tensor ew = random_tensor(g.num_edges(), 1, rng, 0.1, 1.0);
    Tensor k = off_kink(5, 3, rng);
    std::vector<double> consts(15);
    for (std::size_t i = 0; i < consts.size(); ++i) consts[i] = 0.1 * static_cast<double>(i) - 0.7;
    const std::vector<double> factors{1.0, -2.0, 0.5, 3.0, 0.25};

    expect_grad_ok([&] { return probe(ops::matmul(x, w), point); }, {{"x", x}, {"w", w}});
    expect_grad_ok([&] { return probe(ops::linear(x, w, b), point); }, {{"x", x}, {"w", w}, {"b", b}});
    expect_grad_ok([&] { return probe(ops::add(x, y), point); }, {{"x", x}, {"y", y}});
    expect_grad_ok([&] { return probe(ops::scale(x, -1.7), point); }, {{"x", x}});
    expect_grad_ok([&] { return probe(ops::add_constant(x, consts), point); }, {{"x", x}});
    expect_grad_ok([&] { return probe(ops::scale_rows(x, factors), point); }, {{"x", x}});
    expect_grad_ok([&] { return probe(ops::one_plus_eps_scale(x, eps), point); }, {{"x", x}, {"eps", eps}});
    expect_grad_ok([&] { return probe(ops::relu(k), point); }, {{"k", k}}, 1e-5);
    expect_grad_ok([&] { return probe(ops::sigmoid(x), point); }, {{"x", x}});
    expect_grad_ok([&] { return probe(ops::spmm(a, x), point); }, {{"x", x}});
    expect_grad_ok([&] { return probe(ops::spmm_weighted(pattern, ew, x), point); }, {{"ew", ew}, {"x", x}});
    expect_grad_ok([&] { return probe(ops::sum_rows(x), point); }, {{"x", x}});
    expect_grad_ok([&] { return probe(ops::mean_rows(x), point); }, {{"x", x}});
    expect_grad_ok([&] { return ops::sum_all(ops::scale_rows(x, factors)); }, {{"x", x}});
    const std::vector<int> targets{0, 2, 3, 1, 3};
    expect_grad_ok([&] { return ops::softmax_cross_entropy(ops::matmul(x, w), targets); }, {{"x", x}, {"w", w}});
    expect_grad_ok([&] { return probe(ops::edge_pair_features(x, g.edges), point); }, {{"x", x}});
  }
}

TEST_CASE("mean_rows gradient is 1/n broadcast") {
  Tensor x = Tensor::from(4, 2, {1, 2, 3, 4, 5, 6, 7, 8}, true);
  backward(ops::sum_all(ops::mean_rows(x)));
  for (double g : x.grad()) CHECK(g == doctest::Approx(0.25));
}

TEST_CASE("backward is deterministic and leaf gradients accumulate") {
  std::mt19937_64 rng(9);
  Tensor x = random_tensor(4, 3, rng);
  Tensor w = random_tensor(3, 3, rng);
  auto f = [&] { return probe(ops::relu(ops::linear(x, w, Tensor::zeros(1, 3))), 5); };
  Tensor loss = f();
  Tape tape(loss);
  tape.backward();
  const std::vector<double> first(w.grad().begin(), w.grad().end());
  w.zero_grad();
  x.zero_grad();
  tape.backward();
  const std::vector<double> second(w.grad().begin(), w.grad().end());
  CHECK(first == second);
  tape.backward();  // leaves accumulate across passes
  for (std::size_t i = 0; i < first.size(); ++i) CHECK(w.grad()[i] == doctest::Approx(2 * first[i]));
  CHECK(tape.last_visits() == tape.size() - 2);  // the leaves x and w carry no rule
  CHECK_THROWS_AS([&] { Tape t(x); }(), DimensionError);
}

TEST_CASE("custom backward rules can be registered") {
  Tensor x = Tensor::from(1, 2, {1.0, 2.0}, true);
  // y = 3x forward, with a deliberately different backward rule (times 5)
  Tensor y = make_op(1, 2, {3.0, 6.0}, {x}, [](TensorNode& o) {
    auto& g = o.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += 5.0 * o.grad[i];
  });
  backward(ops::sum_all(y));
  CHECK(x.grad()[0] == 5.0);
  CHECK(x.grad()[1] == 5.0);
}

TEST_CASE("straight-through primitive passes the gradient unchanged") {
  Tensor s = Tensor::from(1, 3, {0.2, 0.7, 0.5}, true);
  Tensor e = ops::straight_through({0, 1, 0}, s);
  CHECK(e.values()[1] == 1.0);
  backward(probe(e, 3));
  Tensor s2 = Tensor::from(1, 3, {0.2, 0.7, 0.5}, true);
  backward(probe(s2, 3));
  for (int i = 0; i < 3; ++i) CHECK(s.grad()[static_cast<std::size_t>(i)] == s2.grad()[static_cast<std::size_t>(i)]);
}

TEST_CASE("Adam update rules") {
  AdamConfig cfg;
  cfg.lr = 0.01;
  {
    std::vector<double> p{1.0, -2.0};
    AdamState st;
    const std::vector<double> zero{0.0, 0.0};
    adam_update(p, zero, st, cfg);
    CHECK(p == std::vector<double>{1.0, -2.0});
    for (double m : st.m) CHECK(m == 0.0);
    for (double v : st.v) CHECK(v == 0.0);
  }
  {
    std::vector<double> p{1.0, -2.0, 0.5};
    AdamState st;
    const std::vector<double> g{0.3, -4.0, 1e-3};
    adam_update(p, g, st, cfg);
    CHECK(p[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(-2.0 + 0.01).epsilon(1e-6));
    CHECK(p[2] == doctest::Approx(0.5 - 0.01).epsilon(1e-4));
    const std::vector<double> before = p;
    adam_update(p, g, st, cfg);
    for (std::size_t i = 0; i < 3; ++i) {
      const double step1 = 0.01, step2 = std::abs(p[i] - before[i]);
      CHECK(step2 <= step1 + 1e-9);
    }
  }
  {
    std::vector<double> p{1.0};
    AdamState st;
    const std::vector<double> g{INFINITY};
    try {
      adam_update(p, g, st, cfg, "layer0/w1");
      FAIL("expected a training error");
    } catch (const TrainingError& e) {
      CHECK(std::string(e.what()).find("layer0/w1") != std::string::npos);
    }
  }
}

TEST_CASE("Adam minimizes a quadratic") {
  Tensor w = Tensor::from(1, 2, {3.0, -2.0}, true);
  Adam opt({{"w", w}}, AdamConfig{0.05});
  for (int i = 0; i < 2000; ++i) {
    opt.zero_grad();
    // d/dw sum((w - 1)^2), written directly into the leaf gradient
    auto& g = w.node()->ensure_grad();
    g[0] = 2.0 * (w.values()[0] - 1.0);
    g[1] = 2.0 * (w.values()[1] - 1.0);
    opt.step();
  }
  CHECK(w.values()[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(w.values()[1] == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("checkpoints round-trip bit-exactly") {
  std::mt19937_64 rng(12);
  Tensor a = random_tensor(3, 4, rng);
  Tensor b = random_tensor(1, 4, rng);
  a.mutable_values()[0] = 0.1 + 0.2;  // not exactly representable in short decimal
  b.mutable_values()[1] = std::nextafter(1.0, 2.0);
  const auto path = std::filesystem::temp_directory_path() / "sgx_ckpt_test.json";
  save_checkpoint({{"a", a}, {"b", b}}, path);
  Tensor a2 = Tensor::zeros(3, 4), b2 = Tensor::zeros(1, 4);
  load_checkpoint(path, {{"a", a2}, {"b", b2}});
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values()[i] == a2.values()[i]);
  for (std::size_t i = 0; i < b.size(); ++i) CHECK(b.values()[i] == b2.values()[i]);
  Tensor wrong = Tensor::zeros(2, 2);
  CHECK_THROWS_AS(load_checkpoint(path, {{"a", wrong}}), FormatError);
  Tensor missing = Tensor::zeros(1, 1);
  CHECK_THROWS_AS(load_checkpoint(path, {{"zz", missing}}), FormatError);
}
