#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <vector>

#include "colgnn/gnn.hpp"
#include "model_gradcheck.hpp"
#include "oracles.hpp"

using namespace colgnn;

namespace {

LabelVocab toy_vocab(int k) {
  std::vector<std::string> names;
  for (int c = 0; c < k; ++c) names.push_back("c" + std::to_string(c));
  return LabelVocab::from_names(names);
}

// Complete graph over n columns with the given initial states.
ColumnGraph toy_graph(const Tensor& states) {
  Table t;
  t.table_id = "toy";
  std::vector<std::vector<double>> logits;
  for (std::size_t u = 0; u < states.rows(); ++u) {
    Column c;
    c.values = {"v"};
    c.label = "c0";
    t.columns.push_back(c);
    std::vector<double> row;
    for (std::size_t j = 0; j < states.cols(); ++j) row.push_back(states(u, j));
    logits.push_back(row);
  }
  return build_graph(t, logits, toy_vocab(static_cast<int>(states.cols())));
}

Tensor random_states(Rng& rng, std::size_t n, std::size_t k) {
  Tensor t({n, k});
  for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
  return t;
}

Tensor run_gcn(const GraphBatch& b, const Tensor& states, const Tensor& W, bool act) {
  Tape t;
  return t.value(gcn_layer(t, t.leaf(states), gcn_plan(b), t.leaf(W), act));
}

Tensor run_ggnn(const GraphBatch& b, const Tensor& states, const Tensor& W,
                const oracle::GruTensors& g) {
  Tape t;
  GruVars vars{t.leaf(g.Wz), t.leaf(g.Uz), t.leaf(g.bz), t.leaf(g.Wr), t.leaf(g.Ur),
               t.leaf(g.br), t.leaf(g.Wh), t.leaf(g.Uh), t.leaf(g.bh)};
  return t.value(ggnn_layer(t, t.leaf(states), neighbor_sum_plan(b), t.leaf(W), vars));
}

Tensor run_gat(const GraphBatch& b, const Tensor& states,
               const std::vector<oracle::GatHeadTensors>& heads, bool act, bool average) {
  Tape t;
  std::vector<GatHeadVars> vars;
  for (const auto& h : heads) vars.push_back({t.leaf(h.W), t.leaf(h.a)});
  return t.value(
      gat_layer(t, t.leaf(states), attention_mask(b), self_inclusive_lists(b), vars, act,
                average));
}

void check_close(const Tensor& got, const Tensor& want, double tol) {
  REQUIRE(got.shape() == want.shape());
  for (std::size_t e = 0; e < got.size(); ++e) {
    REQUIRE(std::abs(got(e) - want(e)) <= tol);
  }
}

oracle::GruTensors random_gru(Rng& rng, std::size_t k) {
  auto mat = [&] {
    Tensor t({k, k});
    for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
    return t;
  };
  auto vec = [&] {
    Tensor t({k});
    for (double& v : t.data()) v = rng.uniform(-1.0, 1.0);
    return t;
  };
  return {mat(), mat(), vec(), mat(), mat(), vec(), mat(), mat(), vec()};
}

std::vector<oracle::GatHeadTensors> random_heads(Rng& rng, int count, std::size_t dh,
                                                 std::size_t in) {
  std::vector<oracle::GatHeadTensors> heads;
  for (int h = 0; h < count; ++h) {
    Tensor W({dh, in});
    for (double& v : W.data()) v = rng.uniform(-1.0, 1.0);
    Tensor a({2 * dh});
    for (double& v : a.data()) v = rng.uniform(-1.0, 1.0);
    heads.push_back({W, a});
  }
  return heads;
}

}  // namespace

TEST_CASE("gcn layer averages a 2-node complete graph under identity weights") {
  Tensor h = Tensor::matrix(2, 2, {1.0, 3.0, 5.0, -1.0});
  GraphBatch b = batch_graphs({toy_graph(h)});
  Tensor out = run_gcn(b, h, Tensor::identity(2), false);
  // d(u) = d(v) = 2, so each row is the mean of the two input rows
  CHECK(out(0, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(out(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(out(1, 0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(out(1, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gcn layer on an isolated node is the identity under identity weights") {
  Tensor h = Tensor::matrix(1, 3, {0.5, -2.0, 4.0});
  GraphBatch b = batch_graphs({toy_graph(h)});
  Tensor out = run_gcn(b, h, Tensor::identity(3), false);
  for (std::size_t e = 0; e < h.size(); ++e) CHECK(out(e) == h(e));
}

TEST_CASE("gcn layer matches the scalar-loop oracle") {
  Rng rng(201);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng.below(6);
    std::size_t k = 2 + rng.below(3);
    Tensor h = random_states(rng, n, k);
    Tensor W({k + 1, k});
    for (double& v : W.data()) v = rng.uniform(-1.0, 1.0);
    GraphBatch b = batch_graphs({toy_graph(h)});
    bool act = rng.uniform() < 0.5;
    check_close(run_gcn(b, h, W, act), oracle::gcn_step(h, b.neighbors(), W, act), 1e-12);
  }
}

TEST_CASE("ggnn layer follows the documented gate convention on an isolated node") {
  std::size_t k = 3;
  Tensor h = Tensor::matrix(1, k, {1.0, -2.0, 0.5});
  GraphBatch b = batch_graphs({toy_graph(h)});
  oracle::GruTensors zero{Tensor({k, k}), Tensor({k, k}), Tensor({k}),
                          Tensor({k, k}), Tensor({k, k}), Tensor({k}),
                          Tensor({k, k}), Tensor({k, k}), Tensor({k})};
  // message is empty, all gates at their bias: z = 0.5, cand = 0, h' = 0.5 h
  Tensor out = run_ggnn(b, h, Tensor::identity(k), zero);
  for (std::size_t e = 0; e < h.size(); ++e) {
    CHECK(out(e) == doctest::Approx(0.5 * h(e)).epsilon(1e-15));
  }
}

TEST_CASE("ggnn layer keeps the all-zero state a fixed point under zero biases") {
  std::size_t k = 2;
  Tensor h({3, k});
  GraphBatch b = batch_graphs({toy_graph(h)});
  Rng rng(202);
  oracle::GruTensors g = random_gru(rng, k);
  g.bz = Tensor({k});
  g.br = Tensor({k});
  g.bh = Tensor({k});
  Tensor W({k, k});
  for (double& v : W.data()) v = rng.uniform(-1.0, 1.0);
  Tensor out = run_ggnn(b, h, W, g);
  for (std::size_t e = 0; e < out.size(); ++e) CHECK(out(e) == 0.0);
}

TEST_CASE("ggnn layer matches the scalar-loop oracle") {
  Rng rng(203);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng.below(6);
    std::size_t k = 2 + rng.below(3);
    Tensor h = random_states(rng, n, k);
    Tensor W({k, k});
    for (double& v : W.data()) v = rng.uniform(-1.0, 1.0);
    oracle::GruTensors g = random_gru(rng, k);
    GraphBatch b = batch_graphs({toy_graph(h)});
    check_close(run_ggnn(b, h, W, g), oracle::ggnn_step(h, b.neighbors(), W, g), 1e-12);
  }
}

TEST_CASE("gat attention is uniform when all states are identical") {
  Tensor h = Tensor::matrix(3, 2, {0.7, -0.3, 0.7, -0.3, 0.7, -0.3});
  ColumnGraph g = toy_graph(h);
  Rng rng(204);
  auto heads = random_heads(rng, 1, 2, 2);
  std::vector<double> w = gat_attention(h, g, 0, heads[0].W, heads[0].a);
  REQUIRE(w.size() == 3);
  for (double x : w) CHECK(x == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("gat attention is uniform when the attention vector is zero") {
  Rng rng(205);
  Tensor h = random_states(rng, 4, 3);
  ColumnGraph g = toy_graph(h);
  Tensor W = Tensor::identity(3);
  Tensor a({6});
  std::vector<double> w = gat_attention(h, g, 2, W, a);
  REQUIRE(w.size() == 4);
  for (double x : w) CHECK(x == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("gat attention matches the scalar-loop oracle and sums to one") {
  Rng rng(206);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng.below(6);
    std::size_t k = 2 + rng.below(3);
    Tensor h = random_states(rng, n, k);
    ColumnGraph g = toy_graph(h);
    auto heads = random_heads(rng, 1, k, k);
    for (std::size_t u = 0; u < n; ++u) {
      auto got = gat_attention(h, g, static_cast<int>(u), heads[0].W, heads[0].a);
      auto want = oracle::gat_attention_row(h, batch_graphs({g}).neighbors(),
                                            static_cast<int>(u), heads[0].W, heads[0].a);
      REQUIRE(got.size() == want.size());
      double sum = 0.0;
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(std::abs(got[i] - want[i]) < 1e-12);
        CHECK(got[i] >= 0.0);
        sum += got[i];
      }
      CHECK(std::abs(sum - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("single-head gat with uniform attention averages a 2-node graph") {
  // identical states force uniform attention; with W = I the update is a mean
  Tensor h = Tensor::matrix(2, 2, {0.4, -0.6, 0.4, -0.6});
  GraphBatch b = batch_graphs({toy_graph(h)});
  Rng rng(207);
  auto heads = random_heads(rng, 1, 2, 2);
  heads[0].W = Tensor::identity(2);
  Tensor out = run_gat(b, h, heads, false, false);
  for (std::size_t u = 0; u < 2; ++u) {
    CHECK(out(u, 0) == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(out(u, 1) == doctest::Approx(-0.6).epsilon(1e-12));
  }
}

TEST_CASE("duplicated gat heads concatenate to a duplicated single head") {
  Rng rng(208);
  Tensor h = random_states(rng, 3, 2);
  GraphBatch b = batch_graphs({toy_graph(h)});
  auto one = random_heads(rng, 1, 2, 2);
  std::vector<oracle::GatHeadTensors> two = {one[0], one[0]};
  Tensor single = run_gat(b, h, one, true, false);
  Tensor both = run_gat(b, h, two, true, false);
  REQUIRE(both.cols() == 2 * single.cols());
  for (std::size_t u = 0; u < h.rows(); ++u) {
    for (std::size_t j = 0; j < single.cols(); ++j) {
      CHECK(both(u, j) == single(u, j));
      CHECK(both(u, single.cols() + j) == single(u, j));
    }
  }
}

TEST_CASE("gat layer matches the scalar-loop oracle") {
  Rng rng(209);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 1 + rng.below(6);
    std::size_t k = 2 + rng.below(3);
    Tensor h = random_states(rng, n, k);
    GraphBatch b = batch_graphs({toy_graph(h)});
    auto heads = random_heads(rng, 4, k, k);
    bool act = rng.uniform() < 0.5;
    bool avg = rng.uniform() < 0.5;
    check_close(run_gat(b, h, heads, act, avg),
                oracle::gat_step(h, b.neighbors(), heads, act, avg), 1e-12);
  }
}

TEST_CASE("model_forward with one identity gcn step is the identity on one node") {
  Tensor h = Tensor::matrix(1, 2, {0.25, -1.5});
  GraphBatch b = batch_graphs({toy_graph(h)});
  GnnConfig cfg{GnnFamily::Gcn, 1, 1, 0, 2};
  GnnParams p;
  p.add("step0.W", Tensor::identity(2));
  Tape t;
  const Tensor& out = t.value(model_forward(t, b, p, cfg));
  CHECK(out(0, 0) == h(0, 0));
  CHECK(out(0, 1) == h(0, 1));
}

TEST_CASE("model_forward output shape is nodes by classes for every family") {
  Rng rng(210);
  Tensor h1 = random_states(rng, 3, 4);
  Tensor h2 = random_states(rng, 2, 4);
  GraphBatch b = batch_graphs({toy_graph(h1), toy_graph(h2)});
  for (GnnFamily fam : {GnnFamily::Gcn, GnnFamily::Ggnn, GnnFamily::Gat}) {
    GnnConfig cfg{fam, 2, 3, 0, 4};
    GnnParams p = init_params(cfg, 99);
    Tape t;
    const Tensor& out = t.value(model_forward(t, b, p, cfg));
    CHECK(out.rows() == 5);
    CHECK(out.cols() == 4);
  }
}

TEST_CASE("model_forward composes the same layers the manual path does") {
  Rng rng(211);
  Tensor h = random_states(rng, 3, 3);
  GraphBatch b = batch_graphs({toy_graph(h)});
  GnnConfig cfg{GnnFamily::Gat, 2, 2, 0, 3};
  GnnParams p = init_params(cfg, 4242);

  Tape t1;
  const Tensor& via_model = t1.value(model_forward(t1, b, p, cfg));

  Tape t2;
  Tensor mask = attention_mask(b);
  auto lists = self_inclusive_lists(b);
  std::vector<GatHeadVars> step0 = {
      {t2.leaf(p.at("step0.head0.W")), t2.leaf(p.at("step0.head0.a"))},
      {t2.leaf(p.at("step0.head1.W")), t2.leaf(p.at("step0.head1.a"))}};
  std::vector<GatHeadVars> step1 = {
      {t2.leaf(p.at("step1.head0.W")), t2.leaf(p.at("step1.head0.a"))},
      {t2.leaf(p.at("step1.head1.W")), t2.leaf(p.at("step1.head1.a"))}};
  Var hvar = t2.leaf(b.initial_states);
  Var mid = gat_layer(t2, hvar, mask, lists, step0, true, false);
  Var out = gat_layer(t2, mid, mask, lists, step1, false, true);
  const Tensor& manual = t2.value(out);

  REQUIRE(via_model.shape() == manual.shape());
  for (std::size_t e = 0; e < manual.size(); ++e) CHECK(via_model(e) == manual(e));
}

TEST_CASE("model_forward rejects inconsistent configuration and parameters") {
  Tensor h = Tensor::matrix(2, 2, {0.0, 0.1, 0.2, 0.3});
  GraphBatch b = batch_graphs({toy_graph(h)});
  GnnConfig cfg{GnnFamily::Gcn, 2, 1, 0, 2};
  GnnParams p = init_params(cfg, 7);
  GnnConfig wrong = cfg;
  wrong.steps = 3;
  Tape t;
  CHECK_THROWS_AS(model_forward(t, b, p, wrong), InvalidInputError);
  GnnConfig ggnn_wide{GnnFamily::Ggnn, 2, 1, 5, 2};
  CHECK_THROWS_AS(validate_config(ggnn_wide), InvalidInputError);
}

TEST_CASE("predictions take the argmax with low-index tie breaking") {
  // one isolated node, single identity gcn step: logits pass through
  LabelVocab vocab = toy_vocab(3);
  GnnConfig cfg{GnnFamily::Gcn, 1, 1, 0, 3};
  GnnParams p;
  p.add("step0.W", Tensor::identity(3));

  ColumnGraph g = toy_graph(Tensor::matrix(1, 3, {2.0, -1.0, 0.0}));
  auto preds = predict(g, p, cfg, vocab);
  REQUIRE(preds.size() == 1);
  CHECK(preds[0].class_index == 0);
  CHECK(preds[0].label == "c0");

  GnnConfig cfg2{GnnFamily::Gcn, 1, 1, 0, 2};
  GnnParams p2;
  p2.add("step0.W", Tensor::identity(2));
  auto tie = predict(toy_graph(Tensor::matrix(1, 2, {1.0, 1.0})), p2, cfg2, toy_vocab(2));
  CHECK(tie[0].class_index == 0);

  double sum = 0.0;
  for (double x : preds[0].probabilities) sum += x;
  CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("argmax of the softmax equals argmax of the raw states") {
  Rng rng(212);
  for (int trial = 0; trial < 20; ++trial) {
    GnnConfig cfg{GnnFamily::Gat, 2, 2, 0, 3};
    GnnParams p = init_params(cfg, rng.next());
    Tensor h = random_states(rng, 4, 3);
    ColumnGraph g = toy_graph(h);
    auto preds = predict(g, p, cfg, toy_vocab(3));

    Tape t;
    const Tensor& raw = t.value(model_forward(t, batch_graphs({g}), p, cfg));
    for (std::size_t u = 0; u < raw.rows(); ++u) {
      Tensor row({raw.cols()});
      for (std::size_t j = 0; j < raw.cols(); ++j) row(j) = raw(u, j);
      CHECK(static_cast<std::size_t>(preds[u].class_index) == argmax(row));
    }
  }
}

TEST_CASE("init_params is deterministic and respects the glorot bound") {
  GnnConfig cfg{GnnFamily::Gat, 2, 3, 0, 4};
  GnnParams a = init_params(cfg, 31337);
  GnnParams b = init_params(cfg, 31337);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t e = 0; e < a.tensors[i].size(); ++e) {
      CHECK(a.tensors[i](e) == b.tensors[i](e));
    }
  }

  GnnParams c = init_params(cfg, 31338);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t e = 0; e < a.tensors[i].size(); ++e) {
      if (a.tensors[i](e) != c.tensors[i](e)) any_diff = true;
    }
  }
  CHECK(any_diff);

  for (std::size_t i = 0; i < a.size(); ++i) {
    const Tensor& t = a.tensors[i];
    if (t.rank() != 2) continue;
    double bound = std::sqrt(6.0 / (static_cast<double>(t.rows()) + t.cols()));
    for (std::size_t e = 0; e < t.size(); ++e) {
      CHECK(std::abs(t(e)) <= bound);
    }
  }

  GnnConfig ggnn{GnnFamily::Ggnn, 1, 1, 0, 3};
  GnnParams gp = init_params(ggnn, 5);
  for (const char* gate : {"z", "r", "h"}) {
    const Tensor& bias = gp.at("step0.gru.b" + std::string(gate));
    for (std::size_t e = 0; e < bias.size(); ++e) CHECK(bias(e) == 0.0);
  }
}

TEST_CASE("node permutation permutes model outputs exactly") {
  Rng rng(213);
  for (GnnFamily fam : {GnnFamily::Gcn, GnnFamily::Ggnn, GnnFamily::Gat}) {
    GnnConfig cfg{fam, 2, 2, 0, 3};
    GnnParams params = init_params(cfg, 77);
    for (int trial = 0; trial < 10; ++trial) {
      std::size_t n = 2 + rng.below(4);
      Tensor h = random_states(rng, n, 3);
      std::vector<std::size_t> perm(n);
      for (std::size_t i = 0; i < n; ++i) perm[i] = i;
      rng.shuffle(perm);

      Tensor hp({n, 3});
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t j = 0; j < 3; ++j) hp(perm[u], j) = h(u, j);
      }

      Tape t1, t2;
      const Tensor& out = t1.value(model_forward(t1, batch_graphs({toy_graph(h)}), params, cfg));
      const Tensor& outp =
          t2.value(model_forward(t2, batch_graphs({toy_graph(hp)}), params, cfg));
      for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t j = 0; j < 3; ++j) {
          CHECK(outp(perm[u], j) == out(u, j));
        }
      }
    }
  }
}

TEST_CASE("gcn with identity weights is an averaging operator") {
  // coefficients over N(u)+{u} are nonnegative and sum to at most one
  Rng rng(214);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 1 + rng.below(6);
    GraphBatch b = batch_graphs({toy_graph(random_states(rng, n, 2))});
    AggregationPlan plan = gcn_plan(b);
    for (const auto& terms : plan.terms) {
      double sum = 0.0;
      for (const auto& [v, c] : terms) {
        CHECK(c >= 0.0);
        sum += c;
      }
      CHECK(sum <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("batching a single graph does not change the forward pass") {
  Rng rng(215);
  for (GnnFamily fam : {GnnFamily::Gcn, GnnFamily::Ggnn, GnnFamily::Gat}) {
    GnnConfig cfg{fam, 2, 2, 0, 3};
    GnnParams params = init_params(cfg, 88);
    Tensor h = random_states(rng, 4, 3);
    ColumnGraph g = toy_graph(h);

    Tape t1, t2;
    const Tensor& single = t1.value(model_forward(t1, batch_graphs({g}), params, cfg));
    GraphBatch pair = batch_graphs({g, toy_graph(random_states(rng, 3, 3))});
    const Tensor& batched = t2.value(model_forward(t2, pair, params, cfg));
    for (std::size_t u = 0; u < 4; ++u) {
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(batched(u, j) == single(u, j));
      }
    }
  }
}

TEST_CASE("perturbing one member graph leaves the other members untouched") {
  Rng rng(216);
  Tensor ha = random_states(rng, 3, 3);
  Tensor hb = random_states(rng, 4, 3);
  Tensor ha2 = random_states(rng, 3, 3);  // perturbed copy of graph A
  for (GnnFamily fam : {GnnFamily::Gcn, GnnFamily::Ggnn, GnnFamily::Gat}) {
    GnnConfig cfg{fam, 2, 2, 0, 3};
    GnnParams params = init_params(cfg, 89);
    Tape t1, t2;
    const Tensor& before =
        t1.value(model_forward(t1, batch_graphs({toy_graph(ha), toy_graph(hb)}), params, cfg));
    const Tensor& after =
        t2.value(model_forward(t2, batch_graphs({toy_graph(ha2), toy_graph(hb)}), params, cfg));
    for (std::size_t u = 3; u < 7; ++u) {
      for (std::size_t j = 0; j < 3; ++j) {
        CHECK(after(u, j) == before(u, j));
      }
    }
  }
}

TEST_CASE("full-model tape gradients match finite differences") {
  std::uint64_t seed = 900;
  for (GnnFamily fam : {GnnFamily::Gcn, GnnFamily::Ggnn, GnnFamily::Gat}) {
    GnnConfig cfg{fam, 2, 1, 0, 3};
    for (int trial = 0; trial < 3; ++trial) {
      CHECK(testutil::model_gradcheck_max_rel_err(cfg, seed++) < 1e-4);
    }
  }
  GnnConfig wide{GnnFamily::Gat, 2, 4, 0, 3};
  CHECK(testutil::model_gradcheck_max_rel_err(wide, seed) < 1e-4);
}

TEST_CASE("model save and load round trips bit for bit") {
  namespace fs = std::filesystem;
  GnnConfig cfg{GnnFamily::Gat, 2, 2, 0, 3};
  GnnModel model{cfg, init_params(cfg, 555), toy_vocab(3), {}};
  model.extra_params.emplace_back("base.W", Tensor::matrix(3, 2, {1.0, -2.5, 0.0, 1e-300,
                                                                  3.25, -0.0}));

  fs::path path = fs::temp_directory_path() / "colgnn_model_test.json";
  save_model(path, model);
  GnnModel loaded = load_model(path);
  fs::remove(path);

  CHECK(loaded.config.family == cfg.family);
  CHECK(loaded.config.steps == cfg.steps);
  CHECK(loaded.config.heads == cfg.heads);
  CHECK(loaded.config.num_classes == cfg.num_classes);
  CHECK(loaded.vocab.names() == model.vocab.names());
  REQUIRE(loaded.params.size() == model.params.size());
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    CHECK(loaded.params.names[i] == model.params.names[i]);
    REQUIRE(loaded.params.tensors[i].shape() == model.params.tensors[i].shape());
    for (std::size_t e = 0; e < model.params.tensors[i].size(); ++e) {
      CHECK(loaded.params.tensors[i](e) == model.params.tensors[i](e));
    }
  }
  REQUIRE(loaded.extra_params.size() == 1);
  CHECK(loaded.extra_params[0].first == "base.W");
  for (std::size_t e = 0; e < 6; ++e) {
    // bit-exact, including -0.0 and denormals
    CHECK(std::memcmp(&loaded.extra_params[0].second.data()[e],
                      &model.extra_params[0].second.data()[e], sizeof(double)) == 0);
  }
}

TEST_CASE("predictions survive a save-load round trip unchanged") {
  Rng rng(217);
  GnnConfig cfg{GnnFamily::Ggnn, 3, 1, 0, 3};
  GnnModel model{cfg, init_params(cfg, 666), toy_vocab(3), {}};
  ColumnGraph g = toy_graph(random_states(rng, 4, 3));

  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "colgnn_model_roundtrip.json";
  save_model(path, model);
  GnnModel loaded = load_model(path);
  fs::remove(path);

  auto before = predict(g, model.params, model.config, model.vocab);
  auto after = predict(g, loaded.params, loaded.config, loaded.vocab);
  REQUIRE(before.size() == after.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i].class_index == after[i].class_index);
    for (std::size_t j = 0; j < before[i].probabilities.size(); ++j) {
      CHECK(before[i].probabilities[j] == after[i].probabilities[j]);
    }
  }
}
