#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "colgnn/autodiff.hpp"
#include "colgnn/encoding.hpp"
#include "colgnn/errors.hpp"
#include "colgnn/graph.hpp"
#include "colgnn/rng.hpp"
#include "colgnn/table.hpp"
#include "colgnn/tensor.hpp"

namespace colgnn {

enum class GnnFamily { Gcn, Ggnn, Gat };

inline std::string family_name(GnnFamily f) {
  switch (f) {
    case GnnFamily::Gcn: return "gcn";
    case GnnFamily::Ggnn: return "ggnn";
    case GnnFamily::Gat: return "gat";
  }
  throw InternalError("unknown family");
}

inline std::optional<GnnFamily> parse_family(const std::string& name) {
  if (name == "gcn") return GnnFamily::Gcn;
  if (name == "ggnn") return GnnFamily::Ggnn;
  if (name == "gat") return GnnFamily::Gat;
  return std::nullopt;
}

// Update-step presets selected on validation data in the reference protocol.
inline int default_steps(GnnFamily f) {
  switch (f) {
    case GnnFamily::Gcn: return 2;
    case GnnFamily::Ggnn: return 3;
    case GnnFamily::Gat: return 2;
  }
  throw InternalError("unknown family");
}

struct GnnConfig {
  GnnFamily family = GnnFamily::Gat;
  int steps = 2;       // number of update steps S
  int heads = 8;       // attention heads (GAT only)
  int hidden_dim = 0;  // width of interior steps; 0 means "number of classes"
  int num_classes = 0; // k; bound to the data before use

  std::string name() const {
    std::string s = family_name(family) + "_s" + std::to_string(steps);
    if (family == GnnFamily::Gat) s += "_h" + std::to_string(heads);
    return s;
  }
};

inline int resolved_hidden(const GnnConfig& c) {
  return c.hidden_dim > 0 ? c.hidden_dim : c.num_classes;
}

inline void validate_config(const GnnConfig& c) {
  if (c.steps < 1) throw InvalidInputError("config: steps must be >= 1");
  if (c.heads < 1) throw InvalidInputError("config: heads must be >= 1");
  if (c.num_classes < 1) throw InvalidInputError("config: class count must be >= 1");
  if (c.hidden_dim < 0) throw InvalidInputError("config: hidden_dim must be positive");
  if (c.family == GnnFamily::Ggnn && resolved_hidden(c) != c.num_classes) {
    throw InvalidInputError(
        "config: the gated family updates states in place, so hidden_dim must equal the "
        "class count");
  }
}

// Row width of the node-state matrix entering step s (0-based); index S is
// the output width, which is always the class count.
inline std::vector<std::size_t> state_dims(const GnnConfig& c) {
  validate_config(c);
  auto k = static_cast<std::size_t>(c.num_classes);
  auto hidden = static_cast<std::size_t>(resolved_hidden(c));
  std::vector<std::size_t> dims(static_cast<std::size_t>(c.steps) + 1, k);
  for (int s = 1; s < c.steps; ++s) {
    dims[static_cast<std::size_t>(s)] =
        c.family == GnnFamily::Gat ? static_cast<std::size_t>(c.heads) * hidden : hidden;
  }
  return dims;
}

// Per-head output width of GAT step s (0-based). Interior heads are
// concatenated; the final step averages heads so the output keeps k units.
inline std::size_t gat_head_dim(const GnnConfig& c, int step) {
  return step + 1 < c.steps ? static_cast<std::size_t>(resolved_hidden(c))
                            : static_cast<std::size_t>(c.num_classes);
}

// ---- parameters ----

struct GnnParams {
  std::vector<std::string> names;
  std::vector<Tensor> tensors;

  std::size_t size() const { return tensors.size(); }

  void add(std::string name, Tensor t) {
    names.push_back(std::move(name));
    tensors.push_back(std::move(t));
  }

  std::size_t index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return i;
    }
    throw InternalError("unknown parameter '" + name + "'");
  }

  const Tensor& at(const std::string& name) const { return tensors[index_of(name)]; }
  Tensor& at(const std::string& name) { return tensors[index_of(name)]; }
};

struct ParamSpec {
  std::string name;
  std::vector<std::size_t> shape;
  bool is_bias = false;
};

// Canonical parameter list for a configuration: names and shapes, in the
// order they are initialized, updated and serialized.
inline std::vector<ParamSpec> param_layout(const GnnConfig& c) {
  std::vector<ParamSpec> layout;
  std::vector<std::size_t> dims = state_dims(c);
  auto k = static_cast<std::size_t>(c.num_classes);
  for (int s = 0; s < c.steps; ++s) {
    std::string prefix = "step" + std::to_string(s) + ".";
    std::size_t in = dims[static_cast<std::size_t>(s)];
    std::size_t out = dims[static_cast<std::size_t>(s) + 1];
    switch (c.family) {
      case GnnFamily::Gcn:
        layout.push_back({prefix + "W", {out, in}, false});
        break;
      case GnnFamily::Ggnn:
        layout.push_back({prefix + "W", {k, k}, false});
        for (const char* gate : {"z", "r", "h"}) {
          layout.push_back({prefix + "gru.W" + std::string(gate), {k, k}, false});
          layout.push_back({prefix + "gru.U" + std::string(gate), {k, k}, false});
          layout.push_back({prefix + "gru.b" + std::string(gate), {k}, true});
        }
        break;
      case GnnFamily::Gat: {
        std::size_t head_dim = gat_head_dim(c, s);
        for (int h = 0; h < c.heads; ++h) {
          std::string hp = prefix + "head" + std::to_string(h) + ".";
          layout.push_back({hp + "W", {head_dim, in}, false});
          layout.push_back({hp + "a", {2 * head_dim}, false});
        }
        break;
      }
    }
  }
  return layout;
}

// Glorot-uniform weights and attention vectors, zero gate biases.
// Deterministic under the seed.
inline GnnParams init_params(const GnnConfig& c, std::uint64_t seed) {
  Rng rng = Rng(seed).stream("init");
  GnnParams params;
  for (auto& spec : param_layout(c)) {
    Tensor t(spec.shape);
    if (!spec.is_bias) {
      double fan_in = t.rank() == 2 ? static_cast<double>(t.cols())
                                    : static_cast<double>(t.size());
      double fan_out = t.rank() == 2 ? static_cast<double>(t.rows()) : 1.0;
      double bound = std::sqrt(6.0 / (fan_in + fan_out));
      for (double& v : t.data()) v = rng.uniform(-bound, bound);
    }
    params.add(spec.name, std::move(t));
  }
  return params;
}

inline void validate_params(const GnnParams& p, const GnnConfig& c) {
  auto layout = param_layout(c);
  if (layout.size() != p.size()) {
    throw InvalidInputError("parameters do not match configuration: expected " +
                            std::to_string(layout.size()) + " tensors, got " +
                            std::to_string(p.size()));
  }
  for (std::size_t i = 0; i < layout.size(); ++i) {
    if (p.names[i] != layout[i].name || p.tensors[i].shape() != layout[i].shape) {
      throw InvalidInputError("parameter '" + p.names[i] +
                              "' does not match the configuration layout");
    }
  }
}

// ---- graph structure constants ----

// Degree-normalized plan over each node and its neighbors, with the self
// term included; the normalizing degree counts the node itself, so isolated
// nodes divide by one.
inline AggregationPlan gcn_plan(const GraphBatch& b) {
  auto nbrs = b.neighbors();
  AggregationPlan plan;
  plan.terms.resize(nbrs.size());
  for (std::size_t u = 0; u < nbrs.size(); ++u) {
    double du = static_cast<double>(nbrs[u].size()) + 1.0;
    plan.terms[u].push_back({static_cast<int>(u), 1.0 / du});
    for (int v : nbrs[u]) {
      double dv = static_cast<double>(nbrs[static_cast<std::size_t>(v)].size()) + 1.0;
      plan.terms[u].push_back({v, 1.0 / std::sqrt(du * dv)});
    }
  }
  return plan;
}

// Plain sum over neighbors, self excluded (the gated update keeps the self
// state through its recurrent input).
inline AggregationPlan neighbor_sum_plan(const GraphBatch& b) {
  auto nbrs = b.neighbors();
  AggregationPlan plan;
  plan.terms.resize(nbrs.size());
  for (std::size_t u = 0; u < nbrs.size(); ++u) {
    for (int v : nbrs[u]) plan.terms[u].push_back({v, 1.0});
  }
  return plan;
}

// Sorted N(u) + {u} per node.
inline std::vector<std::vector<int>> self_inclusive_lists(const GraphBatch& b) {
  auto nbrs = b.neighbors();
  std::vector<std::vector<int>> lists(nbrs.size());
  for (std::size_t u = 0; u < nbrs.size(); ++u) {
    lists[u] = nbrs[u];
    lists[u].insert(std::lower_bound(lists[u].begin(), lists[u].end(), static_cast<int>(u)),
                    static_cast<int>(u));
  }
  return lists;
}

inline Tensor attention_mask(const GraphBatch& b) {
  auto n = static_cast<std::size_t>(b.total_nodes);
  Tensor mask({n, n});
  auto lists = self_inclusive_lists(b);
  for (std::size_t u = 0; u < lists.size(); ++u) {
    for (int v : lists[u]) mask(u, static_cast<std::size_t>(v)) = 1.0;
  }
  return mask;
}

// ---- layers ----

// h'_u = sigma( sum over v in N(u)+{u} of W h_v / sqrt(d(u) d(v)) )
inline Var gcn_layer(Tape& t, Var states, const AggregationPlan& plan, Var weight,
                     bool relu_after) {
  Var transformed = t.matmul_nt(states, weight);
  Var agg = t.aggregate(transformed, plan);
  return relu_after ? t.relu(agg) : agg;
}

struct GruVars {
  Var Wz, Uz, bz;
  Var Wr, Ur, br;
  Var Wh, Uh, bh;
};

// m_u = sum over v in N(u) of W h_v, then a gated recurrent update:
//   z = sigmoid(Wz m + Uz h + bz)
//   r = sigmoid(Wr m + Ur h + br)
//   cand = tanh(Wh m + Uh (r*h) + bh)
//   h' = (1-z)*h + z*cand
inline Var ggnn_layer(Tape& t, Var states, const AggregationPlan& neighbor_plan, Var weight,
                      const GruVars& g) {
  Var msg = t.aggregate(t.matmul_nt(states, weight), neighbor_plan);
  Var z = t.sigmoid(
      t.add_rowvec(t.add(t.matmul_nt(msg, g.Wz), t.matmul_nt(states, g.Uz)), g.bz));
  Var r = t.sigmoid(
      t.add_rowvec(t.add(t.matmul_nt(msg, g.Wr), t.matmul_nt(states, g.Ur)), g.br));
  Var cand = t.tanh(t.add_rowvec(
      t.add(t.matmul_nt(msg, g.Wh), t.matmul_nt(t.mul(r, states), g.Uh)), g.bh));
  return t.add(t.mul(t.one_minus(z), states), t.mul(z, cand));
}

// Attention over N(u)+{u} from already-projected states P = H W^T:
// alpha_u,v = softmax over that set of relu(a . [P_u (+) P_v]).
inline Var gat_attention_from_projected(Tape& t, Var projected, const Tensor& mask, Var a) {
  std::size_t head_dim = t.value(projected).cols();
  if (t.value(a).size() != 2 * head_dim) {
    throw InvalidInputError("gat attention: vector length must be twice the head width");
  }
  Var a_self = t.segment(a, 0, head_dim);
  Var a_nbr = t.segment(a, head_dim, head_dim);
  Var s_self = t.matvec(projected, a_self);
  Var s_nbr = t.matvec(projected, a_nbr);
  Var scores = t.relu(t.outer_sum(s_self, s_nbr));
  return t.masked_softmax_rows(scores, mask);
}

struct GatHeadVars {
  Var W, a;
};

inline Var gat_head(Tape& t, Var states, const Tensor& mask,
                    const std::vector<std::vector<int>>& lists, const GatHeadVars& head) {
  Var projected = t.matmul_nt(states, head.W);
  Var alpha = gat_attention_from_projected(t, projected, mask, head.a);
  return t.weighted_aggregate(alpha, projected, lists);
}

// Multi-head step: heads are concatenated on interior steps and averaged on
// the final step so the output keeps one unit per class.
inline Var gat_layer(Tape& t, Var states, const Tensor& mask,
                     const std::vector<std::vector<int>>& lists,
                     const std::vector<GatHeadVars>& heads, bool relu_after,
                     bool average_heads) {
  if (heads.empty()) throw InvalidInputError("gat_layer: no heads");
  std::vector<Var> outs;
  outs.reserve(heads.size());
  for (const GatHeadVars& h : heads) {
    Var o = gat_head(t, states, mask, lists, h);
    outs.push_back(relu_after ? t.relu(o) : o);
  }
  if (average_heads) {
    Var acc = outs[0];
    for (std::size_t i = 1; i < outs.size(); ++i) acc = t.add(acc, outs[i]);
    return outs.size() > 1 ? t.scale(acc, 1.0 / static_cast<double>(outs.size())) : acc;
  }
  return outs.size() > 1 ? t.concat_cols(outs) : outs[0];
}

// Attention weights of one node under one head, over N(u)+{u} in ascending
// node order. Runs the same code path as the layer.
inline std::vector<double> gat_attention(const Tensor& states, const ColumnGraph& graph,
                                         int node, const Tensor& weight, const Tensor& a) {
  GraphBatch b = batch_graphs({graph});
  Tape t;
  Var h = t.leaf(states);
  Var projected = t.matmul_nt(h, t.leaf(weight));
  Var alpha = gat_attention_from_projected(t, projected, attention_mask(b), t.leaf(a));
  const Tensor& A = t.value(alpha);
  auto lists = self_inclusive_lists(b);
  std::vector<double> out;
  for (int v : lists[static_cast<std::size_t>(node)]) {
    out.push_back(A(static_cast<std::size_t>(node), static_cast<std::size_t>(v)));
  }
  return out;
}

// ---- model forward ----

// Applies the configured update rule for S steps over the whole batch.
// Interior steps use ReLU; the final step is linear so the outputs are the
// class logits. Returns the final node-state Var; if param_vars is given it
// receives one leaf Var per parameter, aligned with params.tensors, so the
// caller can read gradients after backward().
inline Var model_forward(Tape& t, const GraphBatch& batch, const GnnParams& params,
                         const GnnConfig& config, std::vector<Var>* param_vars = nullptr) {
  validate_config(config);
  validate_params(params, config);
  if (batch.num_classes != config.num_classes) {
    throw InvalidInputError("model_forward: batch and configuration disagree on class count");
  }

  std::vector<Var> pv;
  pv.reserve(params.size());
  for (const Tensor& p : params.tensors) pv.push_back(t.leaf(p));
  auto var_of = [&](const std::string& name) { return pv[params.index_of(name)]; };

  Var h = t.leaf(batch.initial_states);

  switch (config.family) {
    case GnnFamily::Gcn: {
      AggregationPlan plan = gcn_plan(batch);
      for (int s = 0; s < config.steps; ++s) {
        bool interior = s + 1 < config.steps;
        h = gcn_layer(t, h, plan, var_of("step" + std::to_string(s) + ".W"), interior);
      }
      break;
    }
    case GnnFamily::Ggnn: {
      AggregationPlan plan = neighbor_sum_plan(batch);
      for (int s = 0; s < config.steps; ++s) {
        std::string p = "step" + std::to_string(s) + ".";
        GruVars g{var_of(p + "gru.Wz"), var_of(p + "gru.Uz"), var_of(p + "gru.bz"),
                  var_of(p + "gru.Wr"), var_of(p + "gru.Ur"), var_of(p + "gru.br"),
                  var_of(p + "gru.Wh"), var_of(p + "gru.Uh"), var_of(p + "gru.bh")};
        h = ggnn_layer(t, h, plan, var_of(p + "W"), g);
      }
      break;
    }
    case GnnFamily::Gat: {
      Tensor mask = attention_mask(batch);
      auto lists = self_inclusive_lists(batch);
      for (int s = 0; s < config.steps; ++s) {
        bool interior = s + 1 < config.steps;
        std::vector<GatHeadVars> heads;
        heads.reserve(static_cast<std::size_t>(config.heads));
        for (int hd = 0; hd < config.heads; ++hd) {
          std::string p = "step" + std::to_string(s) + ".head" + std::to_string(hd) + ".";
          heads.push_back({var_of(p + "W"), var_of(p + "a")});
        }
        h = gat_layer(t, h, mask, lists, heads, interior, !interior);
      }
      break;
    }
  }

  if (param_vars) *param_vars = std::move(pv);
  return h;
}

// ---- prediction ----

struct ColumnPrediction {
  std::string table_id;
  int column_index = 0;
  int class_index = 0;
  std::string label;
  std::vector<double> probabilities;
};

// Per column: softmax of the final state, argmax mapped through the
// vocabulary, exact ties resolved to the lowest class index.
inline std::vector<ColumnPrediction> predict(const GraphBatch& batch, const GnnParams& params,
                                             const GnnConfig& config, const LabelVocab& vocab) {
  Tape t;
  Var out = model_forward(t, batch, params, config);
  const Tensor& logits = t.value(out);
  std::vector<ColumnPrediction> preds;
  preds.reserve(static_cast<std::size_t>(batch.total_nodes));
  for (std::size_t gi = 0; gi < batch.graphs.size(); ++gi) {
    const ColumnGraph& g = batch.graphs[gi];
    int off = batch.offsets[gi];
    for (int u = 0; u < g.num_nodes; ++u) {
      auto row = static_cast<std::size_t>(off + u);
      Tensor z({logits.cols()});
      for (std::size_t j = 0; j < logits.cols(); ++j) z(j) = logits(row, j);
      Tensor probs = softmax(z);
      auto cls = static_cast<int>(argmax(probs));
      preds.push_back({g.table_id, u, cls, vocab.name(cls),
                       {probs.data().begin(), probs.data().end()}});
    }
  }
  return preds;
}

inline std::vector<ColumnPrediction> predict(const ColumnGraph& graph, const GnnParams& params,
                                             const GnnConfig& config, const LabelVocab& vocab) {
  return predict(batch_graphs({graph}), params, config, vocab);
}

// ---- serialization ----

struct GnnModel {
  GnnConfig config;
  GnnParams params;
  LabelVocab vocab;
  // Extra named tensors riding along in the same envelope (for example an
  // embedded base predictor); kept sorted by name.
  std::vector<std::pair<std::string, Tensor>> extra_params;
};

inline constexpr int kModelFormatVersion = 1;

inline void save_model(const std::filesystem::path& path, const GnnModel& model) {
  validate_params(model.params, model.config);
  nlohmann::ordered_json j;
  j["format_version"] = kModelFormatVersion;
  j["family"] = family_name(model.config.family);
  j["S"] = model.config.steps;
  j["K"] = model.config.heads;
  j["hidden_dim"] = resolved_hidden(model.config);
  j["k"] = model.config.num_classes;
  j["vocab"] = model.vocab.names();
  nlohmann::ordered_json pj = nlohmann::ordered_json::object();
  auto write_param = [&](const std::string& name, const Tensor& t) {
    nlohmann::ordered_json e;
    e["shape"] = t.shape();
    e["data_b64"] = base64_encode(doubles_to_le_bytes(t.data()));
    pj[name] = std::move(e);
  };
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    write_param(model.params.names[i], model.params.tensors[i]);
  }
  for (const auto& [name, t] : model.extra_params) write_param(name, t);
  j["params"] = std::move(pj);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write model file " + path.string());
  out << j.dump(2) << "\n";
}

inline GnnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError("model file is not valid JSON: " + path.string());
  try {
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      throw FormatError("unsupported model format_version");
    }
    GnnModel model;
    auto family = parse_family(j.at("family").get<std::string>());
    if (!family) throw FormatError("unknown model family");
    model.config.family = *family;
    model.config.steps = j.at("S").get<int>();
    model.config.heads = j.at("K").get<int>();
    model.config.hidden_dim = j.at("hidden_dim").get<int>();
    model.config.num_classes = j.at("k").get<int>();
    model.vocab = LabelVocab::from_names(j.at("vocab").get<std::vector<std::string>>());
    if (model.vocab.size() != model.config.num_classes) {
      throw FormatError("model vocabulary size does not match k");
    }

    const auto& pj = j.at("params");
    auto read_tensor = [&](const std::string& name) {
      const auto& e = pj.at(name);
      auto shape = e.at("shape").get<std::vector<std::size_t>>();
      auto data = le_bytes_to_doubles(base64_decode(e.at("data_b64").get<std::string>()));
      Tensor t(std::move(shape), std::move(data));
      ensure_finite(t, "load_model");
      return t;
    };
    for (auto& spec : param_layout(model.config)) {
      if (!pj.contains(spec.name)) {
        throw FormatError("model is missing parameter '" + spec.name + "'");
      }
      Tensor t = read_tensor(spec.name);
      if (t.shape() != spec.shape) {
        throw FormatError("parameter '" + spec.name + "' has an unexpected shape");
      }
      model.params.add(spec.name, std::move(t));
    }
    for (auto it = pj.begin(); it != pj.end(); ++it) {
      bool expected = false;
      for (const std::string& n : model.params.names) {
        if (n == it.key()) {
          expected = true;
          break;
        }
      }
      if (!expected) model.extra_params.emplace_back(it.key(), read_tensor(it.key()));
    }
    std::sort(model.extra_params.begin(), model.extra_params.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

}  // namespace colgnn
