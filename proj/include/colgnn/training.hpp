#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "colgnn/adam.hpp"
#include "colgnn/autodiff.hpp"
#include "colgnn/errors.hpp"
#include "colgnn/gnn.hpp"
#include "colgnn/graph.hpp"
#include "colgnn/metrics.hpp"
#include "colgnn/predictor.hpp"
#include "colgnn/rng.hpp"
#include "colgnn/table.hpp"

namespace colgnn {

struct TrainConfig {
  double learning_rate = 1e-3;
  double weight_decay = 5e-4;
  int epochs = 0;  // 0 means "the family preset"
  int batch_size = 32;
  std::uint64_t seed = 42;
};

// Epoch presets matched to the training protocol the defaults come from.
inline int default_epochs(GnnFamily family) {
  switch (family) {
    case GnnFamily::Gcn: return 100;
    case GnnFamily::Ggnn: return 200;
    case GnnFamily::Gat: return 100;
  }
  throw InternalError("unknown family");
}

inline int resolved_epochs(const TrainConfig& c, GnnFamily family) {
  return c.epochs > 0 ? c.epochs : default_epochs(family);
}

// Summed negative log-likelihood of the gold classes under row-wise softmax,
// computed with max-subtracted log-sum-exp.
inline double nll_loss(const Tensor& final_states, std::span<const int> gold) {
  require_matrix(final_states, "nll_loss");
  if (gold.size() != final_states.rows()) {
    throw InvalidInputError("nll_loss: one gold class required per row");
  }
  double total = 0.0;
  for (std::size_t u = 0; u < final_states.rows(); ++u) {
    int c = gold[u];
    if (c < 0 || static_cast<std::size_t>(c) >= final_states.cols()) {
      throw InvalidInputError("nll_loss: class index out of range");
    }
    double mx = final_states(u, 0);
    for (std::size_t j = 1; j < final_states.cols(); ++j) {
      mx = std::max(mx, final_states(u, j));
    }
    double denom = 0.0;
    for (std::size_t j = 0; j < final_states.cols(); ++j) {
      denom += std::exp(final_states(u, j) - mx);
    }
    total += mx + std::log(denom) - final_states(u, static_cast<std::size_t>(c));
  }
  return total;
}

struct EpochStats {
  int epoch = 0;          // 1-based
  double train_loss = 0;  // mean per-node NLL over the epoch
  double val_macro_f1 = 0;
};

struct FitResult {
  GnnConfig config;
  GnnParams params;  // from the epoch with the best validation macro F1
  std::vector<EpochStats> history;
  int best_epoch = 0;
  double best_val_macro_f1 = 0.0;
};

namespace detail {

// Builds one graph per table, joining columns against the logits map.
inline std::vector<ColumnGraph> graphs_for_tables(std::span<const Table> tables,
                                                  const LogitsMap& logits,
                                                  const LabelVocab& vocab,
                                                  bool require_labels) {
  std::vector<ColumnGraph> graphs;
  graphs.reserve(tables.size());
  for (const Table& t : tables) {
    std::vector<std::vector<double>> rows;
    rows.reserve(t.columns.size());
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      auto it = logits.find({t.table_id, static_cast<int>(i)});
      if (it == logits.end()) {
        throw JoinError(t.table_id, static_cast<int>(i), "no logits record");
      }
      rows.push_back(it->second);
      if (require_labels && !t.columns[i].label) {
        throw InvalidInputError("training requires a label on every column; table '" +
                                t.table_id + "' column " + std::to_string(i) + " has none");
      }
    }
    graphs.push_back(build_graph(t, rows, vocab));
  }
  return graphs;
}

inline std::vector<int> gold_of(const GraphBatch& b) { return b.gold; }

// Validation predictions evaluated in fixed-size batches.
inline double validation_macro_f1(const std::vector<ColumnGraph>& graphs,
                                  const GnnParams& params, const GnnConfig& config,
                                  int batch_size, int num_classes) {
  std::vector<int> preds;
  std::vector<int> golds;
  auto step = static_cast<std::size_t>(std::max(batch_size, 1));
  for (std::size_t start = 0; start < graphs.size(); start += step) {
    std::size_t end = std::min(graphs.size(), start + step);
    GraphBatch batch =
        batch_graphs({graphs.begin() + static_cast<std::ptrdiff_t>(start),
                      graphs.begin() + static_cast<std::ptrdiff_t>(end)});
    Tape tape;
    const Tensor& out = tape.value(model_forward(tape, batch, params, config));
    for (std::size_t u = 0; u < out.rows(); ++u) {
      Tensor row({out.cols()});
      for (std::size_t j = 0; j < out.cols(); ++j) row(j) = out(u, j);
      preds.push_back(static_cast<int>(argmax(row)));
      golds.push_back(batch.gold[u]);
    }
  }
  return f_scores(preds, golds, num_classes).macro;
}

}  // namespace detail

// One training run: per epoch, a seeded shuffle into fixed-size mini-batches,
// forward, summed NLL, backward, one Adam step per batch; validation macro F1
// selects the returned parameters (first epoch wins ties).
inline FitResult fit(std::span<const Table> train_tables, std::span<const Table> val_tables,
                     const LogitsMap& logits, const LabelVocab& vocab,
                     const TrainConfig& train_config, GnnConfig gnn_config) {
  if (train_tables.empty()) throw InvalidInputError("fit: empty training set");
  gnn_config.num_classes = vocab.size();
  if (gnn_config.family != GnnFamily::Gat) gnn_config.heads = 1;  // heads are attention-only
  validate_config(gnn_config);

  std::vector<ColumnGraph> train_graphs =
      detail::graphs_for_tables(train_tables, logits, vocab, true);
  std::vector<ColumnGraph> val_graphs =
      detail::graphs_for_tables(val_tables, logits, vocab, true);

  std::size_t train_nodes = 0;
  for (const ColumnGraph& g : train_graphs) {
    train_nodes += static_cast<std::size_t>(g.num_nodes);
  }

  Rng seed_root(train_config.seed);
  GnnParams params = init_params(gnn_config, train_config.seed);
  AdamState adam = AdamState::like(params.tensors);
  Rng shuffle_rng = seed_root.stream("shuffle");

  FitResult result;
  result.config = gnn_config;
  result.params = params;
  result.best_epoch = 0;
  result.best_val_macro_f1 = -1.0;

  std::vector<std::size_t> order(train_graphs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  auto batch_size = static_cast<std::size_t>(std::max(train_config.batch_size, 1));

  int epochs = resolved_epochs(train_config, gnn_config.family);
  for (int epoch = 1; epoch <= epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      std::size_t end = std::min(order.size(), start + batch_size);
      std::vector<ColumnGraph> members;
      members.reserve(end - start);
      for (std::size_t i = start; i < end; ++i) members.push_back(train_graphs[order[i]]);
      GraphBatch batch = batch_graphs(std::move(members));

      Tape tape;
      std::vector<Var> pvars;
      Var out = model_forward(tape, batch, params, gnn_config, &pvars);
      Var loss = tape.nll(out, batch.gold);
      epoch_loss += tape.value(loss)(0);
      tape.backward(loss);
      std::vector<Tensor> grads;
      grads.reserve(pvars.size());
      for (Var v : pvars) grads.push_back(tape.adjoint(v));
      adam_step(params.tensors, grads, adam, train_config.learning_rate,
                train_config.weight_decay);
    }

    double val_macro = val_graphs.empty()
                           ? 0.0
                           : detail::validation_macro_f1(val_graphs, params, gnn_config,
                                                         train_config.batch_size, vocab.size());
    result.history.push_back(
        {epoch, epoch_loss / static_cast<double>(train_nodes), val_macro});
    if (!val_graphs.empty() && val_macro > result.best_val_macro_f1) {
      result.best_val_macro_f1 = val_macro;
      result.best_epoch = epoch;
      result.params = params;
    }
  }
  if (val_graphs.empty()) {
    // no validation signal; keep the final parameters
    result.params = std::move(params);
    result.best_epoch = epochs;
    result.best_val_macro_f1 = 0.0;
  }
  return result;
}

inline const std::vector<int>& steps_grid() {
  static const std::vector<int> grid = {1, 2, 3, 4};
  return grid;
}

inline const std::vector<int>& heads_grid() {
  static const std::vector<int> grid = {1, 2, 4, 8, 12};
  return grid;
}

struct GridCell {
  GnnConfig config;
  double val_macro_f1 = 0.0;
  int best_epoch = 0;
};

struct GridResult {
  GnnConfig best_config;
  FitResult best_fit;
  std::vector<GridCell> cells;
};

// Trains one model per grid cell (steps x heads for the attention family,
// steps only otherwise) and keeps the best validation macro F1. Ties resolve
// to the smaller step count, then the smaller head count.
inline GridResult grid_search(std::span<const Table> train_tables,
                              std::span<const Table> val_tables, const LogitsMap& logits,
                              const LabelVocab& vocab, const TrainConfig& train_config,
                              GnnFamily family, std::span<const int> steps,
                              std::span<const int> heads) {
  if (steps.empty()) throw InvalidInputError("grid_search: empty step grid");
  bool uses_heads = family == GnnFamily::Gat;
  if (uses_heads && heads.empty()) throw InvalidInputError("grid_search: empty head grid");

  GridResult result;
  bool have_best = false;
  std::vector<int> one_head = {1};
  std::span<const int> head_axis = uses_heads ? heads : std::span<const int>(one_head);
  for (int s : steps) {
    for (int h : head_axis) {
      GnnConfig config;
      config.family = family;
      config.steps = s;
      config.heads = h;
      FitResult fitted = fit(train_tables, val_tables, logits, vocab, train_config, config);
      result.cells.push_back({fitted.config, fitted.best_val_macro_f1, fitted.best_epoch});
      if (!have_best || fitted.best_val_macro_f1 > result.best_fit.best_val_macro_f1) {
        have_best = true;
        result.best_config = fitted.config;
        result.best_fit = std::move(fitted);
      }
    }
  }
  return result;
}

// History export: CSV with header epoch,train_loss,val_macro_f1.
inline void write_history_csv(const std::filesystem::path& path,
                              std::span<const EpochStats> history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write history file " + path.string());
  out << "epoch,train_loss,val_macro_f1\n";
  char line[128];
  for (const EpochStats& e : history) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", e.epoch, e.train_loss,
                  e.val_macro_f1);
    out << line;
  }
}

}  // namespace colgnn
