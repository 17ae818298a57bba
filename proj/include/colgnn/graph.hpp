#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "colgnn/errors.hpp"
#include "colgnn/table.hpp"
#include "colgnn/tensor.hpp"

namespace colgnn {

// Complete graph over the columns of one table. Node u starts from the base
// predictor's raw logits for column u; adjacency lists never contain the node
// itself (each update rule adds its own self term where required).
struct ColumnGraph {
  std::string table_id;
  int num_nodes = 0;
  int num_classes = 0;
  Tensor initial_states;                   // num_nodes x num_classes
  std::vector<int> gold;                   // class index per node, -1 if unlabeled
  std::vector<std::vector<int>> neighbors;  // sorted, symmetric, no self entry
};

inline ColumnGraph build_graph(const Table& table,
                               const std::vector<std::vector<double>>& logits,
                               const LabelVocab& vocab) {
  std::size_t n = table.num_columns();
  if (n == 0) throw InvalidInputError("build_graph: table has no columns");
  if (logits.size() != n) {
    throw InvalidInputError("build_graph: expected one logits vector per column, got " +
                            std::to_string(logits.size()) + " for " + std::to_string(n) +
                            " columns");
  }
  auto k = static_cast<std::size_t>(vocab.size());
  ColumnGraph g;
  g.table_id = table.table_id;
  g.num_nodes = static_cast<int>(n);
  g.num_classes = static_cast<int>(k);
  g.initial_states = Tensor({n, k});
  g.gold.resize(n, -1);
  g.neighbors.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    if (logits[u].size() != k) {
      throw InvalidInputError("build_graph: logits vector for column " + std::to_string(u) +
                              " has length " + std::to_string(logits[u].size()) +
                              ", expected " + std::to_string(k));
    }
    for (std::size_t j = 0; j < k; ++j) g.initial_states(u, j) = logits[u][j];
    if (table.columns[u].label) g.gold[u] = vocab.index_of(*table.columns[u].label);
    for (std::size_t v = 0; v < n; ++v) {
      if (v != u) g.neighbors[u].push_back(static_cast<int>(v));
    }
  }
  ensure_finite(g.initial_states, "build_graph");
  return g;
}

// Disjoint union of graphs, node indices remapped by per-graph offsets. No
// edge crosses a graph boundary; membership is kept so predictions can be
// routed back to (table_id, column_index).
struct GraphBatch {
  std::vector<ColumnGraph> graphs;
  std::vector<int> offsets;  // offsets[i] = global index of graph i's node 0
  int total_nodes = 0;
  int num_classes = 0;
  Tensor initial_states;  // total_nodes x num_classes
  std::vector<int> gold;  // flattened per-node gold, -1 if unlabeled

  // Global adjacency (no self entries), sorted per node.
  std::vector<std::vector<int>> neighbors() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(total_nodes));
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
      int off = offsets[gi];
      const ColumnGraph& g = graphs[gi];
      for (int u = 0; u < g.num_nodes; ++u) {
        auto& lst = out[static_cast<std::size_t>(off + u)];
        lst.reserve(g.neighbors[static_cast<std::size_t>(u)].size());
        for (int v : g.neighbors[static_cast<std::size_t>(u)]) lst.push_back(off + v);
      }
    }
    return out;
  }
};

inline GraphBatch batch_graphs(std::vector<ColumnGraph> graphs) {
  if (graphs.empty()) throw InvalidInputError("batch_graphs: empty graph list");
  int k = graphs[0].num_classes;
  int total = 0;
  for (const ColumnGraph& g : graphs) {
    if (g.num_classes != k) {
      throw InvalidInputError("batch_graphs: graphs disagree on class count");
    }
    total += g.num_nodes;
  }
  GraphBatch b;
  b.num_classes = k;
  b.total_nodes = total;
  b.initial_states = Tensor({static_cast<std::size_t>(total), static_cast<std::size_t>(k)});
  b.gold.resize(static_cast<std::size_t>(total), -1);
  int at = 0;
  for (ColumnGraph& g : graphs) {
    b.offsets.push_back(at);
    for (int u = 0; u < g.num_nodes; ++u) {
      for (int j = 0; j < k; ++j) {
        b.initial_states(static_cast<std::size_t>(at + u), static_cast<std::size_t>(j)) =
            g.initial_states(static_cast<std::size_t>(u), static_cast<std::size_t>(j));
      }
      b.gold[static_cast<std::size_t>(at + u)] = g.gold[static_cast<std::size_t>(u)];
    }
    at += g.num_nodes;
  }
  b.graphs = std::move(graphs);
  return b;
}

}  // namespace colgnn
