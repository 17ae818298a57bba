#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "colgnn/adam.hpp"
#include "colgnn/autodiff.hpp"
#include "colgnn/errors.hpp"
#include "colgnn/rng.hpp"
#include "colgnn/table.hpp"
#include "colgnn/tensor.hpp"

namespace colgnn {

// ---- column featurization ----

inline constexpr std::size_t kDefaultFeatureWidth = 1024;
// Trailing feature slots held out of the hashed n-gram block for scalar
// column statistics.
inline constexpr std::size_t kReservedFeatureSlots = 8;
// Cell terminator inserted before hashing so cell boundaries are visible to
// the n-grams and ["ab"] differs from ["a","b"].
inline constexpr char kCellSentinel = '\x1f';

inline bool parses_as_number(const std::string& s) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  std::strtod(begin, &end);
  return end == begin + s.size();
}

// Character {1,2,3}-gram counts over the cell values (each cell terminated
// by the 0x1f sentinel), hashed into width-8 buckets with 64-bit FNV-1a and
// a splitmix64 finalizer, then L2-normalized. The reserved trailing slots
// carry the mean cell length and the numeric-cell fraction. Empty columns
// map to the zero vector.
inline Tensor featurize(const std::vector<std::string>& cells,
                        std::size_t width = kDefaultFeatureWidth) {
  if (width < 16) throw InvalidInputError("featurize: width must be at least 16");
  Tensor out({width});
  if (cells.empty()) return out;

  std::string joined;
  for (const std::string& cell : cells) {
    joined += cell;
    joined += kCellSentinel;
  }

  std::size_t buckets = width - kReservedFeatureSlots;
  for (std::size_t n = 1; n <= 3; ++n) {
    if (joined.size() < n) break;
    for (std::size_t i = 0; i + n <= joined.size(); ++i) {
      std::uint64_t h = mix64(fnv1a64(joined.data() + i, n));
      out(h % buckets) += 1.0;
    }
  }

  double norm = 0.0;
  for (std::size_t i = 0; i < buckets; ++i) norm += out(i) * out(i);
  norm = std::sqrt(norm);
  if (norm > 0.0) {
    for (std::size_t i = 0; i < buckets; ++i) out(i) /= norm;
  }

  double total_len = 0.0;
  double numeric = 0.0;
  for (const std::string& cell : cells) {
    total_len += static_cast<double>(cell.size());
    if (parses_as_number(cell)) numeric += 1.0;
  }
  out(buckets) = total_len / static_cast<double>(cells.size());
  out(buckets + 1) = numeric / static_cast<double>(cells.size());
  ensure_finite(out, "featurize");
  return out;
}

// ---- baseline single-column predictor ----

// Multinomial logistic regression over featurize() vectors; a desk-scale
// stand-in for any stronger single-column predictor whose logits arrive via
// load_logits().
struct LinearModel {
  Tensor weights;  // k x m
  Tensor bias;     // k

  std::size_t feature_width() const { return weights.cols(); }
  int num_classes() const { return static_cast<int>(weights.rows()); }
};

struct BaselineConfig {
  int epochs = 100;
  double learning_rate = 0.05;
  double weight_decay = 1e-4;
  int batch_size = 64;
  std::uint64_t seed = 1;
  std::size_t feature_width = kDefaultFeatureWidth;
};

inline Tensor predict_logits(const LinearModel& model, const Tensor& features) {
  if (features.rank() != 1 || features.size() != model.feature_width()) {
    throw InvalidInputError("predict_logits: feature width does not match the model");
  }
  Tensor logits = matvec(model.weights, features);
  for (std::size_t c = 0; c < logits.size(); ++c) logits(c) += model.bias(c);
  return logits;
}

inline Tensor predict_logits(const LinearModel& model, const std::vector<std::string>& column) {
  return predict_logits(model, featurize(column, model.feature_width()));
}

// Weights and bias start at zero, so with zero epochs the logits equal the
// bias. Training is mini-batch Adam on the summed NLL; deterministic under
// the seed.
inline LinearModel baseline_fit(const std::vector<std::vector<std::string>>& columns,
                                const std::vector<int>& labels, const LabelVocab& vocab,
                                const BaselineConfig& config) {
  if (columns.size() != labels.size()) {
    throw InvalidInputError("baseline_fit: one label required per column");
  }
  if (columns.empty()) throw InvalidInputError("baseline_fit: empty training set");
  auto k = static_cast<std::size_t>(vocab.size());
  std::vector<std::size_t> support(k, 0);
  for (int label : labels) {
    if (label < 0 || static_cast<std::size_t>(label) >= k) {
      throw InvalidInputError("baseline_fit: label index out of range");
    }
    support[static_cast<std::size_t>(label)] += 1;
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (support[c] == 0) {
      throw InvalidInputError("baseline_fit: class '" + vocab.name(static_cast<int>(c)) +
                              "' has no training examples");
    }
  }

  std::size_t m = config.feature_width;
  Tensor features({columns.size(), m});
  for (std::size_t i = 0; i < columns.size(); ++i) {
    Tensor f = featurize(columns[i], m);
    for (std::size_t j = 0; j < m; ++j) features(i, j) = f(j);
  }

  std::vector<Tensor> params = {Tensor({k, m}), Tensor({k})};
  AdamState adam = AdamState::like(params);
  Rng shuffle_rng = Rng(config.seed).stream("baseline_shuffle");

  std::vector<std::size_t> order(columns.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  auto batch_size = static_cast<std::size_t>(std::max(config.batch_size, 1));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      std::size_t end = std::min(order.size(), start + batch_size);
      Tensor x({end - start, m});
      std::vector<int> gold;
      for (std::size_t i = start; i < end; ++i) {
        for (std::size_t j = 0; j < m; ++j) x(i - start, j) = features(order[i], j);
        gold.push_back(labels[order[i]]);
      }
      Tape tape;
      Var w = tape.leaf(params[0]);
      Var b = tape.leaf(params[1]);
      Var logits = tape.add_rowvec(tape.matmul_nt(tape.leaf(x), w), b);
      Var loss = tape.nll(logits, gold);
      tape.backward(loss);
      std::vector<Tensor> grads = {tape.adjoint(w), tape.adjoint(b)};
      adam_step(params, grads, adam, config.learning_rate, config.weight_decay);
    }
  }
  return LinearModel{std::move(params[0]), std::move(params[1])};
}

// Gathers every labeled column of the tables.
inline LinearModel baseline_fit_tables(std::span<const Table> tables, const LabelVocab& vocab,
                                       const BaselineConfig& config) {
  std::vector<std::vector<std::string>> columns;
  std::vector<int> labels;
  for (const Table& t : tables) {
    for (const Column& c : t.columns) {
      if (!c.label) {
        throw InvalidInputError("baseline_fit: unlabeled column in table '" + t.table_id + "'");
      }
      columns.push_back(c.values);
      labels.push_back(vocab.index_of(*c.label));
    }
  }
  return baseline_fit(columns, labels, vocab, config);
}

// ---- logits records and files ----

struct LogitsRecord {
  std::string table_id;
  int column_index = 0;
  std::vector<double> logits;
};

using LogitsKey = std::pair<std::string, int>;
using LogitsMap = std::map<LogitsKey, std::vector<double>>;

// Logits files are JSON Lines:
//   {"table_id": str, "column_index": int, "logits": [float,...]}
inline LogitsMap load_logits(const std::filesystem::path& path, const LabelVocab& vocab) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open logits file " + path.string());
  LogitsMap map;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw FormatError("invalid JSON", line_no);
    try {
      LogitsRecord rec;
      rec.table_id = j.at("table_id").get<std::string>();
      rec.column_index = j.at("column_index").get<int>();
      rec.logits = j.at("logits").get<std::vector<double>>();
      if (rec.column_index < 0) throw FormatError("column_index must be nonnegative", line_no);
      if (rec.logits.size() != static_cast<std::size_t>(vocab.size())) {
        throw FormatError("expected " + std::to_string(vocab.size()) + " logits, got " +
                              std::to_string(rec.logits.size()),
                          line_no);
      }
      for (double v : rec.logits) {
        if (!std::isfinite(v)) throw FormatError("non-finite logit", line_no);
      }
      auto [it, inserted] =
          map.emplace(LogitsKey{rec.table_id, rec.column_index}, std::move(rec.logits));
      (void)it;
      if (!inserted) {
        throw FormatError("duplicate record for table '" + rec.table_id + "' column " +
                              std::to_string(rec.column_index),
                          line_no);
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed logits record: ") + e.what(), line_no);
    }
  }
  return map;
}

inline void save_logits(const std::filesystem::path& path,
                        std::span<const LogitsRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write logits file " + path.string());
  for (const LogitsRecord& rec : records) {
    nlohmann::json j;
    j["table_id"] = rec.table_id;
    j["column_index"] = rec.column_index;
    j["logits"] = rec.logits;
    out << j.dump() << "\n";
  }
}

inline LogitsMap logits_for_tables(const LinearModel& model, std::span<const Table> tables) {
  LogitsMap map;
  for (const Table& t : tables) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      Tensor z = predict_logits(model, t.columns[i].values);
      map[{t.table_id, static_cast<int>(i)}] = z.data();
    }
  }
  return map;
}

}  // namespace colgnn
