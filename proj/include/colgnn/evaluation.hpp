#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "colgnn/errors.hpp"
#include "colgnn/gnn.hpp"
#include "colgnn/graph.hpp"
#include "colgnn/metrics.hpp"
#include "colgnn/predictor.hpp"
#include "colgnn/rng.hpp"
#include "colgnn/table.hpp"
#include "colgnn/training.hpp"

namespace colgnn {

// ---- cross-validation splits ----

struct FoldSplit {
  std::vector<std::string> train_ids;
  std::vector<std::string> val_ids;
  std::vector<std::string> test_ids;
};

// Splits tables (never columns) into k disjoint near-equal test folds; the
// remaining tables of each fold are further split 80/20 into train and
// validation. The train share is floor(0.8 * n), but never zero.
inline std::vector<FoldSplit> kfold_split(std::span<const Table> tables, int folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw InvalidInputError("kfold_split: at least 2 folds required");
  if (tables.size() < static_cast<std::size_t>(folds)) {
    throw InvalidInputError("kfold_split: fewer tables than folds");
  }
  std::vector<std::string> ids;
  ids.reserve(tables.size());
  for (const Table& t : tables) ids.push_back(t.table_id);
  Rng rng = Rng(seed).stream("split");
  rng.shuffle(ids);

  std::size_t base = ids.size() / static_cast<std::size_t>(folds);
  std::size_t rem = ids.size() % static_cast<std::size_t>(folds);
  std::vector<FoldSplit> splits(static_cast<std::size_t>(folds));
  std::size_t at = 0;
  for (std::size_t f = 0; f < splits.size(); ++f) {
    std::size_t take = base + (f < rem ? 1 : 0);
    splits[f].test_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(at),
                              ids.begin() + static_cast<std::ptrdiff_t>(at + take));
    at += take;
  }
  for (std::size_t f = 0; f < splits.size(); ++f) {
    std::vector<std::string> rest;
    for (std::size_t g = 0; g < splits.size(); ++g) {
      if (g == f) continue;
      rest.insert(rest.end(), splits[g].test_ids.begin(), splits[g].test_ids.end());
    }
    std::size_t n_train =
        std::max<std::size_t>(1, static_cast<std::size_t>(0.8 * static_cast<double>(rest.size())));
    splits[f].train_ids.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_train));
    splits[f].val_ids.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_train), rest.end());
  }
  return splits;
}

// ---- frequency bins ----

enum class FrequencyBin { High = 0, Medium = 1, Low = 2 };

inline const char* bin_name(FrequencyBin b) {
  switch (b) {
    case FrequencyBin::High: return "high";
    case FrequencyBin::Medium: return "medium";
    case FrequencyBin::Low: return "low";
  }
  throw InternalError("unknown bin");
}

// Classes sorted by descending column count (ties by class index) and cut
// into `bins` contiguous groups of near-equal class count; remainders go to
// the earlier bins.
inline std::vector<FrequencyBin> frequency_bins(const std::vector<std::size_t>& class_counts,
                                                int bins = 3) {
  if (class_counts.empty()) throw InvalidInputError("frequency_bins: no classes");
  if (bins < 1) throw InvalidInputError("frequency_bins: bins must be positive");
  std::vector<std::size_t> order(class_counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (class_counts[a] != class_counts[b]) return class_counts[a] > class_counts[b];
    return a < b;
  });
  std::size_t k = class_counts.size();
  std::size_t base = k / static_cast<std::size_t>(bins);
  std::size_t rem = k % static_cast<std::size_t>(bins);
  std::vector<FrequencyBin> result(k, FrequencyBin::Low);
  std::size_t at = 0;
  for (int b = 0; b < bins; ++b) {
    std::size_t take = base + (static_cast<std::size_t>(b) < rem ? 1 : 0);
    for (std::size_t i = 0; i < take; ++i) {
      result[order[at + i]] = static_cast<FrequencyBin>(std::min(b, 2));
    }
    at += take;
  }
  return result;
}

// ---- per-column-count breakdown ----

struct EvalExample {
  int table_columns = 0;
  int gold = 0;
  int predicted = 0;
};

// Metrics computed separately over the columns of tables with exactly n
// columns, for every observed n.
inline std::map<int, FScoreReport> breakdown_by_column_count(
    std::span<const EvalExample> examples, int num_classes) {
  std::map<int, std::pair<std::vector<int>, std::vector<int>>> groups;
  for (const EvalExample& e : examples) {
    groups[e.table_columns].first.push_back(e.predicted);
    groups[e.table_columns].second.push_back(e.gold);
  }
  std::map<int, FScoreReport> out;
  for (const auto& [n, pg] : groups) {
    out[n] = f_scores(pg.first, pg.second, num_classes);
  }
  return out;
}

// ---- synthetic planted-dependency dataset ----

struct SyntheticDataset {
  std::vector<Table> tables;
  LabelVocab vocab;
  std::string ambiguous_a;  // resolved by partner_a
  std::string ambiguous_b;  // resolved by partner_b
  std::string partner_a;
  std::string partner_b;
};

namespace detail {

inline std::vector<std::string> token_pool(Rng& rng, std::size_t count, std::size_t min_len,
                                           std::size_t max_len) {
  std::set<std::string> pool;
  while (pool.size() < count) {
    std::size_t len = min_len + rng.below(max_len - min_len + 1);
    std::string token;
    for (std::size_t i = 0; i < len; ++i) {
      token += static_cast<char>('a' + rng.below(26));
    }
    pool.insert(token);
  }
  return {pool.begin(), pool.end()};
}

inline std::vector<std::string> digit_pool(Rng& rng, std::size_t count) {
  std::set<std::string> pool;
  while (pool.size() < count) {
    std::size_t len = 4 + rng.below(4);
    std::string token;
    token += static_cast<char>('1' + rng.below(9));
    for (std::size_t i = 1; i < len; ++i) {
      token += static_cast<char>('0' + rng.below(10));
    }
    pool.insert(token);
  }
  return {pool.begin(), pool.end()};
}

inline std::vector<std::string> sample_cells(Rng& rng, const std::vector<std::string>& pool,
                                             std::size_t count) {
  std::vector<std::string> cells;
  cells.reserve(count);
  for (std::size_t i = 0; i < count; ++i) cells.push_back(pool[rng.below(pool.size())]);
  return cells;
}

}  // namespace detail

// Tables with one ambiguous column whose two candidate classes draw from the
// same value pool, so no single-column predictor can beat a coin flip on
// them; the true class is fully determined by a co-occurring partner column
// (distinct word-like vs numeric pools), plus filler columns with their own
// distinctive pools.
inline SyntheticDataset synthesize_dependency_dataset(int num_tables, std::uint64_t seed) {
  if (num_tables < 20) {
    throw InvalidInputError("synthesize_dependency_dataset: at least 20 tables required");
  }
  SyntheticDataset ds;
  ds.ambiguous_a = "capital";
  ds.ambiguous_b = "city";
  ds.partner_a = "country";
  ds.partner_b = "population";
  ds.vocab =
      LabelVocab::from_names({"capital", "city", "code", "country", "population"});

  // The shared pool is small relative to the cell count, so every ambiguous
  // column covers most of it and single-column features concentrate onto the
  // pool distribution, leaving the pair indistinguishable in isolation.
  Rng pool_rng = Rng(seed).stream("pools");
  std::vector<std::string> shared_pool = detail::token_pool(pool_rng, 30, 5, 9);
  std::vector<std::string> country_pool = detail::token_pool(pool_rng, 40, 5, 9);
  std::vector<std::string> population_pool = detail::digit_pool(pool_rng, 40);
  std::vector<std::string> code_pool;
  for (const std::string& t : detail::token_pool(pool_rng, 40, 2, 3)) {
    code_pool.push_back(t + "-" + std::to_string(pool_rng.below(90) + 10));
  }

  Rng rng = Rng(seed).stream("tables");
  for (int i = 0; i < num_tables; ++i) {
    Table t;
    t.table_id = "synth_" + std::to_string(i);
    std::size_t cells = 25 + rng.below(16);

    bool partner_is_a = rng.uniform() < 0.5;
    Column ambiguous;
    ambiguous.values = detail::sample_cells(rng, shared_pool, cells);
    ambiguous.label = partner_is_a ? ds.ambiguous_a : ds.ambiguous_b;

    Column partner;
    partner.values = detail::sample_cells(
        rng, partner_is_a ? country_pool : population_pool, cells);
    partner.label = partner_is_a ? ds.partner_a : ds.partner_b;

    t.columns.push_back(std::move(ambiguous));
    t.columns.push_back(std::move(partner));

    std::size_t fillers = 1 + rng.below(2);
    for (std::size_t f = 0; f < fillers; ++f) {
      Column filler;
      filler.values = detail::sample_cells(rng, code_pool, cells);
      filler.label = "code";
      t.columns.push_back(std::move(filler));
    }
    rng.shuffle(t.columns);
    ds.tables.push_back(std::move(t));
  }
  return ds;
}

// ---- full experiment ----

struct NamedGnnConfig {
  std::string name;
  GnnConfig config;
};

struct ExperimentConfig {
  int folds = 5;
  std::uint64_t seed = 42;
  BaselineConfig baseline;
  // When set, training-table logits come from an internal 5-fold split of
  // the training tables (each part predicted by a base model fit on the
  // rest) instead of from the base model fit on all of them. Validation and
  // test logits always come from the final base model.
  bool out_of_fold_logits = false;
};

struct ConfigResult {
  std::string name;
  std::vector<double> fold_weighted;
  std::vector<double> fold_macro;
  std::vector<std::vector<double>> fold_per_class;
  double weighted_mean = 0.0;
  double weighted_std = 0.0;
  double macro_mean = 0.0;
  double macro_std = 0.0;
  std::vector<double> per_class_mean;
  std::map<std::string, double> bin_macro_mean;
  // n -> (macro mean, weighted mean) over the folds where n occurred
  std::map<int, std::pair<double, double>> by_column_count;
};

struct EvalReport {
  int folds = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> class_names;
  std::vector<FrequencyBin> class_bins;  // on the full dataset's gold columns
  std::vector<ConfigResult> results;     // results[0] is the base predictor
};

namespace detail {

inline std::pair<double, double> mean_std(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size());  // population standard deviation
  return {mean, std::sqrt(var)};
}

// Macro F1 over the classes of one frequency bin that actually appear in
// this fold's golds or predictions.
inline double bin_macro(const FScoreReport& scores, const std::vector<FrequencyBin>& bins,
                        FrequencyBin which) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t c = 0; c < scores.per_class.size(); ++c) {
    if (bins[c] != which) continue;
    if (scores.support[c] == 0 && scores.predicted[c] == 0) continue;
    sum += scores.per_class[c];
    count += 1;
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

struct FoldOutcome {
  FScoreReport scores;
  std::vector<EvalExample> examples;
};

inline void fold_assert_disjoint(const FoldSplit& split) {
  std::set<std::string> train(split.train_ids.begin(), split.train_ids.end());
  std::set<std::string> val(split.val_ids.begin(), split.val_ids.end());
  for (const std::string& id : split.test_ids) {
    if (train.count(id) || val.count(id)) {
      throw InternalError("cross-validation split leaked test table '" + id + "'");
    }
  }
  for (const std::string& id : split.val_ids) {
    if (train.count(id)) {
      throw InternalError("cross-validation split leaked validation table '" + id + "'");
    }
  }
}

}  // namespace detail

// Per fold: fit the base predictor on the train tables, produce logits for
// every split, train each stacked configuration on train/validation, then
// score both the base-only and the stacked predictions on the test tables.
inline EvalReport run_experiment(std::span<const Table> tables, const LabelVocab& vocab,
                                 std::span<const NamedGnnConfig> configs,
                                 const TrainConfig& train_config,
                                 const ExperimentConfig& experiment) {
  EvalReport report;
  report.folds = experiment.folds;
  report.seed = experiment.seed;
  report.class_names = vocab.names();

  // frequency bins on the whole dataset's gold columns
  std::vector<std::size_t> counts(static_cast<std::size_t>(vocab.size()), 0);
  for (const Table& t : tables) {
    for (const Column& c : t.columns) {
      if (c.label) counts[static_cast<std::size_t>(vocab.index_of(*c.label))] += 1;
    }
  }
  report.class_bins = frequency_bins(counts);

  std::map<std::string, const Table*> by_id;
  for (const Table& t : tables) by_id[t.table_id] = &t;
  auto resolve = [&](const std::vector<std::string>& ids) {
    std::vector<Table> out;
    out.reserve(ids.size());
    for (const std::string& id : ids) out.push_back(*by_id.at(id));
    return out;
  };

  std::vector<FoldSplit> splits = kfold_split(tables, experiment.folds, experiment.seed);

  std::size_t num_results = configs.size() + 1;
  std::vector<std::vector<detail::FoldOutcome>> outcomes(num_results);

  for (const FoldSplit& split : splits) {
    detail::fold_assert_disjoint(split);
    std::vector<Table> train = resolve(split.train_ids);
    std::vector<Table> val = resolve(split.val_ids);
    std::vector<Table> test = resolve(split.test_ids);

    LinearModel base = baseline_fit_tables(train, vocab, experiment.baseline);
    LogitsMap logits;
    if (experiment.out_of_fold_logits && train.size() >= 2) {
      int inner = static_cast<int>(std::min<std::size_t>(5, train.size()));
      std::vector<FoldSplit> inner_splits =
          kfold_split(train, inner, mix64(experiment.seed ^ fnv1a64("oof")));
      for (const FoldSplit& is : inner_splits) {
        std::vector<Table> inner_train;
        for (const Table& t : train) {
          bool held_out = std::find(is.test_ids.begin(), is.test_ids.end(), t.table_id) !=
                          is.test_ids.end();
          if (!held_out) inner_train.push_back(t);
        }
        LinearModel inner_model =
            baseline_fit_tables(inner_train, vocab, experiment.baseline);
        LogitsMap part = logits_for_tables(inner_model, resolve(is.test_ids));
        logits.insert(part.begin(), part.end());
      }
    } else {
      LogitsMap part = logits_for_tables(base, train);
      logits.insert(part.begin(), part.end());
    }
    LogitsMap val_logits = logits_for_tables(base, val);
    LogitsMap test_logits = logits_for_tables(base, test);
    logits.insert(val_logits.begin(), val_logits.end());
    logits.insert(test_logits.begin(), test_logits.end());

    // base-only predictions on the test split
    {
      detail::FoldOutcome outcome;
      std::vector<int> preds, golds;
      for (const Table& t : test) {
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
          int pred = static_cast<int>(
              argmax(Tensor::vector(logits.at({t.table_id, static_cast<int>(i)}))));
          int gold = vocab.index_of(*t.columns[i].label);
          preds.push_back(pred);
          golds.push_back(gold);
          outcome.examples.push_back(
              {static_cast<int>(t.columns.size()), gold, pred});
        }
      }
      outcome.scores = f_scores(preds, golds, vocab.size());
      outcomes[0].push_back(std::move(outcome));
    }

    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
      FitResult fitted = fit(train, val, logits, vocab, train_config, configs[ci].config);
      detail::FoldOutcome outcome;
      std::vector<int> preds, golds;
      for (const Table& t : test) {
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
          rows.push_back(logits.at({t.table_id, static_cast<int>(i)}));
        }
        ColumnGraph g = build_graph(t, rows, vocab);
        auto table_preds = predict(g, fitted.params, fitted.config, vocab);
        for (std::size_t i = 0; i < table_preds.size(); ++i) {
          int gold = vocab.index_of(*t.columns[i].label);
          preds.push_back(table_preds[i].class_index);
          golds.push_back(gold);
          outcome.examples.push_back(
              {static_cast<int>(t.columns.size()), gold, table_preds[i].class_index});
        }
      }
      outcome.scores = f_scores(preds, golds, vocab.size());
      outcomes[ci + 1].push_back(std::move(outcome));
    }
  }

  for (std::size_t ri = 0; ri < num_results; ++ri) {
    ConfigResult result;
    result.name = ri == 0 ? "base" : configs[ri - 1].name;
    std::map<std::string, std::vector<double>> bin_values;
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> count_values;
    std::vector<double> per_class_sum(static_cast<std::size_t>(vocab.size()), 0.0);
    for (const detail::FoldOutcome& fold : outcomes[ri]) {
      result.fold_weighted.push_back(fold.scores.weighted);
      result.fold_macro.push_back(fold.scores.macro);
      result.fold_per_class.push_back(fold.scores.per_class);
      for (std::size_t c = 0; c < per_class_sum.size(); ++c) {
        per_class_sum[c] += fold.scores.per_class[c];
      }
      for (FrequencyBin b : {FrequencyBin::High, FrequencyBin::Medium, FrequencyBin::Low}) {
        bin_values[bin_name(b)].push_back(detail::bin_macro(fold.scores, report.class_bins, b));
      }
      for (const auto& [n, scores] : breakdown_by_column_count(fold.examples, vocab.size())) {
        count_values[n].first.push_back(scores.macro);
        count_values[n].second.push_back(scores.weighted);
      }
    }
    auto [wm, ws] = detail::mean_std(result.fold_weighted);
    auto [mm, ms] = detail::mean_std(result.fold_macro);
    result.weighted_mean = wm;
    result.weighted_std = ws;
    result.macro_mean = mm;
    result.macro_std = ms;
    for (double s : per_class_sum) {
      result.per_class_mean.push_back(s / static_cast<double>(outcomes[ri].size()));
    }
    for (auto& [name, values] : bin_values) {
      result.bin_macro_mean[name] = detail::mean_std(values).first;
    }
    for (auto& [n, values] : count_values) {
      result.by_column_count[n] = {detail::mean_std(values.first).first,
                                   detail::mean_std(values.second).first};
    }
    report.results.push_back(std::move(result));
  }
  return report;
}

// ---- report export ----

inline nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["folds"] = report.folds;
  j["seed"] = report.seed;
  j["classes"] = report.class_names;
  nlohmann::ordered_json bins;
  for (std::size_t c = 0; c < report.class_bins.size(); ++c) {
    bins[report.class_names[c]] = bin_name(report.class_bins[c]);
  }
  j["frequency_bins"] = std::move(bins);
  j["results"] = nlohmann::ordered_json::array();
  for (const ConfigResult& r : report.results) {
    nlohmann::ordered_json rj;
    rj["config"] = r.name;
    rj["weighted_mean"] = r.weighted_mean;
    rj["weighted_std"] = r.weighted_std;
    rj["macro_mean"] = r.macro_mean;
    rj["macro_std"] = r.macro_std;
    rj["fold_weighted"] = r.fold_weighted;
    rj["fold_macro"] = r.fold_macro;
    nlohmann::ordered_json pc;
    for (std::size_t c = 0; c < r.per_class_mean.size(); ++c) {
      pc[report.class_names[c]] = r.per_class_mean[c];
    }
    rj["per_class_f1_mean"] = std::move(pc);
    rj["bin_macro_mean"] = r.bin_macro_mean;
    nlohmann::ordered_json bc;
    for (const auto& [n, scores] : r.by_column_count) {
      bc[std::to_string(n)] = {{"macro", scores.first}, {"weighted", scores.second}};
    }
    rj["by_column_count"] = std::move(bc);
    j["results"].push_back(std::move(rj));
  }
  return j;
}

inline void write_report_json(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write report file " + path.string());
  out << report_to_json(report).dump(2) << "\n";
}

// CSV summary: config,fold,weighted_f1,macro_f1
inline void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write report file " + path.string());
  out << "config,fold,weighted_f1,macro_f1\n";
  char line[256];
  for (const ConfigResult& r : report.results) {
    for (std::size_t f = 0; f < r.fold_weighted.size(); ++f) {
      std::snprintf(line, sizeof(line), "%s,%zu,%.17g,%.17g\n", r.name.c_str(), f,
                    r.fold_weighted[f], r.fold_macro[f]);
      out << line;
    }
  }
}

}  // namespace colgnn
