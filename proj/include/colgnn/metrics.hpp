#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "colgnn/errors.hpp"

namespace colgnn {

struct FScoreReport {
  double weighted = 0.0;
  double macro = 0.0;
  std::vector<double> per_class;      // F1 for every vocabulary class index
  std::vector<std::size_t> support;   // gold count per class
  std::vector<std::size_t> predicted; // prediction count per class
};

// Per-class F1 = 2PR/(P+R), defined as 0 when P+R = 0. The macro average
// runs over the classes present in the union of golds and predictions; the
// weighted average is weighted by gold support, so classes absent from the
// golds contribute nothing to it.
inline FScoreReport f_scores(std::span<const int> predictions, std::span<const int> golds,
                             int num_classes) {
  if (predictions.size() != golds.size()) {
    throw InvalidInputError("f_scores: prediction and gold counts differ");
  }
  auto k = static_cast<std::size_t>(num_classes);
  std::vector<std::size_t> tp(k, 0), fp(k, 0), fn(k, 0);
  for (std::size_t i = 0; i < golds.size(); ++i) {
    auto g = static_cast<std::size_t>(golds[i]);
    auto p = static_cast<std::size_t>(predictions[i]);
    if (g >= k || p >= k) throw InvalidInputError("f_scores: class index out of range");
    if (g == p) {
      tp[g] += 1;
    } else {
      fp[p] += 1;
      fn[g] += 1;
    }
  }

  FScoreReport report;
  report.per_class.resize(k, 0.0);
  report.support.resize(k, 0);
  report.predicted.resize(k, 0);
  double weighted_sum = 0.0;
  std::size_t total_support = 0;
  double macro_sum = 0.0;
  std::size_t macro_classes = 0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t gold_support = tp[c] + fn[c];
    std::size_t predicted = tp[c] + fp[c];
    report.support[c] = gold_support;
    report.predicted[c] = predicted;
    double precision = predicted > 0 ? static_cast<double>(tp[c]) / predicted : 0.0;
    double recall = gold_support > 0 ? static_cast<double>(tp[c]) / gold_support : 0.0;
    double f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
    report.per_class[c] = f1;
    if (gold_support > 0) {
      weighted_sum += static_cast<double>(gold_support) * f1;
      total_support += gold_support;
    }
    if (gold_support > 0 || predicted > 0) {
      macro_sum += f1;
      macro_classes += 1;
    }
  }
  report.weighted = total_support > 0 ? weighted_sum / static_cast<double>(total_support) : 0.0;
  report.macro = macro_classes > 0 ? macro_sum / static_cast<double>(macro_classes) : 0.0;
  return report;
}

}  // namespace colgnn
