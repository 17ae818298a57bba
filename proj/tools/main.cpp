// Command-line front end: synthesize datasets, train and grid-search stacked
// column-type models, predict, and run cross-validated experiments.
//
// Exit codes: 0 success, 2 usage or input-format problems, 3 failed joins
// between datasets and logits, 4 internal invariant violations.

#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "colgnn/errors.hpp"
#include "colgnn/evaluation.hpp"
#include "colgnn/gnn.hpp"
#include "colgnn/graph.hpp"
#include "colgnn/predictor.hpp"
#include "colgnn/table.hpp"
#include "colgnn/training.hpp"

namespace fs = std::filesystem;
using namespace colgnn;

namespace {

std::string utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Every command writes a manifest next to its primary output so a run can be
// reproduced from the recorded flags; the timestamp is the only
// non-deterministic field.
void write_manifest(const fs::path& primary_output, const std::string& command,
                    std::uint64_t seed, const nlohmann::ordered_json& inputs,
                    const nlohmann::ordered_json& outputs,
                    const nlohmann::ordered_json& config) {
  nlohmann::ordered_json j;
  j["format_version"] = 1;
  j["command"] = command;
  j["seed"] = seed;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["config"] = config;
  j["created_utc"] = utc_now();
  fs::path path = primary_output;
  path += ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write manifest " + path.string());
  out << j.dump(2) << "\n";
}

GnnFamily family_or_throw(const std::string& name) {
  auto family = parse_family(name);
  if (!family) throw InvalidInputError("unknown family '" + name + "'");
  return *family;
}

struct SplitTables {
  std::vector<Table> train;
  std::vector<Table> val;
};

// Seeded table-level split; the train share is floor((1 - fraction) * n),
// but never zero.
SplitTables split_train_val(const std::vector<Table>& tables, double val_fraction,
                            std::uint64_t seed) {
  std::vector<std::size_t> order(tables.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng = Rng(seed).stream("split");
  rng.shuffle(order);
  auto n_train = static_cast<std::size_t>(
      (1.0 - val_fraction) * static_cast<double>(tables.size()));
  n_train = std::max<std::size_t>(1, std::min(n_train, tables.size()));
  SplitTables split;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? split.train : split.val).push_back(tables[order[i]]);
  }
  return split;
}

struct LogitsSource {
  LogitsMap map;
  std::optional<LinearModel> trained_base;  // set when the built-in baseline ran
};

// Without a logits file the built-in baseline predictor supplies the node
// logits: fit on the training tables, applied everywhere (optionally with
// out-of-fold training logits).
LogitsSource resolve_logits(const std::optional<std::string>& logits_path,
                            const std::vector<Table>& train, const std::vector<Table>& val,
                            const LabelVocab& vocab, std::uint64_t seed, bool out_of_fold) {
  LogitsSource source;
  if (logits_path) {
    source.map = load_logits(*logits_path, vocab);
    return source;
  }
  BaselineConfig config;
  config.seed = seed;
  LinearModel base = baseline_fit_tables(train, vocab, config);
  if (out_of_fold && train.size() >= 2) {
    int inner = static_cast<int>(std::min<std::size_t>(5, train.size()));
    for (const FoldSplit& fold : kfold_split(train, inner, mix64(seed ^ fnv1a64("oof")))) {
      std::vector<Table> inner_train;
      for (const Table& t : train) {
        bool held_out = std::find(fold.test_ids.begin(), fold.test_ids.end(), t.table_id) !=
                        fold.test_ids.end();
        if (!held_out) inner_train.push_back(t);
      }
      std::vector<Table> held;
      for (const Table& t : train) {
        if (std::find(fold.test_ids.begin(), fold.test_ids.end(), t.table_id) !=
            fold.test_ids.end()) {
          held.push_back(t);
        }
      }
      BaselineConfig inner_config = config;
      LinearModel inner_model = baseline_fit_tables(inner_train, vocab, inner_config);
      LogitsMap part = logits_for_tables(inner_model, held);
      source.map.insert(part.begin(), part.end());
    }
  } else {
    LogitsMap part = logits_for_tables(base, train);
    source.map.insert(part.begin(), part.end());
  }
  LogitsMap val_part = logits_for_tables(base, val);
  source.map.insert(val_part.begin(), val_part.end());
  source.trained_base = std::move(base);
  return source;
}

void embed_base(GnnModel& model, const LinearModel& base) {
  model.extra_params.emplace_back("base.W", base.weights);
  model.extra_params.emplace_back("base.b", base.bias);
}

std::optional<LinearModel> extract_base(const GnnModel& model) {
  const Tensor* w = nullptr;
  const Tensor* b = nullptr;
  for (const auto& [name, tensor] : model.extra_params) {
    if (name == "base.W") w = &tensor;
    if (name == "base.b") b = &tensor;
  }
  if (!w || !b) return std::nullopt;
  return LinearModel{*w, *b};
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
  std::vector<int> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw InvalidInputError(std::string("cannot parse ") + what + " entry '" + item + "'");
    }
  }
  if (out.empty()) throw InvalidInputError(std::string(what) + " is empty");
  return out;
}

// Configuration tokens for `evaluate --configs`: family[:s=N][:h=N][:hidden=N],
// e.g. "gat", "gat:s=2:h=4", "gcn:s=3".
std::vector<NamedGnnConfig> parse_configs(const std::string& text) {
  std::vector<NamedGnnConfig> configs;
  std::string token;
  std::stringstream ss(text);
  while (std::getline(ss, token, ',')) {
    std::vector<std::string> parts;
    std::string part;
    std::stringstream ts(token);
    while (std::getline(ts, part, ':')) parts.push_back(part);
    if (parts.empty()) throw InvalidInputError("empty config token");
    GnnConfig config;
    config.family = family_or_throw(parts[0]);
    config.steps = default_steps(config.family);
    for (std::size_t i = 1; i < parts.size(); ++i) {
      auto eq = parts[i].find('=');
      if (eq == std::string::npos) {
        throw InvalidInputError("config option '" + parts[i] + "' is not key=value");
      }
      std::string key = parts[i].substr(0, eq);
      int value = 0;
      try {
        value = std::stoi(parts[i].substr(eq + 1));
      } catch (const std::exception&) {
        throw InvalidInputError("cannot parse config option '" + parts[i] + "'");
      }
      if (key == "s" || key == "steps") {
        config.steps = value;
      } else if (key == "h" || key == "heads") {
        config.heads = value;
      } else if (key == "hidden") {
        config.hidden_dim = value;
      } else {
        throw InvalidInputError("unknown config option '" + key + "'");
      }
    }
    configs.push_back({config.name(), config});
  }
  if (configs.empty()) throw InvalidInputError("no configurations given");
  return configs;
}

// ---- subcommand payloads ----

struct SynthArgs {
  int tables = 200;
  std::uint64_t seed = 42;
  std::string out;
};

int cmd_synth(const SynthArgs& args) {
  SyntheticDataset ds = synthesize_dependency_dataset(args.tables, args.seed);
  write_tables_jsonl(args.out, ds.tables);
  write_manifest(args.out, "synth", args.seed, {}, {{"data", args.out}},
                 {{"tables", args.tables},
                  {"classes", ds.vocab.names()},
                  {"ambiguous_pair", {ds.ambiguous_a, ds.ambiguous_b}}});
  std::cout << "wrote " << args.tables << " tables to " << args.out << "\n";
  return 0;
}

struct TrainArgs {
  std::string data;
  std::optional<std::string> logits;
  std::string family = "gat";
  int steps = 0;  // 0 = family preset
  int heads = 8;
  int hidden_dim = 0;
  int epochs = 0;  // 0 = family preset
  int batch_size = 32;
  double learning_rate = 1e-3;
  double weight_decay = 5e-4;
  std::uint64_t seed = 42;
  double val_fraction = 0.2;
  bool oof_logits = false;
  std::string out_model;
  std::string out_history;
};

int cmd_train(const TrainArgs& args) {
  std::vector<Table> tables = read_tables_jsonl(args.data);
  LabelVocab vocab = LabelVocab::from_tables(tables);
  if (vocab.size() < 2) {
    throw InvalidInputError("training requires at least two labeled classes");
  }
  SplitTables split = split_train_val(tables, args.val_fraction, args.seed);
  LogitsSource logits =
      resolve_logits(args.logits, split.train, split.val, vocab, args.seed, args.oof_logits);

  GnnConfig gnn_config;
  gnn_config.family = family_or_throw(args.family);
  gnn_config.steps = args.steps > 0 ? args.steps : default_steps(gnn_config.family);
  gnn_config.heads = args.heads;
  gnn_config.hidden_dim = args.hidden_dim;

  TrainConfig train_config;
  train_config.learning_rate = args.learning_rate;
  train_config.weight_decay = args.weight_decay;
  train_config.epochs = args.epochs;
  train_config.batch_size = args.batch_size;
  train_config.seed = args.seed;

  FitResult result =
      fit(split.train, split.val, logits.map, vocab, train_config, gnn_config);

  GnnModel model{result.config, result.params, vocab, {}};
  if (logits.trained_base) embed_base(model, *logits.trained_base);
  save_model(args.out_model, model);

  std::string history_path =
      args.out_history.empty() ? args.out_model + ".history.csv" : args.out_history;
  write_history_csv(history_path, result.history);

  write_manifest(args.out_model, "train", args.seed,
                 {{"data", args.data}, {"logits", args.logits ? *args.logits : ""}},
                 {{"model", args.out_model}, {"history", history_path}},
                 {{"family", family_name(result.config.family)},
                  {"steps", result.config.steps},
                  {"heads", result.config.heads},
                  {"hidden_dim", resolved_hidden(result.config)},
                  {"epochs", resolved_epochs(train_config, result.config.family)},
                  {"batch_size", train_config.batch_size},
                  {"learning_rate", train_config.learning_rate},
                  {"weight_decay", train_config.weight_decay},
                  {"val_fraction", args.val_fraction},
                  {"oof_logits", args.oof_logits},
                  {"best_epoch", result.best_epoch},
                  {"best_val_macro_f1", result.best_val_macro_f1}});
  std::cout << "trained " << result.config.name() << ": best epoch " << result.best_epoch
            << ", validation macro F1 " << result.best_val_macro_f1 << "\n";
  return 0;
}

struct GridArgs {
  TrainArgs base;
  std::string grid_steps = "1,2,3,4";
  std::string grid_heads = "1,2,4,8,12";
  std::string out_cells;
};

int cmd_grid(const GridArgs& args) {
  std::vector<Table> tables = read_tables_jsonl(args.base.data);
  LabelVocab vocab = LabelVocab::from_tables(tables);
  if (vocab.size() < 2) {
    throw InvalidInputError("training requires at least two labeled classes");
  }
  SplitTables split = split_train_val(tables, args.base.val_fraction, args.base.seed);
  LogitsSource logits = resolve_logits(args.base.logits, split.train, split.val, vocab,
                                       args.base.seed, args.base.oof_logits);

  GnnFamily family = family_or_throw(args.base.family);
  TrainConfig train_config;
  train_config.learning_rate = args.base.learning_rate;
  train_config.weight_decay = args.base.weight_decay;
  train_config.epochs = args.base.epochs;
  train_config.batch_size = args.base.batch_size;
  train_config.seed = args.base.seed;

  std::vector<int> steps = parse_int_list(args.grid_steps, "--grid-steps");
  std::vector<int> heads = parse_int_list(args.grid_heads, "--grid-heads");
  GridResult result =
      grid_search(split.train, split.val, logits.map, vocab, train_config, family, steps, heads);

  GnnModel model{result.best_fit.config, result.best_fit.params, vocab, {}};
  if (logits.trained_base) embed_base(model, *logits.trained_base);
  save_model(args.base.out_model, model);

  std::string cells_path =
      args.out_cells.empty() ? args.base.out_model + ".cells.csv" : args.out_cells;
  {
    std::ofstream out(cells_path, std::ios::binary);
    if (!out) throw FormatError("cannot write grid file " + cells_path);
    out << "family,steps,heads,val_macro_f1,best_epoch\n";
    char line[160];
    for (const GridCell& cell : result.cells) {
      std::snprintf(line, sizeof(line), "%s,%d,%d,%.17g,%d\n",
                    family_name(cell.config.family).c_str(), cell.config.steps,
                    cell.config.heads, cell.val_macro_f1, cell.best_epoch);
      out << line;
    }
  }
  std::string history_path = args.base.out_model + ".history.csv";
  write_history_csv(history_path, result.best_fit.history);

  write_manifest(args.base.out_model, "grid", args.base.seed,
                 {{"data", args.base.data},
                  {"logits", args.base.logits ? *args.base.logits : ""}},
                 {{"model", args.base.out_model},
                  {"cells", cells_path},
                  {"history", history_path}},
                 {{"family", family_name(family)},
                  {"grid_steps", args.grid_steps},
                  {"grid_heads", args.grid_heads},
                  {"epochs", resolved_epochs(train_config, family)},
                  {"batch_size", train_config.batch_size},
                  {"learning_rate", train_config.learning_rate},
                  {"weight_decay", train_config.weight_decay},
                  {"best", result.best_config.name()},
                  {"best_val_macro_f1", result.best_fit.best_val_macro_f1}});
  std::cout << "grid of " << result.cells.size() << " cells; best "
            << result.best_config.name() << " with validation macro F1 "
            << result.best_fit.best_val_macro_f1 << "\n";
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string data;
  std::optional<std::string> logits;
  std::string out;
  std::uint64_t seed = 42;
};

int cmd_predict(const PredictArgs& args) {
  GnnModel model = load_model(args.model);
  std::vector<Table> tables = read_tables_jsonl(args.data);

  LogitsMap logits;
  if (args.logits) {
    logits = load_logits(*args.logits, model.vocab);
  } else {
    std::optional<LinearModel> base = extract_base(model);
    if (!base) {
      throw JoinError(
          "model has no embedded base predictor; supply --logits with one record per column");
    }
    logits = logits_for_tables(*base, tables);
  }

  std::ofstream out(args.out, std::ios::binary);
  if (!out) throw FormatError("cannot write predictions file " + args.out);
  std::size_t rows = 0;
  for (const Table& t : tables) {
    std::vector<std::vector<double>> node_logits;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      auto it = logits.find({t.table_id, static_cast<int>(i)});
      if (it == logits.end()) {
        throw JoinError(t.table_id, static_cast<int>(i), "no logits record");
      }
      node_logits.push_back(it->second);
    }
    ColumnGraph graph = build_graph(t, node_logits, model.vocab);
    for (const ColumnPrediction& p :
         predict(graph, model.params, model.config, model.vocab)) {
      nlohmann::json j;
      j["table_id"] = p.table_id;
      j["column_index"] = p.column_index;
      j["label"] = p.label;
      j["probabilities"] = p.probabilities;
      out << j.dump() << "\n";
      ++rows;
    }
  }
  out.close();
  write_manifest(args.out, "predict", args.seed,
                 {{"model", args.model},
                  {"data", args.data},
                  {"logits", args.logits ? *args.logits : ""}},
                 {{"predictions", args.out}}, {{"rows", rows}});
  std::cout << "wrote " << rows << " predictions to " << args.out << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string data;
  int folds = 5;
  std::string configs = "gat";
  std::uint64_t seed = 42;
  int epochs = 0;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double weight_decay = 5e-4;
  bool oof_logits = false;
  std::string report;
};

int cmd_evaluate(const EvaluateArgs& args) {
  std::vector<Table> tables = read_tables_jsonl(args.data);
  for (const Table& t : tables) {
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      if (!t.columns[i].label) {
        throw InvalidInputError("evaluation requires labels; table '" + t.table_id +
                                "' column " + std::to_string(i) + " has none");
      }
    }
  }
  LabelVocab vocab = LabelVocab::from_tables(tables);
  std::vector<NamedGnnConfig> configs = parse_configs(args.configs);

  TrainConfig train_config;
  train_config.learning_rate = args.learning_rate;
  train_config.weight_decay = args.weight_decay;
  train_config.epochs = args.epochs;
  train_config.batch_size = args.batch_size;
  train_config.seed = args.seed;

  ExperimentConfig experiment;
  experiment.folds = args.folds;
  experiment.seed = args.seed;
  experiment.baseline.seed = args.seed;
  experiment.out_of_fold_logits = args.oof_logits;

  EvalReport report = run_experiment(tables, vocab, configs, train_config, experiment);
  write_report_json(args.report, report);
  fs::path csv_path = fs::path(args.report).replace_extension(".csv");
  write_report_csv(csv_path, report);

  nlohmann::ordered_json config_json;
  config_json["folds"] = args.folds;
  config_json["configs"] = args.configs;
  config_json["epochs"] = args.epochs;
  config_json["batch_size"] = args.batch_size;
  config_json["learning_rate"] = args.learning_rate;
  config_json["weight_decay"] = args.weight_decay;
  config_json["oof_logits"] = args.oof_logits;
  write_manifest(args.report, "evaluate", args.seed, {{"data", args.data}},
                 {{"report", args.report}, {"report_csv", csv_path.string()}}, config_json);

  for (const ConfigResult& r : report.results) {
    std::cout << r.name << ": weighted " << r.weighted_mean << " +/- " << r.weighted_std
              << ", macro " << r.macro_mean << " +/- " << r.macro_std << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-stacked semantic column type annotation"};
  app.require_subcommand(1);

  SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "write a planted-dependency synthetic dataset");
  synth_cmd->add_option("--tables", synth.tables, "number of tables")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--seed", synth.seed, "random seed");
  synth_cmd->add_option("--out", synth.out, "output dataset JSONL")->required();

  TrainArgs train;
  std::string train_logits;
  CLI::App* train_cmd = app.add_subcommand("train", "train one stacked model");
  train_cmd->add_option("--data", train.data, "labeled dataset JSONL")->required();
  train_cmd->add_option("--logits", train_logits, "per-column logits JSONL (optional)");
  train_cmd->add_option("--family", train.family, "gcn, ggnn or gat")
      ->check(CLI::IsMember({"gcn", "ggnn", "gat"}));
  train_cmd->add_option("--steps", train.steps, "update steps (0 = family preset)");
  train_cmd->add_option("--heads", train.heads, "attention heads (gat)");
  train_cmd->add_option("--hidden-dim", train.hidden_dim,
                        "interior state width (0 = class count)");
  train_cmd->add_option("--epochs", train.epochs, "training epochs (0 = family preset)");
  train_cmd->add_option("--batch-size", train.batch_size, "graphs per mini-batch");
  train_cmd->add_option("--lr", train.learning_rate, "learning rate");
  train_cmd->add_option("--weight-decay", train.weight_decay, "L2 weight decay");
  train_cmd->add_option("--seed", train.seed, "random seed");
  train_cmd->add_option("--val-fraction", train.val_fraction,
                        "table share held out for validation");
  train_cmd->add_flag("--oof-logits", train.oof_logits,
                      "train-table logits from an internal 5-fold split");
  train_cmd->add_option("--out-model", train.out_model, "output model JSON")->required();
  train_cmd->add_option("--out-history", train.out_history,
                        "history CSV (default <model>.history.csv)");

  GridArgs grid;
  std::string grid_logits;
  CLI::App* grid_cmd = app.add_subcommand("grid", "grid-search steps and heads");
  grid_cmd->add_option("--data", grid.base.data, "labeled dataset JSONL")->required();
  grid_cmd->add_option("--logits", grid_logits, "per-column logits JSONL (optional)");
  grid_cmd->add_option("--family", grid.base.family, "gcn, ggnn or gat")
      ->check(CLI::IsMember({"gcn", "ggnn", "gat"}));
  grid_cmd->add_option("--grid-steps", grid.grid_steps, "comma list of step counts");
  grid_cmd->add_option("--grid-heads", grid.grid_heads, "comma list of head counts (gat)");
  grid_cmd->add_option("--epochs", grid.base.epochs, "training epochs (0 = family preset)");
  grid_cmd->add_option("--batch-size", grid.base.batch_size, "graphs per mini-batch");
  grid_cmd->add_option("--lr", grid.base.learning_rate, "learning rate");
  grid_cmd->add_option("--weight-decay", grid.base.weight_decay, "L2 weight decay");
  grid_cmd->add_option("--seed", grid.base.seed, "random seed");
  grid_cmd->add_option("--val-fraction", grid.base.val_fraction,
                       "table share held out for validation");
  grid_cmd->add_flag("--oof-logits", grid.base.oof_logits,
                     "train-table logits from an internal 5-fold split");
  grid_cmd->add_option("--out-model", grid.base.out_model, "output model JSON")->required();
  grid_cmd->add_option("--out-cells", grid.out_cells,
                       "per-cell scores CSV (default <model>.cells.csv)");

  PredictArgs predict_args;
  std::string predict_logits;
  CLI::App* predict_cmd = app.add_subcommand("predict", "label the columns of a dataset");
  predict_cmd->add_option("--model", predict_args.model, "model JSON")->required();
  predict_cmd->add_option("--data", predict_args.data, "dataset JSONL")->required();
  predict_cmd->add_option("--logits", predict_logits, "per-column logits JSONL (optional)");
  predict_cmd->add_option("--out", predict_args.out, "output predictions JSONL")->required();

  EvaluateArgs evaluate;
  CLI::App* evaluate_cmd =
      app.add_subcommand("evaluate", "cross-validated experiment with a base-only row");
  evaluate_cmd->add_option("--data", evaluate.data, "labeled dataset JSONL")->required();
  evaluate_cmd->add_option("--folds", evaluate.folds, "cross-validation folds")
      ->check(CLI::Range(2, 100));
  evaluate_cmd->add_option("--configs", evaluate.configs,
                           "comma list like gat,gcn:s=3,gat:s=2:h=4");
  evaluate_cmd->add_option("--seed", evaluate.seed, "random seed");
  evaluate_cmd->add_option("--epochs", evaluate.epochs, "training epochs (0 = family preset)");
  evaluate_cmd->add_option("--batch-size", evaluate.batch_size, "graphs per mini-batch");
  evaluate_cmd->add_option("--lr", evaluate.learning_rate, "learning rate");
  evaluate_cmd->add_option("--weight-decay", evaluate.weight_decay, "L2 weight decay");
  evaluate_cmd->add_flag("--oof-logits", evaluate.oof_logits,
                         "train-table logits from internal 5-fold splits");
  evaluate_cmd->add_option("--report", evaluate.report, "output report JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth_cmd->parsed()) return cmd_synth(synth);
    if (train_cmd->parsed()) {
      if (!train_logits.empty()) train.logits = train_logits;
      return cmd_train(train);
    }
    if (grid_cmd->parsed()) {
      if (!grid_logits.empty()) grid.base.logits = grid_logits;
      return cmd_grid(grid);
    }
    if (predict_cmd->parsed()) {
      if (!predict_logits.empty()) predict_args.logits = predict_logits;
      return cmd_predict(predict_args);
    }
    if (evaluate_cmd->parsed()) return cmd_evaluate(evaluate);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const JoinError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
