#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "colgnn/errors.hpp"

namespace colgnn {

struct Column {
  std::vector<std::string> values;
  std::optional<std::string> label;
};

// One relational table: an ordered list of columns, each a list of cell
// strings. Column order is significant; it is the join key against
// per-column logits records.
struct Table {
  std::string table_id;
  std::vector<Column> columns;

  std::size_t num_columns() const { return columns.size(); }
};

// Bijection between semantic-type names and indices 0..k-1.
class LabelVocab {
 public:
  LabelVocab() = default;

  static LabelVocab from_names(std::vector<std::string> names) {
    LabelVocab v;
    for (auto& n : names) {
      if (v.index_.count(n)) throw InvalidInputError("duplicate label name '" + n + "'");
      v.index_.emplace(n, static_cast<int>(v.names_.size()));
      v.names_.push_back(std::move(n));
    }
    return v;
  }

  // Sorted unique gold labels of the given tables.
  static LabelVocab from_tables(std::span<const Table> tables) {
    std::set<std::string> seen;
    for (const Table& t : tables) {
      for (const Column& c : t.columns) {
        if (c.label) seen.insert(*c.label);
      }
    }
    return from_names({seen.begin(), seen.end()});
  }

  int size() const { return static_cast<int>(names_.size()); }

  const std::string& name(int index) const { return names_.at(static_cast<std::size_t>(index)); }

  const std::vector<std::string>& names() const { return names_; }

  std::optional<int> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int index_of(const std::string& name) const {
    auto found = find(name);
    if (!found) throw InvalidInputError("label '" + name + "' is not in the vocabulary");
    return *found;
  }

 private:
  std::vector<std::string> names_;
  std::map<std::string, int> index_;
};

// Dataset files are JSON Lines, one table per line:
//   {"table_id": str, "columns": [{"values": [str,...], "label": str|null}, ...]}
// UTF-8, no BOM; the array order of "columns" is authoritative.
inline std::vector<Table> read_tables_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset file " + path.string());
  std::vector<Table> tables;
  std::set<std::string> ids;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw FormatError("invalid JSON", line_no);
    try {
      Table t;
      t.table_id = j.at("table_id").get<std::string>();
      for (const auto& cj : j.at("columns")) {
        Column c;
        for (const auto& vj : cj.at("values")) c.values.push_back(vj.get<std::string>());
        if (cj.contains("label") && !cj["label"].is_null()) {
          c.label = cj["label"].get<std::string>();
        }
        t.columns.push_back(std::move(c));
      }
      if (t.columns.empty()) throw FormatError("table has no columns", line_no);
      if (!ids.insert(t.table_id).second) {
        throw FormatError("duplicate table_id '" + t.table_id + "'", line_no);
      }
      tables.push_back(std::move(t));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed table record: ") + e.what(), line_no);
    }
  }
  return tables;
}

inline void write_tables_jsonl(const std::filesystem::path& path, std::span<const Table> tables) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write dataset file " + path.string());
  for (const Table& t : tables) {
    nlohmann::json j;
    j["table_id"] = t.table_id;
    j["columns"] = nlohmann::json::array();
    for (const Column& c : t.columns) {
      nlohmann::json cj;
      cj["values"] = c.values;
      if (c.label) {
        cj["label"] = *c.label;
      } else {
        cj["label"] = nullptr;
      }
      j["columns"].push_back(std::move(cj));
    }
    out << j.dump() << "\n";
  }
}

}  // namespace colgnn
