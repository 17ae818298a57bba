#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "colgnn/graph.hpp"
#include "colgnn/table.hpp"

using namespace colgnn;

namespace {

Table make_table(const std::string& id, int columns, const std::string& label) {
  Table t;
  t.table_id = id;
  for (int i = 0; i < columns; ++i) {
    Column c;
    c.values = {"v" + std::to_string(i)};
    c.label = label;
    t.columns.push_back(c);
  }
  return t;
}

std::vector<std::vector<double>> uniform_logits(int columns, int k) {
  return std::vector<std::vector<double>>(static_cast<std::size_t>(columns),
                                          std::vector<double>(static_cast<std::size_t>(k), 0.0));
}

}  // namespace

TEST_CASE("build_graph produces a complete graph") {
  LabelVocab vocab = LabelVocab::from_names({"a", "b"});
  ColumnGraph g = build_graph(make_table("t", 3, "a"), uniform_logits(3, 2), vocab);
  CHECK(g.num_nodes == 3);
  for (const auto& lst : g.neighbors) CHECK(lst.size() == 2);
  // symmetry: v in N(u) iff u in N(v), and no self entries
  for (int u = 0; u < 3; ++u) {
    for (int v : g.neighbors[static_cast<std::size_t>(u)]) {
      CHECK(v != u);
      const auto& back = g.neighbors[static_cast<std::size_t>(v)];
      CHECK(std::find(back.begin(), back.end(), u) != back.end());
    }
  }
}

TEST_CASE("build_graph accepts a single-column table") {
  LabelVocab vocab = LabelVocab::from_names({"a", "b"});
  ColumnGraph g = build_graph(make_table("t", 1, "b"), uniform_logits(1, 2), vocab);
  CHECK(g.num_nodes == 1);
  CHECK(g.neighbors[0].empty());
  CHECK(g.gold[0] == 1);
}

TEST_CASE("build_graph passes raw logits through as initial states") {
  LabelVocab vocab = LabelVocab::from_names({"a", "b"});
  ColumnGraph g = build_graph(make_table("t", 2, "a"), {{1.0, 0.0}, {0.0, 1.0}}, vocab);
  CHECK(g.initial_states(0, 0) == 1.0);
  CHECK(g.initial_states(0, 1) == 0.0);
  CHECK(g.initial_states(1, 0) == 0.0);
  CHECK(g.initial_states(1, 1) == 1.0);
}

TEST_CASE("build_graph rejects bad inputs") {
  LabelVocab vocab = LabelVocab::from_names({"a", "b"});
  CHECK_THROWS_AS(build_graph(make_table("t", 2, "a"), uniform_logits(3, 2), vocab),
                  InvalidInputError);
  CHECK_THROWS_AS(build_graph(make_table("t", 2, "a"), uniform_logits(2, 3), vocab),
                  InvalidInputError);
  CHECK_THROWS_WITH_AS(build_graph(make_table("t", 1, "mystery"), uniform_logits(1, 2), vocab),
                       doctest::Contains("mystery"), InvalidInputError);
}

TEST_CASE("unlabeled columns are allowed at inference time") {
  LabelVocab vocab = LabelVocab::from_names({"a", "b"});
  Table t = make_table("t", 2, "a");
  t.columns[1].label.reset();
  ColumnGraph g = build_graph(t, uniform_logits(2, 2), vocab);
  CHECK(g.gold[0] == 0);
  CHECK(g.gold[1] == -1);
}

TEST_CASE("batch_graphs forms a block-diagonal disjoint union") {
  LabelVocab vocab = LabelVocab::from_names({"a", "b"});
  ColumnGraph g1 = build_graph(make_table("t1", 2, "a"), uniform_logits(2, 2), vocab);
  ColumnGraph g2 = build_graph(make_table("t2", 2, "b"), uniform_logits(2, 2), vocab);
  GraphBatch b = batch_graphs({g1, g2});
  CHECK(b.total_nodes == 4);
  CHECK(b.offsets == std::vector<int>{0, 2});
  auto nbrs = b.neighbors();
  CHECK(nbrs[0] == std::vector<int>{1});
  CHECK(nbrs[1] == std::vector<int>{0});
  CHECK(nbrs[2] == std::vector<int>{3});
  CHECK(nbrs[3] == std::vector<int>{2});
}

TEST_CASE("batch_graphs rejects degenerate input") {
  CHECK_THROWS_AS(batch_graphs({}), InvalidInputError);

  LabelVocab v2 = LabelVocab::from_names({"a", "b"});
  LabelVocab v3 = LabelVocab::from_names({"a", "b", "c"});
  ColumnGraph g1 = build_graph(make_table("t1", 2, "a"), uniform_logits(2, 2), v2);
  ColumnGraph g2 = build_graph(make_table("t2", 2, "a"), uniform_logits(2, 3), v3);
  CHECK_THROWS_AS(batch_graphs({g1, g2}), InvalidInputError);
}

TEST_CASE("dataset jsonl round trip") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "colgnn_tables_test.jsonl";

  Table t1;
  t1.table_id = "alpha";
  t1.columns.push_back({{"x", "y"}, std::string("a")});
  t1.columns.push_back({{"1", "2"}, std::nullopt});
  write_tables_jsonl(path, std::vector<Table>{t1});

  auto tables = read_tables_jsonl(path);
  REQUIRE(tables.size() == 1);
  CHECK(tables[0].table_id == "alpha");
  REQUIRE(tables[0].columns.size() == 2);
  CHECK(tables[0].columns[0].values == std::vector<std::string>{"x", "y"});
  CHECK(tables[0].columns[0].label == "a");
  CHECK_FALSE(tables[0].columns[1].label.has_value());
  fs::remove(path);
}

TEST_CASE("dataset parse errors carry line numbers") {
  namespace fs = std::filesystem;
  fs::path path = fs::temp_directory_path() / "colgnn_tables_bad.jsonl";
  {
    std::ofstream out(path);
    out << R"({"table_id": "ok", "columns": [{"values": ["v"], "label": null}]})" << "\n";
    out << "{not json\n";
  }
  try {
    read_tables_jsonl(path);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
  fs::remove(path);
}

TEST_CASE("vocab is a bijection") {
  LabelVocab v = LabelVocab::from_names({"city", "country"});
  CHECK(v.size() == 2);
  CHECK(v.index_of("city") == 0);
  CHECK(v.name(1) == "country");
  CHECK_FALSE(v.find("planet").has_value());
  CHECK_THROWS_AS(LabelVocab::from_names({"x", "x"}), InvalidInputError);
}
