#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "entrank/app.hpp"
#include "entrank/error.hpp"
#include "entrank/snapshot.hpp"
#include "entrank/trec_io.hpp"
#include "support/fixtures.hpp"
#include "support/synthetic.hpp"

using namespace entrank;
namespace fs = std::filesystem;
using fixtures::doc;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("entrank-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Planted corpus on disk: corpus.jsonl, queries.jsonl, categories.jsonl, qrels.txt
struct Workspace {
  TempDir dir;
  synthetic::PlantedDataset data = synthetic::planted_dataset(7, 12, 100);

  Workspace() {
    std::ofstream corpus(dir / "corpus.jsonl"), queries(dir / "queries.jsonl"), cats(dir / "categories.jsonl"),
        qrels(dir / "qrels.txt");
    write_records(corpus, data.documents);
    synthetic::write_queries(queries, data.queries);
    synthetic::write_membership(cats, data.queries, data.membership);
    synthetic::write_qrels(qrels, data.queries, data.documents, data.qrels);
  }

  RunConfig config() const {
    RunConfig c;
    c.source.corpus = {dir / "corpus.jsonl"};
    c.queries = dir / "queries.jsonl";
    c.categories = dir / "categories.jsonl";
    return c;
  }
};

std::string rank_to_string(const RunConfig& c) {
  std::ostringstream out, diag;
  cmd_rank(c, out, diag);
  return out.str();
}

}  // namespace

TEST_CASE("rank is deterministic for every ranker and thread count") {
  Workspace ws;
  for (auto ranker : {RankerKind::prob, RankerKind::rwr, RankerKind::random}) {
    auto c = ws.config();
    c.ranker = ranker;
    c.seed = 3;
    const auto first = rank_to_string(c);
    CHECK_FALSE(first.empty());
    CHECK(rank_to_string(c) == first);
    c.threads = 3;
    CHECK(rank_to_string(c) == first);
  }
}

TEST_CASE("rwr ranker delegates to the stochastic ranking") {
  Workspace ws;
  auto c = ws.config();
  c.ranker = RankerKind::rwr;
  c.p1_given = true;
  const auto text = rank_to_string(c);

  const auto idx = build_index(ws.data.documents);
  std::ostringstream expect;
  for (auto q : ws.data.queries) {
    resolve_category(q, ws.data.membership);
    const auto rs = match(idx, q);
    if (rs.empty()) continue;
    write_run(expect, q.id, rank_stochastic(rs, idx, RwrParams{}), "entrank");
  }
  CHECK(text == expect.str());
}

TEST_CASE("prob ranker with factor A orders by relativeness") {
  TempDir dir;
  write_file(dir / "c.jsonl",
             to_record_line(doc("d1", "2000-01-01", {{"a", 1}, {"x", 3}})) + "\n" +
                 to_record_line(doc("d2", "2000-01-02", {{"a", 3}, {"x", 1}})) + "\n");
  write_file(dir / "q.jsonl",
             R"({"id":"q","semantics":"and","entities":["a"],"time":{"start":"2000-01-01","end":"2000-12-31"}})" "\n");
  RunConfig c;
  c.source.corpus = {dir / "c.jsonl"};
  c.queries = dir / "q.jsonl";
  c.factors = FactorSelection::parse("A");
  std::istringstream in(rank_to_string(c));
  CHECK(read_run(in).ranked_docs("q") == std::vector<std::string>{"d2", "d1"});
}

TEST_CASE("empty result sets warn and emit nothing") {
  TempDir dir;
  write_file(dir / "c.jsonl", to_record_line(doc("d1", "2000-01-01", {{"a", 1}})) + "\n");
  write_file(dir / "q.jsonl",
             R"({"id":"q","semantics":"and","entities":["b"],"time":{"start":"2000-01-01","end":"2000-12-31"}})" "\n");
  RunConfig c;
  c.source.corpus = {dir / "c.jsonl"};
  c.queries = dir / "q.jsonl";
  std::ostringstream out, diag;
  cmd_rank(c, out, diag);
  CHECK(out.str().empty());
  CHECK(diag.str().find("q") != std::string::npos);
}

TEST_CASE("flag combinations are checked up front") {
  Workspace ws;
  auto c = ws.config();
  c.ranker = RankerKind::rwr;
  c.factors = FactorSelection::parse("A");
  CHECK_THROWS_AS(c.validate(), Error);
  c = ws.config();
  c.graph_dir = ws.dir.path;
  CHECK_THROWS_AS(c.validate(), Error);
  c = ws.config();
  c.queries = ws.dir / "missing.jsonl";
  CHECK_THROWS_AS(c.validate(), Error);
  c = ws.config();
  c.source.index = ws.dir / "x.idx";
  CHECK_THROWS_AS(load_corpus(c.source), Error);
}

TEST_CASE("index snapshot and corpus give the same run") {
  Workspace ws;
  cmd_index(ws.config().source, ws.dir / "corpus.idx");
  auto from_corpus = ws.config();
  auto from_index = ws.config();
  from_index.source.corpus.clear();
  from_index.source.index = ws.dir / "corpus.idx";
  CHECK(rank_to_string(from_index) == rank_to_string(from_corpus));
}

TEST_CASE("eval: comparing a run to itself") {
  Workspace ws;
  write_file(ws.dir / "run.txt", rank_to_string(ws.config()));
  EvalConfig e;
  e.run = ws.dir / "run.txt";
  e.qrels = ws.dir / "qrels.txt";
  e.compare = e.run;
  std::ostringstream diag;
  const auto result = cmd_eval(e, diag);
  REQUIRE(result.ttest.has_value());
  CHECK(result.ttest->t == 0.0);
  CHECK(result.ttest->p == 1.0);
  CHECK(result.report.queries.size() == 20);

  std::ostringstream table, records;
  write_report(table, result);
  write_report_records(records, result);
  CHECK(table.str().find("ndcg@5") != std::string::npos);
  CHECK(records.str().find("\"metric\"") != std::string::npos);
}

TEST_CASE("eval: ideal run scores one") {
  TempDir dir;
  write_file(dir / "run.txt", "q Q0 a 1 3 t\nq Q0 b 2 2 t\nq Q0 c 3 1 t\n");
  write_file(dir / "qrels.txt", "q 0 a 3\nq 0 b 1\nq 0 c 0\n");
  EvalConfig e;
  e.run = dir / "run.txt";
  e.qrels = dir / "qrels.txt";
  std::ostringstream diag;
  const auto result = cmd_eval(e, diag);
  CHECK(result.report.queries[0].values[*result.report.metric_index("ndcg@all")] == 1.0);
}

TEST_CASE("eval warns about queries without judgments") {
  TempDir dir;
  write_file(dir / "run.txt", "q Q0 a 1 3 t\nother Q0 a 1 3 t\n");
  write_file(dir / "qrels.txt", "q 0 a 3\n");
  EvalConfig e;
  e.run = dir / "run.txt";
  e.qrels = dir / "qrels.txt";
  std::ostringstream diag;
  const auto result = cmd_eval(e, diag);
  CHECK(diag.str().find("other") != std::string::npos);
  CHECK(result.report.queries.size() == 2);
}

TEST_CASE("single-cell sweep equals rank then eval") {
  Workspace ws;
  SweepConfig s;
  s.run = ws.config();
  s.qrels = ws.dir / "qrels.txt";
  s.grid.restarts = {0.4};
  s.grid.p1s = {0.6};
  std::ostringstream diag;
  const auto table = cmd_sweep(s, diag);
  REQUIRE(table.cells.size() == 1);
  CHECK(table.groups == std::vector<std::string>{"single", "and", "or", "category", "all"});

  auto r = ws.config();
  r.ranker = RankerKind::rwr;
  r.rwr.restart = 0.4;
  r.rwr.p1 = 0.6;
  r.p1_given = true;
  write_file(ws.dir / "run.txt", rank_to_string(r));
  EvalConfig e;
  e.run = ws.dir / "run.txt";
  e.qrels = s.qrels;
  const auto result = cmd_eval(e, diag);
  const auto mean = result.report.mean();
  const auto& all = table.cells[0].group_means.at("all");
  REQUIRE(all.size() == mean.size());
  for (std::size_t m = 0; m < mean.size(); ++m) CHECK(all[m] == doctest::Approx(mean[m]).epsilon(1e-12));

  const auto files = write_sweep_tables(table, ws.dir / "sweep");
  CHECK(files.size() == 5);
  CHECK(fs::exists(ws.dir / "sweep" / "sweep_category.tsv"));
  CHECK_FALSE(read_file(ws.dir / "sweep" / "sweep_all.tsv").empty());
}
