// Ranks 50 queries over a 100k-document generated corpus with each ranker
// and fails if any run takes two minutes or more.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "entrank/app.hpp"
#include "support/synthetic.hpp"

namespace fs = std::filesystem;
using namespace entrank;

int main() {
  constexpr std::size_t kDocuments = 100000;
  constexpr std::size_t kQueries = 50;
  constexpr double kLimitSeconds = 120.0;

  std::random_device rd;
  const fs::path dir = fs::temp_directory_path() / ("entrank-perf-" + std::to_string(rd()));
  fs::create_directories(dir);
  {
    const auto load = synthetic::load_corpus(2024, kDocuments, kQueries);
    std::ofstream corpus(dir / "corpus.jsonl"), queries(dir / "queries.jsonl");
    write_records(corpus, load.documents);
    synthetic::write_queries(queries, load.queries);
  }

  int status = 0;
  for (auto ranker : {RankerKind::prob, RankerKind::rwr, RankerKind::random}) {
    RunConfig c;
    c.source.corpus = {dir / "corpus.jsonl"};
    c.queries = dir / "queries.jsonl";
    c.ranker = ranker;
    const auto start = std::chrono::steady_clock::now();
    std::ostringstream run, diag;
    cmd_rank(c, run, diag);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::size_t lines = 0;
    for (char ch : run.str()) lines += ch == '\n' ? 1 : 0;
    const bool ok = secs < kLimitSeconds && lines > 0;
    std::printf("%s %s: %zu documents, %zu queries, %zu run lines in %.1fs\n", ok ? "PASS" : "FAIL",
                std::string(to_string(ranker)).c_str(), kDocuments, kQueries, lines, secs);
    if (!ok) status = 1;
  }
  fs::remove_all(dir);
  return status;
}
