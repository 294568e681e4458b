#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entrank/corpus.hpp"
#include "entrank/eval.hpp"
#include "entrank/prob_rank.hpp"
#include "entrank/query.hpp"
#include "entrank/rwr_rank.hpp"

namespace entrank {

// Batch pipelines behind the command-line front end. Data goes to the
// stream arguments; warnings go to `diag`, never mixed with data.

/// Where a command reads the corpus from: a saved snapshot or raw corpus files.
struct CorpusSource {
  std::optional<std::filesystem::path> index;
  std::vector<std::filesystem::path> corpus;
  CorpusFormat format = CorpusFormat::records;
  std::optional<Granularity> granularity;  // default: snapshot's, else day
};

/// Throws entrank::Error when neither or both sources are given.
CorpusIndex load_corpus(const CorpusSource& source);

enum class RankerKind { prob, rwr, random };
std::optional<RankerKind> parse_ranker(std::string_view text);
std::string_view to_string(RankerKind r);

struct RunConfig {
  CorpusSource source;
  std::filesystem::path queries;
  std::optional<std::filesystem::path> categories;
  RankerKind ranker = RankerKind::prob;
  std::optional<FactorSelection> factors;  // prob only; default ABC
  RwrParams rwr;
  bool p1_given = false;  // otherwise p1 follows default_p1(query type)
  std::uint64_t seed = 0;
  std::string tag = "entrank";
  bool verbose = false;
  std::optional<std::filesystem::path> graph_dir;  // rwr only
  unsigned threads = 1;

  /// Rejects flag combinations that do not apply to the chosen ranker, and
  /// missing input files.
  void validate() const;
};

/// A query after category expansion and matching.
struct PreparedQuery {
  Query query;
  ResultSet result;
};

/// Expands categories and matches every query. Queries with an empty
/// result set are kept (their result is empty) and reported on `diag`.
std::vector<PreparedQuery> prepare_queries(const CorpusIndex& index, std::vector<Query> queries,
                                           const CategoryMembership* membership, std::ostream& diag);

/// Ranks one prepared query with the configured ranker.
std::vector<ScoredDoc> rank_query(const CorpusIndex& index, const PreparedQuery& q,
                                  const RunConfig& config, std::vector<std::string>* warnings);

void cmd_index(const CorpusSource& source, const std::filesystem::path& out);

/// Writes the run file for every query with a non-empty result.
void cmd_rank(const RunConfig& config, std::ostream& run_out, std::ostream& diag);

struct EvalConfig {
  std::filesystem::path run;
  std::filesystem::path qrels;
  std::vector<std::size_t> cutoffs{5, 10};
  std::optional<std::filesystem::path> compare;  // second run for the t-test
  std::string metric = "ndcg@5";                  // metric compared by the t-test
  std::optional<std::uint32_t> baseline_trials;  // also report a random baseline
  std::uint64_t seed = 0;
};

struct EvalResult {
  MetricReport report;
  std::optional<MetricReport> compared;
  std::optional<TTestResult> ttest;
  std::optional<MetricReport> baseline;
  std::string metric;
};

EvalResult cmd_eval(const EvalConfig& config, std::ostream& diag);
/// Human-readable table.
void write_report(std::ostream& out, const EvalResult& result);
/// One JSON object per (run, query, metric), plus mean and t-test lines.
void write_report_records(std::ostream& out, const EvalResult& result);

struct SweepConfig {
  RunConfig run;  // ranker fields are ignored
  std::filesystem::path qrels;
  SweepGrid grid;
  std::vector<std::size_t> cutoffs{5, 10};
};

SweepTable cmd_sweep(const SweepConfig& config, std::ostream& diag);
/// One tab-separated table per query-type group, `sweep_<group>.tsv`.
std::vector<std::filesystem::path> write_sweep_tables(const SweepTable& table,
                                                      const std::filesystem::path& dir);
void write_sweep_table(std::ostream& out, const SweepTable& table, const std::string& group);

}  // namespace entrank
