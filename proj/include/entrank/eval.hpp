#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "entrank/query.hpp"
#include "entrank/rwr_rank.hpp"

namespace entrank {

/// Graded judgments in [0, 3]. Unjudged pairs are grade 0.
class Qrels {
 public:
  /// Throws entrank::Error for grades outside [0, 3].
  void set(const std::string& query, const std::string& doc, int grade);
  int grade(const std::string& query, const std::string& doc) const;
  bool has_query(const std::string& query) const { return grades_.count(query) != 0; }
  /// All grades judged for `query` (any order).
  std::vector<int> judged(const std::string& query) const;
  std::size_t size() const;

 private:
  std::map<std::string, std::map<std::string, int>> grades_;
};

/// Binary relevance threshold for precision.
inline constexpr int kRelevantGrade = 2;

/// DCG@k = Σ_{i ≤ min(k, n)} grade_i / log2(i + 1), normalized by the DCG of
/// `ideal_pool` sorted descending. 0 when the ideal DCG is 0.
double ndcg_at_k(std::span<const int> grades, std::span<const int> ideal_pool, std::size_t k);
/// Same, with the ranked list itself as the ideal pool.
double ndcg_at_k(std::span<const int> grades, std::size_t k);
/// Share of the first k ranks holding a grade >= 2; divides by k even when
/// the list is shorter.
double precision_at_k(std::span<const int> grades, std::size_t k);

struct Metric {
  enum class Kind { ndcg, precision };
  Kind kind = Kind::ndcg;
  std::optional<std::size_t> k;  // nullopt: full list

  std::string name() const;  // "ndcg@5", "ndcg@all", "p@10"
  static std::optional<Metric> parse(std::string_view name);
};

/// ndcg@5, ndcg@10, ndcg@all, p@5, p@10.
std::vector<Metric> default_metrics();
/// ndcg@k for each k, ndcg@all, then p@k for each k.
std::vector<Metric> metrics_for_cutoffs(std::span<const std::size_t> cutoffs);

std::vector<double> evaluate(std::span<const int> grades, std::span<const int> ideal_pool,
                             std::span<const Metric> metrics);

struct QueryMetrics {
  std::string query;
  std::vector<double> values;  // parallel to MetricReport::metrics
};

struct MetricReport {
  std::vector<Metric> metrics;
  std::vector<QueryMetrics> queries;

  /// Macro average over queries; zeros when there are none.
  std::vector<double> mean() const;
  std::optional<std::size_t> metric_index(std::string_view name) const;
  /// Per-query values of one metric, in query order.
  std::vector<double> column(std::size_t metric) const;
};

/// Grades of `ranked_docs` under `qrels`.
std::vector<int> grades_for(const Qrels& qrels, const std::string& query,
                            std::span<const std::string> ranked_docs);

/// Per-query metrics of a ranked list. The ideal ordering pools the query's
/// judged grades with the list's own grades.
QueryMetrics evaluate_ranking(const std::string& query, std::span<const std::string> ranked_docs,
                              const Qrels& qrels, std::span<const Metric> metrics);

/// Deterministic shuffle of `docs` for one (seed, query, trial) triple.
std::vector<std::string> random_permutation(std::span<const std::string> docs, std::uint64_t seed,
                                            std::string_view query, std::uint32_t trial);

/// Mean metrics over `trials` seeded random orderings of `docs`.
QueryMetrics random_baseline(const std::string& query, std::span<const std::string> docs,
                             const Qrels& qrels, std::span<const Metric> metrics,
                             std::uint32_t trials = 10, std::uint64_t seed = 0);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  std::size_t n = 0;
  /// All differences equal: t is 0 (p = 1) when they are all zero, ±inf
  /// (p = 0) otherwise.
  bool degenerate = false;
};

/// Two-sided paired t-test on a − b with n − 1 degrees of freedom.
/// Throws entrank::Error on length mismatch or fewer than two pairs.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

// ---------------------------------------------------------------------------
// Parameter sweep for the random walk.

struct JudgedQuery {
  ResultSet result;  // already matched against the index
  QueryType type;
};

struct SweepGrid {
  std::vector<double> restarts{0.0, 0.2, 0.4, 0.6, 0.8};
  std::vector<double> p1s{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  int iterations = 30;
};

struct SweepCell {
  double restart;
  double p1;
  /// Group label ("single", "and", "or", "category", "all") → averaged metrics.
  std::map<std::string, std::vector<double>> group_means;
  MetricReport report;  // per-query values for this cell
};

struct SweepTable {
  std::vector<Metric> metrics;
  std::vector<std::string> groups;  // labels present, "all" last
  std::vector<SweepCell> cells;     // restart-major order
};

SweepTable sweep(std::span<const JudgedQuery> queries, const CorpusIndex& index, const Qrels& qrels,
                 const SweepGrid& grid, std::span<const Metric> metrics);

}  // namespace entrank
