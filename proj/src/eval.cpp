#include "entrank/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/distributions/students_t.hpp>

#include "entrank/error.hpp"

namespace entrank {

void Qrels::set(const std::string& query, const std::string& doc, int grade) {
  if (grade < 0 || grade > 3)
    throw Error("qrels", "grade " + std::to_string(grade) + " for " + query + "/" + doc +
                             " is outside [0, 3]");
  grades_[query][doc] = grade;
}

int Qrels::grade(const std::string& query, const std::string& doc) const {
  const auto q = grades_.find(query);
  if (q == grades_.end()) return 0;
  const auto d = q->second.find(doc);
  return d == q->second.end() ? 0 : d->second;
}

std::vector<int> Qrels::judged(const std::string& query) const {
  std::vector<int> out;
  if (const auto q = grades_.find(query); q != grades_.end())
    for (const auto& [doc, g] : q->second) out.push_back(g);
  return out;
}

std::size_t Qrels::size() const {
  std::size_t n = 0;
  for (const auto& [q, docs] : grades_) n += docs.size();
  return n;
}

// ---------------------------------------------------------------------------

namespace {

double dcg(std::span<const int> grades, std::size_t k) {
  double total = 0.0;
  const auto n = std::min(k, grades.size());
  for (std::size_t i = 0; i < n; ++i)
    total += static_cast<double>(grades[i]) / std::log2(static_cast<double>(i) + 2.0);
  return total;
}

}  // namespace

double ndcg_at_k(std::span<const int> grades, std::span<const int> ideal_pool, std::size_t k) {
  if (k == 0) throw Error("metric", "cutoff must be at least 1");
  std::vector<int> ideal(ideal_pool.begin(), ideal_pool.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double best = dcg(ideal, k);
  if (best <= 0.0) return 0.0;
  return dcg(grades, k) / best;
}

double ndcg_at_k(std::span<const int> grades, std::size_t k) {
  return ndcg_at_k(grades, grades, k);
}

double precision_at_k(std::span<const int> grades, std::size_t k) {
  if (k == 0) throw Error("metric", "cutoff must be at least 1");
  const auto n = std::min(k, grades.size());
  const auto hits = std::count_if(grades.begin(), grades.begin() + static_cast<std::ptrdiff_t>(n),
                                  [](int g) { return g >= kRelevantGrade; });
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::string Metric::name() const {
  const std::string cut = k ? std::to_string(*k) : std::string("all");
  return (kind == Kind::ndcg ? "ndcg@" : "p@") + cut;
}

std::optional<Metric> Metric::parse(std::string_view name) {
  Metric m;
  std::string_view cut;
  if (name.starts_with("ndcg@")) {
    m.kind = Kind::ndcg;
    cut = name.substr(5);
  } else if (name.starts_with("p@")) {
    m.kind = Kind::precision;
    cut = name.substr(2);
  } else {
    return std::nullopt;
  }
  if (cut == "all") return m;
  if (cut.empty() || cut.size() > 9) return std::nullopt;
  std::size_t k = 0;
  for (char c : cut) {
    if (c < '0' || c > '9') return std::nullopt;
    k = k * 10 + static_cast<std::size_t>(c - '0');
  }
  if (k == 0) return std::nullopt;
  m.k = k;
  return m;
}

std::vector<Metric> default_metrics() {
  const std::size_t cutoffs[] = {5, 10};
  return metrics_for_cutoffs(cutoffs);
}

std::vector<Metric> metrics_for_cutoffs(std::span<const std::size_t> cutoffs) {
  std::vector<Metric> out;
  for (auto k : cutoffs) out.push_back(Metric{Metric::Kind::ndcg, k});
  out.push_back(Metric{Metric::Kind::ndcg, std::nullopt});
  for (auto k : cutoffs) out.push_back(Metric{Metric::Kind::precision, k});
  return out;
}

std::vector<double> evaluate(std::span<const int> grades, std::span<const int> ideal_pool,
                             std::span<const Metric> metrics) {
  std::vector<double> out;
  out.reserve(metrics.size());
  for (const auto& m : metrics) {
    // ndcg@all cuts at the list length; an empty list scores 0.
    const std::size_t k = m.k ? *m.k : std::max<std::size_t>(grades.size(), 1);
    out.push_back(m.kind == Metric::Kind::ndcg ? ndcg_at_k(grades, ideal_pool, k)
                                               : precision_at_k(grades, k));
  }
  return out;
}

std::vector<double> MetricReport::mean() const {
  std::vector<double> out(metrics.size(), 0.0);
  if (queries.empty()) return out;
  for (const auto& q : queries)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += q.values[i];
  for (auto& v : out) v /= static_cast<double>(queries.size());
  return out;
}

std::optional<std::size_t> MetricReport::metric_index(std::string_view name) const {
  for (std::size_t i = 0; i < metrics.size(); ++i)
    if (metrics[i].name() == name) return i;
  return std::nullopt;
}

std::vector<double> MetricReport::column(std::size_t metric) const {
  std::vector<double> out;
  out.reserve(queries.size());
  for (const auto& q : queries) out.push_back(q.values.at(metric));
  return out;
}

std::vector<int> grades_for(const Qrels& qrels, const std::string& query,
                            std::span<const std::string> ranked_docs) {
  std::vector<int> out;
  out.reserve(ranked_docs.size());
  for (const auto& d : ranked_docs) out.push_back(qrels.grade(query, d));
  return out;
}

namespace {

/// Judged grades plus grades of unjudged-but-returned documents (all 0,
/// which never change the ideal DCG; kept so the pool covers the list).
std::vector<int> ideal_pool_for(const Qrels& qrels, const std::string& query,
                                std::span<const int> grades) {
  auto pool = qrels.judged(query);
  if (pool.size() < grades.size()) pool.resize(grades.size(), 0);
  if (pool.empty()) pool.assign(grades.begin(), grades.end());
  return pool;
}

}  // namespace

QueryMetrics evaluate_ranking(const std::string& query, std::span<const std::string> ranked_docs,
                              const Qrels& qrels, std::span<const Metric> metrics) {
  const auto grades = grades_for(qrels, query, ranked_docs);
  const auto pool = ideal_pool_for(qrels, query, grades);
  return QueryMetrics{query, evaluate(grades, pool, metrics)};
}

std::vector<std::string> random_permutation(std::span<const std::string> docs, std::uint64_t seed,
                                            std::string_view query, std::uint32_t trial) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : query) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32), trial};
  std::mt19937_64 rng(seq);
  std::vector<std::string> out(docs.begin(), docs.end());
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

QueryMetrics random_baseline(const std::string& query, std::span<const std::string> docs,
                             const Qrels& qrels, std::span<const Metric> metrics,
                             std::uint32_t trials, std::uint64_t seed) {
  if (trials == 0) throw Error("metric", "random baseline needs at least one trial");
  QueryMetrics out{query, std::vector<double>(metrics.size(), 0.0)};
  for (std::uint32_t t = 0; t < trials; ++t) {
    const auto order = random_permutation(docs, seed, query, t);
    const auto m = evaluate_ranking(query, order, qrels, metrics);
    for (std::size_t i = 0; i < metrics.size(); ++i) out.values[i] += m.values[i];
  }
  for (auto& v : out.values) v /= static_cast<double>(trials);
  return out;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("stats", "paired samples differ in length");
  if (a.size() < 2) throw Error("stats", "paired t-test needs at least two pairs");
  const auto n = a.size();
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];
  const double mean = std::accumulate(diff.begin(), diff.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double d : diff) ss += (d - mean) * (d - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  TTestResult r;
  r.n = n;
  const bool all_equal = std::all_of(diff.begin(), diff.end(), [&](double d) { return d == diff[0]; });
  if (all_equal || sd == 0.0) {
    r.degenerate = true;
    if (mean == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
      r.p = 0.0;
    }
    return r;
  }
  r.t = mean / (sd / std::sqrt(static_cast<double>(n)));
  const boost::math::students_t dist(static_cast<double>(n - 1));
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t)));
  return r;
}

// ---------------------------------------------------------------------------

SweepTable sweep(std::span<const JudgedQuery> queries, const CorpusIndex& index, const Qrels& qrels,
                 const SweepGrid& grid, std::span<const Metric> metrics) {
  SweepTable table;
  table.metrics.assign(metrics.begin(), metrics.end());
  for (QueryType t : {QueryType::single, QueryType::and_, QueryType::or_, QueryType::category}) {
    const bool present = std::any_of(queries.begin(), queries.end(),
                                     [&](const JudgedQuery& q) { return q.type == t; });
    if (present) table.groups.emplace_back(to_string(t));
  }
  table.groups.emplace_back("all");

  // Query statistics do not depend on the walk parameters.
  std::vector<std::optional<QueryModel>> models;
  models.reserve(queries.size());
  for (const auto& q : queries) {
    if (q.result.empty()) models.emplace_back();
    else models.emplace_back(std::in_place, index, q.result);
  }

  for (double restart : grid.restarts) {
    for (double p1 : grid.p1s) {
      SweepCell cell{restart, p1, {}, MetricReport{table.metrics, {}}};
      RwrParams params;
      params.restart = restart;
      params.p1 = p1;
      params.iterations = grid.iterations;
      std::map<std::string, std::pair<std::vector<double>, std::size_t>> sums;
      for (std::size_t i = 0; i < queries.size(); ++i) {
        if (!models[i]) continue;
        const auto ranked = rank_stochastic(*models[i], params);
        std::vector<std::string> ids;
        ids.reserve(ranked.size());
        for (const auto& s : ranked) ids.push_back(s.doc_id);
        auto m = evaluate_ranking(queries[i].result.query.id, ids, qrels, metrics);
        for (const std::string group : {std::string(to_string(queries[i].type)), std::string("all")}) {
          auto& [sum, count] = sums[group];
          sum.resize(metrics.size(), 0.0);
          for (std::size_t k = 0; k < metrics.size(); ++k) sum[k] += m.values[k];
          ++count;
        }
        cell.report.queries.push_back(std::move(m));
      }
      for (const auto& group : table.groups) {
        std::vector<double> mean(metrics.size(), 0.0);
        if (const auto it = sums.find(group); it != sums.end())
          for (std::size_t k = 0; k < metrics.size(); ++k)
            mean[k] = it->second.first[k] / static_cast<double>(it->second.second);
        cell.group_means.emplace(group, std::move(mean));
      }
      table.cells.push_back(std::move(cell));
    }
  }
  return table;
}

}  // namespace entrank
