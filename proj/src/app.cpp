#include "entrank/app.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "entrank/error.hpp"
#include "entrank/snapshot.hpp"
#include "entrank/trec_io.hpp"

namespace entrank {

namespace {

void require_file(const std::filesystem::path& p, const char* what) {
  if (!std::filesystem::is_regular_file(p))
    throw Error("config", std::string(what) + " file not found: " + p.string());
}

std::string_view factor_name(Factor f) {
  switch (f) {
    case Factor::relativeness:
      return "relativeness";
    case Factor::timeliness:
      return "timeliness";
    case Factor::relatedness:
      return "relatedness";
  }
  return "";
}

std::string sanitize_file_name(const std::string& id) {
  std::string out;
  for (char c : id)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.') ? c : '_';
  return out;
}

/// Runs `work(i)` for i in [0, n) on up to `threads` workers.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn work) {
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          work(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

CorpusIndex load_corpus(const CorpusSource& source) {
  if (source.index && !source.corpus.empty())
    throw Error("config", "give either an index snapshot or corpus files, not both");
  if (source.index) {
    require_file(*source.index, "index");
    return load_index(*source.index, source.granularity);
  }
  if (source.corpus.empty()) throw Error("config", "no index snapshot or corpus file given");
  std::vector<Document> docs;
  for (const auto& path : source.corpus) {
    require_file(path, "corpus");
    auto part = ingest(path, source.format);
    docs.insert(docs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return build_index(std::move(docs), source.granularity.value_or(Granularity::day));
}

std::optional<RankerKind> parse_ranker(std::string_view text) {
  if (text == "prob") return RankerKind::prob;
  if (text == "rwr") return RankerKind::rwr;
  if (text == "random") return RankerKind::random;
  return std::nullopt;
}

std::string_view to_string(RankerKind r) {
  switch (r) {
    case RankerKind::prob:
      return "prob";
    case RankerKind::rwr:
      return "rwr";
    case RankerKind::random:
      return "random";
  }
  return "prob";
}

void RunConfig::validate() const {
  if (factors && ranker != RankerKind::prob)
    throw Error("config", "--factors applies only to the prob ranker");
  if (graph_dir && ranker != RankerKind::rwr)
    throw Error("config", "--graph-dir applies only to the rwr ranker");
  if (ranker == RankerKind::rwr) rwr.validate();
  if (source.index) require_file(*source.index, "index");
  for (const auto& c : source.corpus) require_file(c, "corpus");
  require_file(queries, "query");
  if (categories) require_file(*categories, "category");
}

std::vector<PreparedQuery> prepare_queries(const CorpusIndex& index, std::vector<Query> queries,
                                           const CategoryMembership* membership, std::ostream& diag) {
  std::vector<PreparedQuery> out;
  out.reserve(queries.size());
  for (auto& q : queries) {
    if (q.category) {
      if (!membership)
        throw Error("config", "query " + q.id + " names a category but no category file was given");
      resolve_category(q, *membership);
    }
    PreparedQuery pq{q, {}};
    if (q.entities.empty()) {
      diag << "warning: query " << q.id << " has no entities after category expansion; skipped\n";
      pq.result.query = q;
    } else {
      pq.result = match(index, q);
      if (pq.result.empty()) diag << "warning: query " << q.id << " matched no documents\n";
    }
    out.push_back(std::move(pq));
  }
  return out;
}

std::vector<ScoredDoc> rank_query(const CorpusIndex& index, const PreparedQuery& q,
                                  const RunConfig& config, std::vector<std::string>* warnings) {
  const auto& rs = q.result;
  switch (config.ranker) {
    case RankerKind::prob: {
      std::vector<Factor> degenerate;
      auto ranked = rank_probabilistic(QueryModel(index, rs), config.factors.value_or(FactorSelection::all()),
                                       &degenerate);
      if (warnings)
        for (Factor f : degenerate)
          warnings->push_back("warning: query " + q.query.id + ": " + std::string(factor_name(f)) +
                              " is degenerate; using the uniform distribution");
      return ranked;
    }
    case RankerKind::rwr: {
      RwrParams params = config.rwr;
      if (!config.p1_given) params.p1 = default_p1(q.query.effective_type());
      const QueryModel model(index, rs);
      if (config.graph_dir) {
        std::filesystem::create_directories(*config.graph_dir);
        std::ofstream dump(*config.graph_dir / (sanitize_file_name(q.query.id) + ".graph"));
        write_graph(dump, build_graph(model, params), index);
      }
      return rank_stochastic(model, params);
    }
    case RankerKind::random: {
      const auto ids = rs.doc_ids(index);
      const auto order = random_permutation(ids, config.seed, q.query.id, 0);
      std::vector<ScoredDoc> out;
      out.reserve(order.size());
      const double n = static_cast<double>(order.size());
      for (std::size_t i = 0; i < order.size(); ++i) {
        ScoredDoc s;
        s.doc = *index.find_document(order[i]);
        s.doc_id = order[i];
        s.score = (n - static_cast<double>(i)) / n;
        out.push_back(std::move(s));
      }
      return out;
    }
  }
  return {};
}

void cmd_index(const CorpusSource& source, const std::filesystem::path& out) {
  save_index(out, load_corpus(source));
}

void cmd_rank(const RunConfig& config, std::ostream& run_out, std::ostream& diag) {
  config.validate();
  const auto index = load_corpus(config.source);
  std::optional<CategoryMembership> membership;
  if (config.categories) membership = load_membership(*config.categories);
  const auto prepared =
      prepare_queries(index, load_queries(config.queries), membership ? &*membership : nullptr, diag);

  // Buffered per query, emitted in query-file order.
  std::vector<std::string> runs(prepared.size());
  std::vector<std::vector<std::string>> warnings(prepared.size());
  parallel_for(prepared.size(), config.threads, [&](std::size_t i) {
    if (prepared[i].result.empty()) return;
    const auto ranked = rank_query(index, prepared[i], config, &warnings[i]);
    std::ostringstream buf;
    write_run(buf, prepared[i].query.id, ranked, config.tag, config.verbose);
    runs[i] = buf.str();
  });
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    for (const auto& w : warnings[i]) diag << w << '\n';
    run_out << runs[i];
  }
}

EvalResult cmd_eval(const EvalConfig& config, std::ostream& diag) {
  const auto run = load_run(config.run);
  const auto qrels = load_qrels(config.qrels);
  if (config.cutoffs.empty()) throw Error("config", "at least one cutoff is required");
  for (auto k : config.cutoffs)
    if (k == 0) throw Error("config", "cutoffs must be positive");

  EvalResult result;
  result.metric = config.metric;
  const auto metrics = metrics_for_cutoffs(config.cutoffs);

  auto evaluate_run = [&](const RankedRun& r) {
    MetricReport report{metrics, {}};
    for (const auto& q : r.queries) {
      if (!qrels.has_query(q))
        diag << "warning: query " << q << " has no judgments; all documents graded 0\n";
      report.queries.push_back(evaluate_ranking(q, r.ranked_docs(q), qrels, metrics));
    }
    return report;
  };
  result.report = evaluate_run(run);

  if (config.baseline_trials) {
    MetricReport baseline{metrics, {}};
    for (const auto& q : run.queries)
      baseline.queries.push_back(
          random_baseline(q, run.ranked_docs(q), qrels, metrics, *config.baseline_trials, config.seed));
    result.baseline = std::move(baseline);
  }

  if (config.compare) {
    const auto other = load_run(*config.compare);
    auto compared = evaluate_run(other);
    const auto m = result.report.metric_index(config.metric);
    if (!m) throw Error("config", "unknown metric '" + config.metric + "' for comparison");
    // Pair on the queries present in both runs, in the first run's order.
    std::vector<double> a, b;
    for (std::size_t i = 0; i < result.report.queries.size(); ++i) {
      const auto& id = result.report.queries[i].query;
      const auto it = std::find_if(compared.queries.begin(), compared.queries.end(),
                                   [&](const QueryMetrics& qm) { return qm.query == id; });
      if (it == compared.queries.end()) {
        diag << "warning: query " << id << " is missing from " << config.compare->string()
             << "; left out of the t-test\n";
        continue;
      }
      a.push_back(result.report.queries[i].values[*m]);
      b.push_back(it->values[*m]);
    }
    result.ttest = paired_t_test(a, b);
    if (result.ttest->degenerate) diag << "warning: paired differences have zero variance\n";
    result.compared = std::move(compared);
  }
  return result;
}

namespace {

void write_table(std::ostream& out, const std::string& title, const MetricReport& report) {
  out << title << '\n' << "query";
  for (const auto& m : report.metrics) out << '\t' << m.name();
  out << '\n';
  char buf[32];
  auto row = [&](const std::string& label, const std::vector<double>& values) {
    out << label;
    for (double v : values) {
      std::snprintf(buf, sizeof(buf), "%.4f", v);
      out << '\t' << buf;
    }
    out << '\n';
  };
  for (const auto& q : report.queries) row(q.query, q.values);
  row("mean", report.mean());
}

void write_records_for(std::ostream& out, const std::string& run, const MetricReport& report) {
  using nlohmann::ordered_json;
  for (const auto& q : report.queries)
    for (std::size_t i = 0; i < report.metrics.size(); ++i)
      out << ordered_json{{"run", run}, {"query", q.query}, {"metric", report.metrics[i].name()},
                          {"value", q.values[i]}}
                 .dump()
          << '\n';
  const auto mean = report.mean();
  for (std::size_t i = 0; i < report.metrics.size(); ++i)
    out << ordered_json{{"run", run}, {"query", "mean"}, {"metric", report.metrics[i].name()},
                        {"value", mean[i]}}
               .dump()
        << '\n';
}

}  // namespace

void write_report(std::ostream& out, const EvalResult& result) {
  write_table(out, "run", result.report);
  if (result.baseline) {
    out << '\n';
    write_table(out, "random baseline", *result.baseline);
  }
  if (result.compared) {
    out << '\n';
    write_table(out, "compared run", *result.compared);
  }
  if (result.ttest) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "\npaired t-test on %s: t=%.6g p=%.6g n=%zu%s\n",
                  result.metric.c_str(), result.ttest->t, result.ttest->p, result.ttest->n,
                  result.ttest->degenerate ? " (degenerate)" : "");
    out << buf;
  }
}

void write_report_records(std::ostream& out, const EvalResult& result) {
  write_records_for(out, "run", result.report);
  if (result.baseline) write_records_for(out, "random", *result.baseline);
  if (result.compared) write_records_for(out, "compared", *result.compared);
  if (result.ttest) {
    nlohmann::ordered_json j{{"ttest", result.metric},
                             {"t", result.ttest->t},
                             {"p", result.ttest->p},
                             {"n", result.ttest->n},
                             {"degenerate", result.ttest->degenerate}};
    // JSON has no infinity; encode the sign as a string.
    if (std::isinf(result.ttest->t)) j["t"] = result.ttest->t > 0 ? "inf" : "-inf";
    out << j.dump() << '\n';
  }
}

SweepTable cmd_sweep(const SweepConfig& config, std::ostream& diag) {
  if (config.run.source.index) require_file(*config.run.source.index, "index");
  require_file(config.run.queries, "query");
  const auto index = load_corpus(config.run.source);
  std::optional<CategoryMembership> membership;
  if (config.run.categories) membership = load_membership(*config.run.categories);
  const auto qrels = load_qrels(config.qrels);
  const auto prepared = prepare_queries(index, load_queries(config.run.queries),
                                        membership ? &*membership : nullptr, diag);
  for (double r : config.grid.restarts) RwrParams{r, 1.0, config.grid.iterations, {}}.validate();
  for (double p : config.grid.p1s) RwrParams{0.0, p, config.grid.iterations, {}}.validate();

  std::vector<JudgedQuery> judged;
  for (const auto& pq : prepared) {
    if (pq.result.empty()) continue;
    if (!qrels.has_query(pq.query.id))
      diag << "warning: query " << pq.query.id << " has no judgments; all documents graded 0\n";
    judged.push_back(JudgedQuery{pq.result, pq.query.effective_type()});
  }
  return sweep(judged, index, qrels, config.grid, metrics_for_cutoffs(config.cutoffs));
}

void write_sweep_table(std::ostream& out, const SweepTable& table, const std::string& group) {
  out << "restart\tp1";
  for (const auto& m : table.metrics) out << '\t' << m.name();
  out << '\n';
  char buf[32];
  for (const auto& cell : table.cells) {
    std::snprintf(buf, sizeof(buf), "%.2f\t%.2f", cell.restart, cell.p1);
    out << buf;
    for (double v : cell.group_means.at(group)) {
      std::snprintf(buf, sizeof(buf), "%.4f", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

std::vector<std::filesystem::path> write_sweep_tables(const SweepTable& table,
                                                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& group : table.groups) {
    const auto path = dir / ("sweep_" + group + ".tsv");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot write " + path.string());
    write_sweep_table(out, table, group);
    written.push_back(path);
  }
  return written;
}

}  // namespace entrank
