// entrank: index, rank and evaluate entity-annotated document archives.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "entrank/app.hpp"
#include "entrank/error.hpp"

namespace {

using namespace entrank;

std::vector<std::size_t> parse_cutoffs(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const auto k = std::stoul(item, &pos);
    if (pos != item.size() || k == 0) throw Error("config", "bad cutoff '" + item + "'");
    out.push_back(k);
  }
  if (out.empty()) throw Error("config", "empty cutoff list");
  return out;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw Error("config", "bad grid value '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw Error("config", "empty grid");
  return out;
}

struct SourceFlags {
  std::string index;
  std::vector<std::string> corpus;
  std::string format = "records";
  std::string granularity;

  void add(CLI::App* cmd, bool allow_index) {
    if (allow_index) cmd->add_option("--index", index, "Index snapshot written by `index`");
    cmd->add_option("--corpus", corpus, "Corpus file(s)");
    cmd->add_option("--format", format, "Corpus format: records | triples");
    cmd->add_option("--granularity", granularity, "Time bucket: day | month | year");
  }

  CorpusSource resolve() const {
    CorpusSource s;
    if (!index.empty()) s.index = index;
    for (const auto& c : corpus) s.corpus.emplace_back(c);
    const auto f = parse_corpus_format(format);
    if (!f) throw Error("config", "unknown corpus format '" + format + "'");
    s.format = *f;
    if (!granularity.empty()) {
      const auto g = parse_granularity(granularity);
      if (!g) throw Error("config", "unknown granularity '" + granularity + "'");
      s.granularity = g;
    }
    return s;
  }
};

struct RankFlags {
  SourceFlags source;
  std::string queries;
  std::string categories;
  std::string ranker = "prob";
  std::string factors;
  double restart = 0.2;
  double p1 = 1.0;
  int iterations = 30;
  std::uint64_t seed = 0;
  std::string tag = "entrank";
  bool verbose = false;
  std::string graph_dir;
  unsigned threads = 1;
  CLI::Option* p1_opt = nullptr;

  void add(CLI::App* cmd, bool ranking) {
    source.add(cmd, true);
    cmd->add_option("--queries", queries, "Query file")->required();
    cmd->add_option("--categories", categories, "Category membership file");
    cmd->add_option("--iterations", iterations, "Random-walk iterations");
    cmd->add_option("--threads", threads, "Worker threads");
    if (!ranking) return;
    cmd->add_option("--ranker", ranker, "prob | rwr | random");
    cmd->add_option("--factors", factors, "Probabilistic factors from {A,B,C}, e.g. AC");
    cmd->add_option("--restart", restart, "Restart probability");
    p1_opt = cmd->add_option("--p1", p1, "Query entity to document probability");
    cmd->add_option("--seed", seed, "Seed for the random ranker");
    cmd->add_option("--tag", tag, "Run tag");
    cmd->add_flag("--verbose", verbose, "Emit factor breakdowns as comment lines");
    cmd->add_option("--graph-dir", graph_dir, "Dump transition graphs here (rwr)");
  }

  RunConfig resolve() const {
    RunConfig c;
    c.source = source.resolve();
    c.queries = queries;
    if (!categories.empty()) c.categories = categories;
    const auto r = parse_ranker(ranker);
    if (!r) throw Error("config", "unknown ranker '" + ranker + "'");
    c.ranker = *r;
    if (!factors.empty()) {
      const auto f = FactorSelection::parse(factors);
      if (!f) throw Error("config", "bad factor selection '" + factors + "'");
      c.factors = f;
    }
    c.rwr.restart = restart;
    c.rwr.p1 = p1;
    c.rwr.iterations = iterations;
    c.p1_given = p1_opt && p1_opt->count() > 0;
    c.seed = seed;
    c.tag = tag;
    c.verbose = verbose;
    if (!graph_dir.empty()) c.graph_dir = graph_dir;
    c.threads = std::max(1u, threads);
    return c;
  }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rank documents returned by entity-temporal queries over an annotated archive"};
  app.require_subcommand(1);

  auto* index_cmd = app.add_subcommand("index", "Ingest a corpus and write an index snapshot");
  SourceFlags index_src;
  std::string index_out;
  index_src.add(index_cmd, false);
  index_cmd->add_option("--out", index_out, "Snapshot path")->required();

  auto* rank_cmd = app.add_subcommand("rank", "Rank the results of every query into a run file");
  RankFlags rank_flags;
  std::string rank_out;
  rank_flags.add(rank_cmd, true);
  rank_cmd->add_option("--out", rank_out, "Run file (default: stdout)");

  auto* eval_cmd = app.add_subcommand("eval", "Score a run against graded judgments");
  EvalConfig eval_cfg;
  std::string eval_run, eval_qrels, eval_k = "5,10", eval_compare, eval_out, eval_records;
  std::uint32_t baseline_trials = 0;
  eval_cmd->add_option("--run", eval_run, "Run file")->required();
  eval_cmd->add_option("--qrels", eval_qrels, "Judgment file")->required();
  eval_cmd->add_option("--k", eval_k, "Comma-separated cutoffs");
  eval_cmd->add_option("--compare", eval_compare, "Second run for a paired t-test");
  eval_cmd->add_option("--metric", eval_cfg.metric, "Metric for the t-test");
  eval_cmd->add_option("--trials", baseline_trials, "Also report a random baseline over this many shuffles");
  eval_cmd->add_option("--seed", eval_cfg.seed, "Seed for the random baseline");
  eval_cmd->add_option("--out", eval_out, "Report table (default: stdout)");
  eval_cmd->add_option("--records", eval_records, "Line-delimited metric records");

  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate the random walk over a parameter grid");
  RankFlags sweep_flags;
  std::string sweep_qrels, sweep_out, sweep_k = "5,10", sweep_restarts = "0,0.2,0.4,0.6,0.8",
                                      sweep_p1s = "0,0.2,0.4,0.6,0.8,1";
  sweep_flags.add(sweep_cmd, false);
  sweep_cmd->add_option("--qrels", sweep_qrels, "Judgment file")->required();
  sweep_cmd->add_option("--restarts", sweep_restarts, "Comma-separated restart probabilities");
  sweep_cmd->add_option("--p1s", sweep_p1s, "Comma-separated p1 values");
  sweep_cmd->add_option("--k", sweep_k, "Comma-separated cutoffs");
  sweep_cmd->add_option("--out-dir", sweep_out, "Directory for the tables")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << nlohmann::json{{"error", "usage"}, {"message", e.what()}}.dump() << '\n';
    return 2;
  }

  try {
    if (index_cmd->parsed()) {
      cmd_index(index_src.resolve(), index_out);
    } else if (rank_cmd->parsed()) {
      const auto cfg = rank_flags.resolve();
      cfg.validate();
      if (rank_out.empty()) {
        cmd_rank(cfg, std::cout, std::cerr);
      } else {
        std::ostringstream buf;
        cmd_rank(cfg, buf, std::cerr);
        open_output(rank_out) << buf.str();
      }
    } else if (eval_cmd->parsed()) {
      eval_cfg.run = eval_run;
      eval_cfg.qrels = eval_qrels;
      eval_cfg.cutoffs = parse_cutoffs(eval_k);
      if (!eval_compare.empty()) eval_cfg.compare = eval_compare;
      if (baseline_trials > 0) eval_cfg.baseline_trials = baseline_trials;
      const auto result = cmd_eval(eval_cfg, std::cerr);
      if (eval_out.empty()) {
        write_report(std::cout, result);
      } else {
        auto out = open_output(eval_out);
        write_report(out, result);
      }
      if (!eval_records.empty()) {
        auto out = open_output(eval_records);
        write_report_records(out, result);
      }
    } else if (sweep_cmd->parsed()) {
      SweepConfig cfg;
      cfg.run = sweep_flags.resolve();
      cfg.qrels = sweep_qrels;
      cfg.grid.restarts = parse_grid(sweep_restarts);
      cfg.grid.p1s = parse_grid(sweep_p1s);
      cfg.grid.iterations = sweep_flags.iterations;
      cfg.cutoffs = parse_cutoffs(sweep_k);
      const auto table = cmd_sweep(cfg, std::cerr);
      for (const auto& p : write_sweep_tables(table, sweep_out)) std::cout << p.string() << '\n';
    }
  } catch (const Error& e) {
    std::cerr << nlohmann::json{{"error", e.kind()}, {"message", e.what()}}.dump() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 0;
}
