#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "entrank/eval.hpp"
#include "entrank/prob_rank.hpp"

namespace entrank {

/// `queryId 0 docId grade` lines. Blank and '#' lines are skipped.
Qrels read_qrels(std::istream& in, const std::string& source = {});
Qrels load_qrels(const std::filesystem::path& path);

struct RunEntry {
  std::string doc;
  std::size_t rank = 0;
  double score = 0.0;
};

struct RankedRun {
  std::vector<std::string> queries;  // file order
  std::map<std::string, std::vector<RunEntry>> entries;  // sorted by rank
  std::string tag;

  std::vector<std::string> ranked_docs(const std::string& query) const;
};

/// `queryId Q0 docId rank score tag` lines. '#' lines carry comments.
RankedRun read_run(std::istream& in, const std::string& source = {});
RankedRun load_run(const std::filesystem::path& path);

/// Writes one query's ranking. With `verbose`, each line is preceded by a
/// '#' comment holding the raw factor scores.
void write_run(std::ostream& out, const std::string& query, std::span<const ScoredDoc> ranked,
               const std::string& tag, bool verbose = false);

/// Fixed-format number used in every data output ("%.17g").
std::string format_number(double v);

}  // namespace entrank
