#include "entrank/trec_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "entrank/error.hpp"

namespace entrank {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

bool skip_line(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r\n");
  return first == std::string::npos || line[first] == '#';
}

template <class T>
bool parse_number(const std::string& text, T& value) {
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Qrels read_qrels(std::istream& in, const std::string& source) {
  Qrels qrels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    const auto cols = split_ws(line);
    if (cols.size() != 4) throw ParseError(source, lineno, "expected 'query 0 doc grade'");
    int grade = 0;
    if (!parse_number(cols[3], grade) || grade < 0 || grade > 3)
      throw ParseError(source, lineno, "grade must be an integer in [0, 3]");
    qrels.set(cols[0], cols[2], grade);
  }
  return qrels;
}

Qrels load_qrels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return read_qrels(in, path.string());
}

std::vector<std::string> RankedRun::ranked_docs(const std::string& query) const {
  std::vector<std::string> out;
  if (const auto it = entries.find(query); it != entries.end())
    for (const auto& e : it->second) out.push_back(e.doc);
  return out;
}

RankedRun read_run(std::istream& in, const std::string& source) {
  RankedRun run;
  std::map<std::string, std::unordered_set<std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (skip_line(line)) continue;
    const auto cols = split_ws(line);
    if (cols.size() != 6) throw ParseError(source, lineno, "expected 'query Q0 doc rank score tag'");
    RunEntry e;
    e.doc = cols[2];
    if (!parse_number(cols[3], e.rank) || e.rank == 0)
      throw ParseError(source, lineno, "rank must be a positive integer");
    if (!parse_number(cols[4], e.score)) throw ParseError(source, lineno, "score must be a number");
    if (!seen[cols[0]].insert(e.doc).second)
      throw ParseError(source, lineno, "document " + e.doc + " repeated for query " + cols[0]);
    if (!run.entries.count(cols[0])) run.queries.push_back(cols[0]);
    run.entries[cols[0]].push_back(std::move(e));
    if (run.tag.empty()) run.tag = cols[5];
  }
  for (auto& [q, list] : run.entries)
    std::stable_sort(list.begin(), list.end(),
                     [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
  return run;
}

RankedRun load_run(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return read_run(in, path.string());
}

void write_run(std::ostream& out, const std::string& query, std::span<const ScoredDoc> ranked,
               const std::string& tag, bool verbose) {
  std::size_t rank = 0;
  for (const auto& s : ranked) {
    ++rank;
    if (verbose)
      out << "# " << query << ' ' << s.doc_id << " relativeness=" << format_number(s.raw.relativeness)
          << " timeliness=" << format_number(s.raw.timeliness)
          << " relatedness=" << format_number(s.raw.relatedness) << '\n';
    out << query << " Q0 " << s.doc_id << ' ' << rank << ' ' << format_number(s.score) << ' ' << tag
        << '\n';
  }
}

}  // namespace entrank
