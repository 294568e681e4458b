#include "entrank/snapshot.hpp"

#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "entrank/error.hpp"

namespace entrank {

using nlohmann::json;

void save_index(std::ostream& out, const CorpusIndex& index) {
  const json header{{"format", kSnapshotFormat},
                    {"version", kSnapshotVersion},
                    {"granularity", std::string(to_string(index.granularity()))},
                    {"documents", index.document_count()}};
  out << header.dump() << '\n';
  write_records(out, index.documents());
}

void save_index(const std::filesystem::path& path, const CorpusIndex& index) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io", "cannot write " + path.string());
  save_index(out, index);
  if (!out) throw Error("io", "failed writing " + path.string());
}

CorpusIndex load_index(std::istream& in, const std::string& source,
                       std::optional<Granularity> granularity) {
  std::string first;
  if (!std::getline(in, first)) throw ParseError(source, 1, "empty snapshot");
  json header;
  try {
    header = json::parse(first);
  } catch (const json::parse_error&) {
    throw Error("version", source + ": not an index snapshot (missing header)");
  }
  if (!header.is_object() || header.value("format", std::string{}) != kSnapshotFormat)
    throw Error("version", source + ": not an index snapshot");
  const auto version = header.value("version", -1);
  if (version != kSnapshotVersion)
    throw Error("version", source + ": snapshot version " + std::to_string(version) +
                               " is not supported (expected " +
                               std::to_string(kSnapshotVersion) + ")");
  const auto stored = parse_granularity(header.value("granularity", std::string{}));
  if (!stored) throw ParseError(source, 1, "snapshot header has an unknown granularity");

  // Records start on line 2; shift reported line numbers accordingly.
  std::istringstream rest('\n' + std::string(std::istreambuf_iterator<char>(in), {}));
  auto docs = read_records(rest, source);
  const auto expected = header.value("documents", static_cast<std::size_t>(docs.size()));
  if (expected != docs.size())
    throw ParseError(source, 0,
                     "snapshot declares " + std::to_string(expected) + " documents but holds " +
                         std::to_string(docs.size()));
  return build_index(std::move(docs), granularity.value_or(*stored));
}

CorpusIndex load_index(const std::filesystem::path& path, std::optional<Granularity> granularity) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot open " + path.string());
  return load_index(in, path.string(), granularity);
}

}  // namespace entrank
