#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "entrank/corpus.hpp"

namespace entrank {

inline constexpr const char* kSnapshotFormat = "entrank-index";
inline constexpr int kSnapshotVersion = 1;

/// Line-delimited snapshot: a header object carrying the format tag, version,
/// granularity and document count, then one record line per document.
void save_index(std::ostream& out, const CorpusIndex& index);
void save_index(const std::filesystem::path& path, const CorpusIndex& index);

/// Rebuilds the index from a snapshot. `granularity` overrides the stored one.
/// Throws entrank::Error("version") when the format tag or version differ.
CorpusIndex load_index(std::istream& in, const std::string& source = {},
                       std::optional<Granularity> granularity = std::nullopt);
CorpusIndex load_index(const std::filesystem::path& path,
                       std::optional<Granularity> granularity = std::nullopt);

}  // namespace entrank
