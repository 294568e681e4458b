#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "entrank/date.hpp"

namespace entrank {

/// Knowledge-base identity of an entity. Compared byte-exactly.
struct EntityId {
  std::string uri;

  EntityId() = default;
  explicit EntityId(std::string u) : uri(std::move(u)) {}

  auto operator<=>(const EntityId&) const = default;
};

struct Document {
  std::string id;
  Date date;
  std::optional<std::string> title;
  std::map<EntityId, std::uint32_t> mentions;  // count(e, d) >= 1

  bool operator==(const Document&) const = default;
};

using DocIndex = std::uint32_t;
using EntityIndex = std::uint32_t;
using BucketIndex = std::uint32_t;

struct Mention {
  EntityIndex entity;
  std::uint32_t count;
};

/// Immutable inverted structures over a document collection:
/// docs(e), docs(t), ents(d) and count(e, d).
///
/// Documents keep their input order (DocIndex = position). Entities are
/// interned in lexicographic URI order and buckets in key order, so every
/// index built from the same documents is identical.
class CorpusIndex {
 public:
  CorpusIndex() = default;

  Granularity granularity() const { return granularity_; }

  std::size_t document_count() const { return documents_.size(); }
  const Document& document(DocIndex d) const { return documents_[d]; }
  std::span<const Document> documents() const { return documents_; }
  std::optional<DocIndex> find_document(std::string_view id) const;

  std::size_t entity_count() const { return entities_.size(); }
  const EntityId& entity(EntityIndex e) const { return entities_[e]; }
  std::optional<EntityIndex> find_entity(const EntityId& e) const;

  /// docs(e), ascending DocIndex.
  std::span<const DocIndex> docs_of(EntityIndex e) const { return docs_by_entity_[e]; }
  /// ents(d) with counts, ascending EntityIndex.
  std::span<const Mention> mentions_of(DocIndex d) const { return mentions_[d]; }
  std::uint64_t total_mentions(DocIndex d) const { return mention_totals_[d]; }

  std::size_t bucket_count() const { return buckets_.size(); }
  const TimeBucket& bucket(BucketIndex t) const { return buckets_[t]; }
  BucketIndex bucket_of(DocIndex d) const { return doc_bucket_[d]; }
  /// docs(t), ascending DocIndex.
  std::span<const DocIndex> docs_in_bucket(BucketIndex t) const { return docs_by_bucket_[t]; }
  std::optional<BucketIndex> find_bucket(const TimeBucket& t) const;

  /// docs(e) as document ids (empty when e is unknown).
  std::vector<std::string> doc_ids_for_entity(const EntityId& e) const;
  /// docs(t) as document ids (empty when no document falls in t).
  std::vector<std::string> doc_ids_for_bucket(const TimeBucket& t) const;

  friend CorpusIndex build_index(std::vector<Document> docs, Granularity granularity);

 private:
  Granularity granularity_ = Granularity::day;
  std::vector<Document> documents_;
  std::unordered_map<std::string, DocIndex> doc_lookup_;
  std::vector<EntityId> entities_;
  std::unordered_map<std::string, EntityIndex> entity_lookup_;
  std::vector<std::vector<DocIndex>> docs_by_entity_;
  std::vector<std::vector<Mention>> mentions_;
  std::vector<std::uint64_t> mention_totals_;
  std::vector<TimeBucket> buckets_;
  std::vector<BucketIndex> doc_bucket_;
  std::vector<std::vector<DocIndex>> docs_by_bucket_;
};

/// Throws entrank::Error on duplicate document ids.
CorpusIndex build_index(std::vector<Document> docs, Granularity granularity = Granularity::day);

// ---------------------------------------------------------------------------
// Record format: one JSON object per line,
//   {"id":..., "date":"YYYY-MM-DD", "title":..., "mentions":[{"entity":..., "count":n}, ...]}

std::vector<Document> read_records(std::istream& in, const std::string& source = {});
std::vector<Document> ingest_records(const std::filesystem::path& path);

/// Serializes one document as a single record line (no trailing newline).
std::string to_record_line(const Document& doc);
void write_records(std::ostream& out, std::span<const Document> docs);

// ---------------------------------------------------------------------------
// Triple format: line-oriented `<s> <p> <o> .` statements.

/// Predicate IRIs recognized by the triple reader, plus the prefix table used
/// to expand `prefix:local` names in the input.
struct TripleVocabulary {
  std::vector<std::string> date_predicates;
  std::vector<std::string> title_predicates;
  std::vector<std::string> mention_predicates;
  std::vector<std::string> matched_uri_predicates;
  std::map<std::string, std::string> prefixes;

  static TripleVocabulary defaults();
};

std::vector<Document> read_triples(std::istream& in, const std::string& source = {},
                                   const TripleVocabulary& vocab = TripleVocabulary::defaults());
std::vector<Document> ingest_triples(const std::filesystem::path& path,
                                     const TripleVocabulary& vocab = TripleVocabulary::defaults());

/// Writes documents as triples using the first IRI of each vocabulary role.
/// Each mention occurrence becomes its own mention node.
void write_triples(std::ostream& out, std::span<const Document> docs,
                   const TripleVocabulary& vocab = TripleVocabulary::defaults());

enum class CorpusFormat { records, triples };
std::optional<CorpusFormat> parse_corpus_format(std::string_view text);

std::vector<Document> ingest(const std::filesystem::path& path, CorpusFormat format);

}  // namespace entrank

template <>
struct std::hash<entrank::EntityId> {
  std::size_t operator()(const entrank::EntityId& e) const noexcept {
    return std::hash<std::string>{}(e.uri);
  }
};
