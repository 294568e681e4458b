#include "entrank/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "entrank/error.hpp"
#include "entrank/triples.hpp"

namespace entrank {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return in;
}

Document parse_record(const std::string& line, const std::string& source, std::size_t lineno) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(source, lineno, std::string("malformed record: ") + e.what());
  }
  auto bad = [&](const std::string& what) { return ParseError(source, lineno, what); };

  if (!obj.is_object()) throw bad("record is not an object");
  const auto id = obj.find("id");
  if (id == obj.end() || !id->is_string() || trim(id->get<std::string>()).empty())
    throw bad("record needs a non-empty string \"id\"");

  Document doc;
  doc.id = trim(id->get<std::string>());

  const auto date = obj.find("date");
  if (date == obj.end() || !date->is_string())
    throw bad("document " + doc.id + ": missing \"date\"");
  const auto parsed = parse_date(trim(date->get<std::string>()));
  if (!parsed)
    throw bad("document " + doc.id + ": unparseable date '" + date->get<std::string>() + "'");
  doc.date = *parsed;

  if (const auto title = obj.find("title"); title != obj.end() && !title->is_null()) {
    if (!title->is_string()) throw bad("document " + doc.id + ": \"title\" must be a string");
    doc.title = title->get<std::string>();
  }

  const auto mentions = obj.find("mentions");
  if (mentions == obj.end() || !mentions->is_array())
    throw bad("document " + doc.id + ": \"mentions\" must be an array");
  for (const auto& m : *mentions) {
    if (!m.is_object()) throw bad("document " + doc.id + ": mention entry is not an object");
    const auto entity = m.find("entity");
    const auto count = m.find("count");
    if (entity == m.end() || !entity->is_string() || trim(entity->get<std::string>()).empty())
      throw bad("document " + doc.id + ": mention needs a non-empty \"entity\"");
    if (count == m.end() || !count->is_number_integer() || count->get<std::int64_t>() < 1 ||
        count->get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max())
      throw bad("document " + doc.id + ": mention \"count\" must be an integer >= 1");
    doc.mentions[EntityId{trim(entity->get<std::string>())}] +=
        static_cast<std::uint32_t>(count->get<std::int64_t>());
  }
  return doc;
}

std::string node_key(const Term& t) {
  return t.kind == Term::Kind::blank ? "_:" + t.value : t.value;
}

bool contains(const std::vector<std::string>& set, const std::string& v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}

void check_iri_safe(const std::string& value, const std::string& what) {
  if (value.find_first_of("<>\" \t\r\n") != std::string::npos)
    throw Error("format", what + " '" + value + "' cannot be written as an IRI");
}

}  // namespace

// ---------------------------------------------------------------------------
// CorpusIndex

std::optional<DocIndex> CorpusIndex::find_document(std::string_view id) const {
  const auto it = doc_lookup_.find(std::string(id));
  if (it == doc_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<EntityIndex> CorpusIndex::find_entity(const EntityId& e) const {
  const auto it = entity_lookup_.find(e.uri);
  if (it == entity_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<BucketIndex> CorpusIndex::find_bucket(const TimeBucket& t) const {
  const auto it = std::lower_bound(buckets_.begin(), buckets_.end(), t);
  if (it == buckets_.end() || it->key != t.key) return std::nullopt;
  return static_cast<BucketIndex>(it - buckets_.begin());
}

std::vector<std::string> CorpusIndex::doc_ids_for_entity(const EntityId& e) const {
  std::vector<std::string> out;
  if (const auto idx = find_entity(e))
    for (DocIndex d : docs_of(*idx)) out.push_back(documents_[d].id);
  return out;
}

std::vector<std::string> CorpusIndex::doc_ids_for_bucket(const TimeBucket& t) const {
  std::vector<std::string> out;
  if (const auto idx = find_bucket(t))
    for (DocIndex d : docs_in_bucket(*idx)) out.push_back(documents_[d].id);
  return out;
}

CorpusIndex build_index(std::vector<Document> docs, Granularity granularity) {
  CorpusIndex index;
  index.granularity_ = granularity;
  index.documents_ = std::move(docs);
  const auto n = index.documents_.size();

  index.doc_lookup_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& id = index.documents_[i].id;
    if (!index.doc_lookup_.emplace(id, static_cast<DocIndex>(i)).second)
      throw Error("corpus", "duplicate document id '" + id + "'");
  }

  // Entities in lexicographic order.
  std::vector<const EntityId*> all;
  for (const auto& doc : index.documents_)
    for (const auto& [e, count] : doc.mentions) all.push_back(&e);
  std::sort(all.begin(), all.end(), [](const EntityId* a, const EntityId* b) { return *a < *b; });
  all.erase(std::unique(all.begin(), all.end(),
                        [](const EntityId* a, const EntityId* b) { return *a == *b; }),
            all.end());
  index.entities_.reserve(all.size());
  index.entity_lookup_.reserve(all.size());
  for (const auto* e : all) {
    index.entity_lookup_.emplace(e->uri, static_cast<EntityIndex>(index.entities_.size()));
    index.entities_.push_back(*e);
  }

  // Buckets in key order.
  std::vector<TimeBucket> doc_keys;
  doc_keys.reserve(n);
  for (const auto& doc : index.documents_) doc_keys.push_back(bucketize(doc.date, granularity));
  index.buckets_ = doc_keys;
  std::sort(index.buckets_.begin(), index.buckets_.end());
  index.buckets_.erase(std::unique(index.buckets_.begin(), index.buckets_.end()),
                       index.buckets_.end());

  index.docs_by_entity_.assign(index.entities_.size(), {});
  index.docs_by_bucket_.assign(index.buckets_.size(), {});
  index.mentions_.resize(n);
  index.mention_totals_.assign(n, 0);
  index.doc_bucket_.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto d = static_cast<DocIndex>(i);
    auto& ments = index.mentions_[i];
    ments.reserve(index.documents_[i].mentions.size());
    // std::map iterates in EntityId order, which is also EntityIndex order.
    for (const auto& [e, count] : index.documents_[i].mentions) {
      if (count == 0)
        throw Error("corpus", "document '" + index.documents_[i].id + "' has a zero mention count");
      const EntityIndex ei = index.entity_lookup_.at(e.uri);
      ments.push_back(Mention{ei, count});
      index.mention_totals_[i] += count;
      index.docs_by_entity_[ei].push_back(d);
    }
    const auto t = *index.find_bucket(doc_keys[i]);
    index.doc_bucket_[i] = t;
    index.docs_by_bucket_[t].push_back(d);
  }
  return index;
}

// ---------------------------------------------------------------------------
// Records

std::vector<Document> read_records(std::istream& in, const std::string& source) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    Document doc = parse_record(line, source, lineno);
    if (!seen.insert(doc.id).second)
      throw ParseError(source, lineno, "duplicate document id '" + doc.id + "'");
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> ingest_records(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_records(in, path.string());
}

std::string to_record_line(const Document& doc) {
  json obj = json::object();
  obj["id"] = doc.id;
  obj["date"] = doc.date.to_string();
  if (doc.title) obj["title"] = *doc.title;
  json mentions = json::array();
  for (const auto& [e, count] : doc.mentions)
    mentions.push_back(json{{"entity", e.uri}, {"count", count}});
  obj["mentions"] = std::move(mentions);
  return obj.dump();
}

void write_records(std::ostream& out, std::span<const Document> docs) {
  for (const auto& doc : docs) out << to_record_line(doc) << '\n';
}

// ---------------------------------------------------------------------------
// Triples

TripleVocabulary TripleVocabulary::defaults() {
  TripleVocabulary v;
  v.date_predicates = {"http://purl.org/dc/terms/date", "http://purl.org/dc/elements/1.1/date"};
  v.title_predicates = {"http://purl.org/dc/terms/title", "http://purl.org/dc/elements/1.1/title"};
  v.mention_predicates = {"http://schema.org/mentions", "http://www.ics.forth.gr/isl/oae/core#mentions"};
  v.matched_uri_predicates = {"http://www.ics.forth.gr/isl/oae/core#hasMatchedURI"};
  v.prefixes = {
      {"dc", "http://purl.org/dc/terms/"},
      {"dcterms", "http://purl.org/dc/terms/"},
      {"schema", "http://schema.org/"},
      {"oae", "http://www.ics.forth.gr/isl/oae/core#"},
      {"dbr", "http://dbpedia.org/resource/"},
      {"dbc", "http://dbpedia.org/resource/Category:"},
      {"xsd", "http://www.w3.org/2001/XMLSchema#"},
  };
  return v;
}

std::vector<Document> read_triples(std::istream& in, const std::string& source,
                                   const TripleVocabulary& vocab) {
  struct Pending {
    std::string doc;
    std::optional<Date> date;
    std::optional<std::string> title;
    std::vector<std::string> mention_nodes;
  };
  std::vector<Pending> pending;
  std::unordered_map<std::string, std::size_t> doc_slot;
  auto slot = [&](const std::string& id) -> Pending& {
    auto [it, inserted] = doc_slot.emplace(id, pending.size());
    if (inserted) pending.push_back(Pending{id, {}, {}, {}});
    return pending[it->second];
  };

  // Matched-URI statements are only resolved once every document link is known.
  std::vector<std::pair<std::string, std::string>> matched;

  auto prefixes = vocab.prefixes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::optional<Triple> t;
    try {
      t = parse_triple_line(line, prefixes);
    } catch (const std::invalid_argument& e) {
      throw ParseError(source, lineno, std::string("invalid triple: ") + e.what());
    }
    if (!t) continue;
    const auto& pred = t->predicate.value;

    if (contains(vocab.date_predicates, pred)) {
      auto& p = slot(node_key(t->subject));
      if (t->object.kind != Term::Kind::literal)
        throw ParseError(source, lineno, "document " + p.doc + ": date must be a literal");
      const auto date = parse_date(trim(t->object.value));
      if (!date)
        throw ParseError(source, lineno,
                         "document " + p.doc + ": unparseable date '" + t->object.value + "'");
      p.date = date;
    } else if (contains(vocab.title_predicates, pred)) {
      auto& p = slot(node_key(t->subject));
      if (t->object.kind == Term::Kind::literal) p.title = t->object.value;
    } else if (contains(vocab.mention_predicates, pred)) {
      auto& p = slot(node_key(t->subject));
      if (t->object.kind == Term::Kind::literal)
        throw ParseError(source, lineno, "document " + p.doc + ": mention object must be a node");
      p.mention_nodes.push_back(node_key(t->object));
    } else if (contains(vocab.matched_uri_predicates, pred)) {
      if (t->object.kind != Term::Kind::iri)
        throw ParseError(source, lineno, "matched URI must be an IRI");
      matched.emplace_back(node_key(t->subject), trim(t->object.value));
    }
  }

  std::unordered_map<std::string, std::string> resolved;
  resolved.reserve(matched.size());
  for (auto& [node, entity] : matched) resolved.emplace(std::move(node), std::move(entity));

  std::vector<Document> docs;
  docs.reserve(pending.size());
  for (auto& p : pending) {
    if (!p.date)
      throw ParseError(source, 0, "document " + p.doc + " has no date triple");
    Document doc;
    doc.id = p.doc;
    doc.date = *p.date;
    doc.title = std::move(p.title);
    for (const auto& node : p.mention_nodes) {
      const auto it = resolved.find(node);
      if (it != resolved.end() && !it->second.empty()) doc.mentions[EntityId{it->second}] += 1;
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> ingest_triples(const std::filesystem::path& path,
                                     const TripleVocabulary& vocab) {
  auto in = open_input(path);
  return read_triples(in, path.string(), vocab);
}

void write_triples(std::ostream& out, std::span<const Document> docs,
                   const TripleVocabulary& vocab) {
  if (vocab.date_predicates.empty() || vocab.mention_predicates.empty() ||
      vocab.matched_uri_predicates.empty())
    throw Error("format", "triple vocabulary lacks a required predicate");
  const auto& date_p = vocab.date_predicates.front();
  const auto& mention_p = vocab.mention_predicates.front();
  const auto& match_p = vocab.matched_uri_predicates.front();

  std::size_t node = 0;
  for (const auto& doc : docs) {
    check_iri_safe(doc.id, "document id");
    out << '<' << doc.id << "> <" << date_p << "> \"" << doc.date.to_string()
        << "\"^^<http://www.w3.org/2001/XMLSchema#date> .\n";
    if (doc.title && !vocab.title_predicates.empty())
      out << '<' << doc.id << "> <" << vocab.title_predicates.front() << "> \""
          << escape_literal(*doc.title) << "\" .\n";
    for (const auto& [e, count] : doc.mentions) {
      check_iri_safe(e.uri, "entity");
      for (std::uint32_t k = 0; k < count; ++k, ++node) {
        out << '<' << doc.id << "> <" << mention_p << "> _:m" << node << " .\n";
        out << "_:m" << node << " <" << match_p << "> <" << e.uri << "> .\n";
      }
    }
  }
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view text) {
  if (text == "records") return CorpusFormat::records;
  if (text == "triples") return CorpusFormat::triples;
  return std::nullopt;
}

std::vector<Document> ingest(const std::filesystem::path& path, CorpusFormat format) {
  return format == CorpusFormat::records ? ingest_records(path) : ingest_triples(path);
}

}  // namespace entrank
