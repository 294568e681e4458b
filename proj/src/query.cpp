#include "entrank/query.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <unordered_set>

#include <json.hpp>

#include "entrank/error.hpp"

namespace entrank {

namespace {

using nlohmann::json;

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

json parse_line(const std::string& line, const std::string& source, std::size_t lineno) {
  try {
    auto obj = json::parse(line);
    if (!obj.is_object()) throw ParseError(source, lineno, "line is not an object");
    return obj;
  } catch (const json::parse_error& e) {
    throw ParseError(source, lineno, std::string("malformed line: ") + e.what());
  }
}

std::string iri_field(const json& v, const std::string& source, std::size_t lineno,
                      const char* what) {
  if (!v.is_string() || trim(v.get<std::string>()).empty())
    throw ParseError(source, lineno, std::string(what) + " must be a non-empty string");
  return trim(v.get<std::string>());
}

void normalize_entities(std::vector<EntityId>& entities) {
  std::sort(entities.begin(), entities.end());
  entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
}

}  // namespace

std::string_view to_string(Semantics s) {
  return s == Semantics::conjunctive ? "and" : "or";
}

std::string_view to_string(QueryType t) {
  switch (t) {
    case QueryType::single:
      return "single";
    case QueryType::and_:
      return "and";
    case QueryType::or_:
      return "or";
    case QueryType::category:
      return "category";
  }
  return "single";
}

std::optional<QueryType> parse_query_type(std::string_view text) {
  if (text == "single") return QueryType::single;
  if (text == "and") return QueryType::and_;
  if (text == "or") return QueryType::or_;
  if (text == "category") return QueryType::category;
  return std::nullopt;
}

QueryType Query::effective_type() const {
  if (type) return *type;
  if (category) return QueryType::category;
  if (entities.size() == 1) return QueryType::single;
  return semantics == Semantics::conjunctive ? QueryType::and_ : QueryType::or_;
}

// ---------------------------------------------------------------------------

void CategoryMembership::add(const EntityId& category, const EntityId& member) {
  members_[category].insert(member);
}

std::set<EntityId> CategoryMembership::members(const EntityId& category) const {
  const auto it = members_.find(category);
  return it == members_.end() ? std::set<EntityId>{} : it->second;
}

CategoryMembership read_membership(std::istream& in, const std::string& source) {
  CategoryMembership out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const json obj = parse_line(line, source, lineno);
    const auto cat = obj.find("category");
    const auto members = obj.find("members");
    if (cat == obj.end()) throw ParseError(source, lineno, "missing \"category\"");
    if (members == obj.end() || !members->is_array())
      throw ParseError(source, lineno, "\"members\" must be an array");
    const EntityId category{iri_field(*cat, source, lineno, "\"category\"")};
    for (const auto& m : *members)
      out.add(category, EntityId{iri_field(m, source, lineno, "member")});
  }
  return out;
}

CategoryMembership load_membership(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return read_membership(in, path.string());
}

std::set<EntityId> expand_category(const EntityId& category, const CategoryMembership& membership) {
  return membership.members(category);
}

std::set<EntityId> expand_category(const EntityId& category,
                                   const std::filesystem::path& membership_file) {
  return load_membership(membership_file).members(category);
}

std::vector<Query> read_queries(std::istream& in, const std::string& source) {
  std::vector<Query> out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    const json obj = parse_line(line, source, lineno);
    Query q;

    const auto id = obj.find("id");
    if (id == obj.end()) throw ParseError(source, lineno, "missing \"id\"");
    q.id = iri_field(*id, source, lineno, "\"id\"");
    if (!seen.insert(q.id).second)
      throw ParseError(source, lineno, "duplicate query id '" + q.id + "'");

    if (const auto cat = obj.find("category"); cat != obj.end() && !cat->is_null())
      q.category = EntityId{iri_field(*cat, source, lineno, "\"category\"")};

    const auto sem = obj.find("semantics");
    if (sem != obj.end()) {
      const std::string s = sem->is_string() ? sem->get<std::string>() : std::string{};
      if (s == "and") q.semantics = Semantics::conjunctive;
      else if (s == "or") q.semantics = Semantics::disjunctive;
      else throw ParseError(source, lineno, "\"semantics\" must be \"and\" or \"or\"");
    } else if (q.category) {
      q.semantics = Semantics::disjunctive;
    } else {
      throw ParseError(source, lineno, "missing \"semantics\"");
    }

    if (const auto ents = obj.find("entities"); ents != obj.end()) {
      if (!ents->is_array()) throw ParseError(source, lineno, "\"entities\" must be an array");
      for (const auto& e : *ents) q.entities.emplace_back(iri_field(e, source, lineno, "entity"));
    }
    normalize_entities(q.entities);
    if (q.entities.empty() && !q.category)
      throw ParseError(source, lineno, "query " + q.id + " has neither entities nor a category");

    const auto time = obj.find("time");
    if (time == obj.end() || !time->is_object())
      throw ParseError(source, lineno, "query " + q.id + ": missing \"time\" object");
    auto date_field = [&](const char* key) {
      const auto f = time->find(key);
      if (f == time->end() || !f->is_string())
        throw ParseError(source, lineno, "query " + q.id + ": missing time." + key);
      const auto d = parse_date(trim(f->get<std::string>()));
      if (!d)
        throw ParseError(source, lineno,
                         "query " + q.id + ": unparseable date '" + f->get<std::string>() + "'");
      return *d;
    };
    q.time_start = date_field("start");
    q.time_end = date_field("end");
    if (q.time_end < q.time_start)
      throw ParseError(source, lineno, "query " + q.id + ": time.start is after time.end");

    if (const auto type = obj.find("type"); type != obj.end() && !type->is_null()) {
      const auto t = type->is_string() ? parse_query_type(type->get<std::string>()) : std::nullopt;
      if (!t) throw ParseError(source, lineno, "query " + q.id + ": unknown \"type\"");
      q.type = t;
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Query> load_queries(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io", "cannot open " + path.string());
  return read_queries(in, path.string());
}

void resolve_category(Query& q, const CategoryMembership& membership) {
  if (!q.category) return;
  for (const auto& m : membership.members(*q.category)) q.entities.push_back(m);
  normalize_entities(q.entities);
  q.semantics = Semantics::disjunctive;
}

// ---------------------------------------------------------------------------

std::vector<std::string> ResultSet::doc_ids(const CorpusIndex& index) const {
  std::vector<std::string> out;
  out.reserve(docs.size());
  for (DocIndex d : docs) out.push_back(index.document(d).id);
  return out;
}

ResultSet match(const CorpusIndex& index, const Query& q) {
  if (q.entities.empty()) throw Error("query", "query " + q.id + " has no entities");
  if (q.time_end < q.time_start) throw Error("query", "query " + q.id + " has an inverted interval");

  ResultSet rs;
  rs.query = q;
  normalize_entities(rs.query.entities);
  bool missing = false;
  for (const auto& e : rs.query.entities) {
    if (const auto idx = index.find_entity(e)) rs.query_entities.push_back(*idx);
    else missing = true;
  }
  std::sort(rs.query_entities.begin(), rs.query_entities.end());

  std::vector<DocIndex> candidates;
  if (q.semantics == Semantics::conjunctive) {
    if (!missing && !rs.query_entities.empty()) {
      // Intersect starting from the rarest entity.
      auto order = rs.query_entities;
      std::sort(order.begin(), order.end(), [&](EntityIndex a, EntityIndex b) {
        return index.docs_of(a).size() < index.docs_of(b).size();
      });
      const auto first = index.docs_of(order.front());
      candidates.assign(first.begin(), first.end());
      std::vector<DocIndex> next;
      for (std::size_t i = 1; i < order.size() && !candidates.empty(); ++i) {
        const auto other = index.docs_of(order[i]);
        next.clear();
        std::set_intersection(candidates.begin(), candidates.end(), other.begin(), other.end(),
                              std::back_inserter(next));
        candidates.swap(next);
      }
    }
  } else {
    for (EntityIndex e : rs.query_entities) {
      const auto docs = index.docs_of(e);
      candidates.insert(candidates.end(), docs.begin(), docs.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }

  for (DocIndex d : candidates)
    if (q.in_range(index.document(d).date)) rs.docs.push_back(d);

  std::vector<char> is_query(index.entity_count(), 0);
  for (EntityIndex e : rs.query_entities) is_query[e] = 1;
  std::vector<char> seen(index.entity_count(), 0);
  for (DocIndex d : rs.docs)
    for (const auto& m : index.mentions_of(d))
      if (!is_query[m.entity] && !seen[m.entity]) {
        seen[m.entity] = 1;
        rs.related.push_back(m.entity);
      }
  std::sort(rs.related.begin(), rs.related.end());
  return rs;
}

}  // namespace entrank
