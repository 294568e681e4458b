#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "entrank/corpus.hpp"

namespace entrank {

enum class Semantics { conjunctive, disjunctive };  // AND / OR

/// Report grouping label. Carries no ranking semantics.
enum class QueryType { single, and_, or_, category };

std::string_view to_string(Semantics s);
std::string_view to_string(QueryType t);
std::optional<QueryType> parse_query_type(std::string_view text);

struct Query {
  std::string id;
  Semantics semantics = Semantics::conjunctive;
  std::vector<EntityId> entities;  // E_Q: sorted, unique
  Date time_start;                 // T_Q, inclusive on both ends
  Date time_end;
  std::optional<EntityId> category;
  std::optional<QueryType> type;  // declared tag, if any

  /// Declared type, else inferred from structure.
  QueryType effective_type() const;
  bool in_range(const Date& d) const { return time_start <= d && d <= time_end; }
};

/// Category → members, as loaded from a membership file. Repeated
/// categories are unioned.
class CategoryMembership {
 public:
  void add(const EntityId& category, const EntityId& member);
  /// Members of `category`; empty when the category is unknown.
  std::set<EntityId> members(const EntityId& category) const;
  std::size_t size() const { return members_.size(); }

 private:
  std::map<EntityId, std::set<EntityId>> members_;
};

CategoryMembership read_membership(std::istream& in, const std::string& source = {});
CategoryMembership load_membership(const std::filesystem::path& path);

std::set<EntityId> expand_category(const EntityId& category, const CategoryMembership& membership);
std::set<EntityId> expand_category(const EntityId& category,
                                   const std::filesystem::path& membership_file);

/// Parses the query file. Queries that name a category keep their explicit
/// entities unexpanded; call `resolve_category` before matching.
std::vector<Query> read_queries(std::istream& in, const std::string& source = {});
std::vector<Query> load_queries(const std::filesystem::path& path);

/// Unions the category's members into the entity set and forces OR
/// semantics. No-op for queries without a category.
void resolve_category(Query& q, const CategoryMembership& membership);

/// D_Q and the candidate related entities E_{D_Q} \ E_Q.
struct ResultSet {
  Query query;
  std::vector<DocIndex> docs;               // ascending
  std::vector<EntityIndex> query_entities;  // E_Q members known to the corpus, ascending
  std::vector<EntityIndex> related;         // ascending

  bool empty() const { return docs.empty(); }
  std::size_t query_size() const { return query.entities.size(); }  // |E_Q|
  std::vector<std::string> doc_ids(const CorpusIndex& index) const;
};

/// Throws entrank::Error when the query has no entities or an inverted interval.
ResultSet match(const CorpusIndex& index, const Query& q);

}  // namespace entrank
