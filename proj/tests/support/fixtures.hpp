#pragma once

#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "entrank/corpus.hpp"
#include "entrank/query.hpp"

namespace fixtures {

inline entrank::EntityId E(const std::string& name) { return entrank::EntityId{name}; }

inline entrank::Document doc(const std::string& id, const std::string& date,
                             std::initializer_list<std::pair<const char*, unsigned>> mentions) {
  entrank::Document d;
  d.id = id;
  d.date = *entrank::parse_date(date);
  for (const auto& [e, n] : mentions) d.mentions[E(e)] += n;
  return d;
}

inline entrank::Query query(std::initializer_list<const char*> entities, bool conj = true,
                            const std::string& start = "2000-01-01", const std::string& end = "2000-12-31") {
  entrank::Query q;
  q.id = "q";
  q.semantics = conj ? entrank::Semantics::conjunctive : entrank::Semantics::disjunctive;
  for (const char* e : entities) q.entities.push_back(E(e));
  q.time_start = *entrank::parse_date(start);
  q.time_end = *entrank::parse_date(end);
  return q;
}

}  // namespace fixtures
