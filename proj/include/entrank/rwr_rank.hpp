#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entrank/prob_rank.hpp"

namespace entrank {

struct RwrParams {
  double restart = 0.2;  // probability of jumping back to a query entity
  double p1 = 1.0;       // query entity → document share of outgoing mass
  int iterations = 30;
  /// Stop early once the L1 change of an iteration drops below this. Off by default.
  std::optional<double> tolerance;

  /// Throws entrank::Error when a parameter is out of range.
  void validate() const;
};

/// Document share p1 used when none is configured: 0.4 for category
/// queries, 1.0 otherwise.
double default_p1(QueryType type);

enum class NodeKind { query_entity, document, related_entity };

struct GraphNode {
  NodeKind kind;
  std::uint32_t ref;  // EntityIndex for entity nodes, DocIndex for documents
};

struct Edge {
  std::uint32_t target;
  double weight;
};

/// Query entities, matched documents and related entities, with
/// row-stochastic out-edges. Node ids are assigned query entities first,
/// then documents in D_Q order, then related entities.
class TransitionGraph {
 public:
  std::size_t node_count() const { return nodes_.size(); }
  const GraphNode& node(std::uint32_t n) const { return nodes_[n]; }
  std::span<const Edge> out_edges(std::uint32_t n) const { return out_[n]; }

  std::span<const std::uint32_t> query_entity_nodes() const { return query_nodes_; }
  std::span<const std::uint32_t> document_nodes() const { return doc_nodes_; }
  std::span<const std::uint32_t> related_entity_nodes() const { return related_nodes_; }

  /// "q:<uri>", "d:<doc id>" or "r:<uri>".
  std::string label(std::uint32_t n, const CorpusIndex& index) const;

  friend TransitionGraph build_graph(const QueryModel& model, const RwrParams& params);

 private:
  std::vector<GraphNode> nodes_;
  std::vector<std::vector<Edge>> out_;
  std::vector<std::uint32_t> query_nodes_;
  std::vector<std::uint32_t> doc_nodes_;
  std::vector<std::uint32_t> related_nodes_;
};

/// Edge weights:
///   query entity → document:  relativeness × timeliness, normalized per entity, scaled by p1
///   query entity → related:   relatedness, normalized per entity, scaled by 1 − p1
///   document → entity:        count(e, d) normalized over the document's entity nodes
///   related → document:       count(e, d) normalized over the entity's matched documents
/// A query entity with no positively scored related entity sends all of its
/// mass to documents. Query entities matching no document of D_Q are left out.
/// Throws entrank::Error("empty graph") when D_Q is empty.
TransitionGraph build_graph(const QueryModel& model, const RwrParams& params);
TransitionGraph build_graph(const ResultSet& rs, const CorpusIndex& index, const RwrParams& params);

struct RwrState {
  std::vector<double> scores;  // r(n), indexed by node id
  int iterations = 0;          // iterations actually performed
};

/// Starts from the uniform distribution over query-entity nodes and applies
///   r'(n) = d·Jump(n) + (1 − d)·Σ_{m → n} weight(m → n)·r(m)
/// synchronously, where Jump is uniform over query-entity nodes.
RwrState run_rwr(const TransitionGraph& g, const RwrParams& params);

/// Documents by their walk score, descending; ties by ascending document id.
std::vector<ScoredDoc> rank_stochastic(const QueryModel& model, const RwrParams& params);
std::vector<ScoredDoc> rank_stochastic(const ResultSet& rs, const CorpusIndex& index,
                                       const RwrParams& params);

/// One `src dst weight` line per edge.
void write_graph(std::ostream& out, const TransitionGraph& g, const CorpusIndex& index);

}  // namespace entrank
