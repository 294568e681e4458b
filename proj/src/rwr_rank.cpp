#include "entrank/rwr_rank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "entrank/error.hpp"
#include "entrank/ordering.hpp"

namespace entrank {

void RwrParams::validate() const {
  if (!(restart >= 0.0 && restart < 1.0))
    throw Error("params", "restart probability must be in [0, 1)");
  if (!(p1 >= 0.0 && p1 <= 1.0)) throw Error("params", "p1 must be in [0, 1]");
  if (iterations < 1) throw Error("params", "iterations must be positive");
  if (tolerance && !(*tolerance > 0.0)) throw Error("params", "tolerance must be positive");
}

double default_p1(QueryType type) {
  return type == QueryType::category ? 0.4 : 1.0;
}

std::string TransitionGraph::label(std::uint32_t n, const CorpusIndex& index) const {
  const auto& node = nodes_[n];
  switch (node.kind) {
    case NodeKind::query_entity:
      return "q:" + index.entity(node.ref).uri;
    case NodeKind::document:
      return "d:" + index.document(node.ref).id;
    case NodeKind::related_entity:
      return "r:" + index.entity(node.ref).uri;
  }
  return {};
}

namespace {

void normalize(std::vector<Edge>& edges, double mass) {
  double total = 0.0;
  for (const auto& e : edges) total += e.weight;
  for (auto& e : edges) e.weight = e.weight / total * mass;
}

}  // namespace

TransitionGraph build_graph(const QueryModel& model, const RwrParams& params) {
  params.validate();
  const auto& rs = model.result_set();
  const auto& index = model.index();
  if (rs.docs.empty()) throw Error("graph", "empty graph");

  TransitionGraph g;
  const auto n_docs = rs.docs.size();

  // Query entities that reach at least one matched document.
  std::vector<std::vector<std::size_t>> entity_docs;  // positions in D_Q
  for (EntityIndex e : rs.query_entities) {
    std::vector<std::size_t> positions;
    for (DocIndex d : index.docs_of(e))
      if (const auto pos = model.position_of(d)) positions.push_back(*pos);
    if (positions.empty()) continue;
    g.query_nodes_.push_back(static_cast<std::uint32_t>(g.nodes_.size()));
    g.nodes_.push_back(GraphNode{NodeKind::query_entity, e});
    entity_docs.push_back(std::move(positions));
  }
  if (g.query_nodes_.empty()) throw Error("graph", "empty graph");

  const auto doc_base = static_cast<std::uint32_t>(g.nodes_.size());
  for (std::size_t i = 0; i < n_docs; ++i) {
    g.doc_nodes_.push_back(doc_base + static_cast<std::uint32_t>(i));
    g.nodes_.push_back(GraphNode{NodeKind::document, rs.docs[i]});
  }
  const auto related_base = static_cast<std::uint32_t>(g.nodes_.size());
  for (std::size_t i = 0; i < rs.related.size(); ++i) {
    g.related_nodes_.push_back(related_base + static_cast<std::uint32_t>(i));
    g.nodes_.push_back(GraphNode{NodeKind::related_entity, rs.related[i]});
  }
  g.out_.resize(g.nodes_.size());

  auto entity_node = [&](EntityIndex e) -> std::optional<std::uint32_t> {
    const auto qn = std::lower_bound(
        g.query_nodes_.begin(), g.query_nodes_.end(), e,
        [&](std::uint32_t node, EntityIndex value) { return g.nodes_[node].ref < value; });
    if (qn != g.query_nodes_.end() && g.nodes_[*qn].ref == e) return *qn;
    const auto rn = std::lower_bound(rs.related.begin(), rs.related.end(), e);
    if (rn != rs.related.end() && *rn == e)
      return related_base + static_cast<std::uint32_t>(rn - rs.related.begin());
    return std::nullopt;
  };

  // Query entity → documents and related entities.
  for (std::size_t q = 0; q < g.query_nodes_.size(); ++q) {
    std::vector<Edge> doc_edges;
    for (std::size_t pos : entity_docs[q])
      doc_edges.push_back(Edge{doc_base + static_cast<std::uint32_t>(pos),
                               model.relativeness(pos) * model.timeliness(pos)});

    std::vector<EntityIndex> co_entities;
    for (std::size_t pos : entity_docs[q])
      for (const auto& m : index.mentions_of(rs.docs[pos]))
        if (!model.is_query_entity(m.entity)) co_entities.push_back(m.entity);
    std::sort(co_entities.begin(), co_entities.end());
    co_entities.erase(std::unique(co_entities.begin(), co_entities.end()), co_entities.end());
    std::vector<Edge> entity_edges;
    for (EntityIndex e : co_entities) {
      const double score = model.relatedness(e);
      if (score > 0.0) entity_edges.push_back(Edge{*entity_node(e), score});
    }

    double doc_total = 0.0;
    for (const auto& e : doc_edges) doc_total += e.weight;
    const bool has_docs = doc_total > 0.0;
    const bool has_entities = !entity_edges.empty();

    double doc_mass = params.p1;
    if (!has_entities) doc_mass = 1.0;
    if (!has_docs) doc_mass = 0.0;
    const double entity_mass = has_entities ? 1.0 - doc_mass : 0.0;

    auto& out = g.out_[g.query_nodes_[q]];
    if (doc_mass > 0.0) {
      normalize(doc_edges, doc_mass);
      out.insert(out.end(), doc_edges.begin(), doc_edges.end());
    }
    if (entity_mass > 0.0) {
      normalize(entity_edges, entity_mass);
      out.insert(out.end(), entity_edges.begin(), entity_edges.end());
    }
  }

  // Document → entity nodes, by mention count.
  for (std::size_t i = 0; i < n_docs; ++i) {
    std::vector<Edge> edges;
    for (const auto& m : index.mentions_of(rs.docs[i]))
      if (const auto node = entity_node(m.entity))
        edges.push_back(Edge{*node, static_cast<double>(m.count)});
    if (edges.empty()) continue;
    normalize(edges, 1.0);
    g.out_[doc_base + i] = std::move(edges);
  }

  // Related entity → matched documents, by mention count.
  for (std::size_t r = 0; r < rs.related.size(); ++r) {
    const EntityIndex e = rs.related[r];
    std::vector<Edge> edges;
    for (DocIndex d : index.docs_of(e)) {
      const auto pos = model.position_of(d);
      if (!pos) continue;
      const auto ments = index.mentions_of(d);
      const auto m = std::lower_bound(ments.begin(), ments.end(), e,
                                      [](const Mention& a, EntityIndex b) { return a.entity < b; });
      edges.push_back(Edge{doc_base + static_cast<std::uint32_t>(*pos), static_cast<double>(m->count)});
    }
    normalize(edges, 1.0);
    g.out_[related_base + r] = std::move(edges);
  }
  return g;
}

TransitionGraph build_graph(const ResultSet& rs, const CorpusIndex& index, const RwrParams& params) {
  if (rs.docs.empty()) throw Error("graph", "empty graph");
  return build_graph(QueryModel(index, rs), params);
}

RwrState run_rwr(const TransitionGraph& g, const RwrParams& params) {
  params.validate();
  const auto n = g.node_count();
  const auto starts = g.query_entity_nodes();
  if (starts.empty()) throw Error("graph", "empty graph");

  const double jump = 1.0 / static_cast<double>(starts.size());
  const double d = params.restart;

  RwrState state;
  state.scores.assign(n, 0.0);
  for (auto s : starts) state.scores[s] = jump;

  std::vector<double> next(n);
  for (int it = 0; it < params.iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (auto s : starts) next[s] = d * jump;
    for (std::uint32_t src = 0; src < n; ++src) {
      const double flow = (1.0 - d) * state.scores[src];
      if (flow == 0.0) continue;
      for (const auto& e : g.out_edges(src)) next[e.target] += e.weight * flow;
    }
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) change += std::fabs(next[i] - state.scores[i]);
    state.scores.swap(next);
    state.iterations = it + 1;
    if (params.tolerance && change < *params.tolerance) break;
  }
  return state;
}

std::vector<ScoredDoc> rank_stochastic(const QueryModel& model, const RwrParams& params) {
  const auto graph = build_graph(model, params);
  const auto state = run_rwr(graph, params);

  std::vector<ScoredDoc> out;
  out.reserve(model.size());
  const auto docs = graph.document_nodes();
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ScoredDoc s;
    s.doc = model.doc(i);
    s.doc_id = model.index().document(s.doc).id;
    s.score = state.scores[docs[i]];
    s.raw = model.breakdown(i);
    out.push_back(std::move(s));
  }
  order_by_score(
      out, [](const ScoredDoc& s) { return s.score; },
      [](const ScoredDoc& a, const ScoredDoc& b) { return a.doc_id < b.doc_id; });
  return out;
}

std::vector<ScoredDoc> rank_stochastic(const ResultSet& rs, const CorpusIndex& index,
                                       const RwrParams& params) {
  if (rs.docs.empty()) throw Error("graph", "empty graph");
  return rank_stochastic(QueryModel(index, rs), params);
}

void write_graph(std::ostream& out, const TransitionGraph& g, const CorpusIndex& index) {
  char buf[32];
  for (std::uint32_t n = 0; n < g.node_count(); ++n) {
    const auto src = g.label(n, index);
    for (const auto& e : g.out_edges(n)) {
      std::snprintf(buf, sizeof(buf), "%.17g", e.weight);
      out << src << ' ' << g.label(e.target, index) << ' ' << buf << '\n';
    }
  }
}

}  // namespace entrank
