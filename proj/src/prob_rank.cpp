#include "entrank/prob_rank.hpp"

#include <algorithm>
#include <cctype>

#include "entrank/error.hpp"
#include "entrank/ordering.hpp"

namespace entrank {

bool FactorSelection::uses(Factor f) const {
  switch (f) {
    case Factor::relativeness:
      return relativeness;
    case Factor::timeliness:
      return timeliness;
    case Factor::relatedness:
      return relatedness;
  }
  return false;
}

std::string FactorSelection::to_string() const {
  std::string s;
  if (relativeness) s += 'A';
  if (timeliness) s += 'B';
  if (relatedness) s += 'C';
  return s;
}

std::optional<FactorSelection> FactorSelection::parse(std::string_view text) {
  FactorSelection sel;
  for (char c : text) {
    switch (std::toupper(static_cast<unsigned char>(c))) {
      case 'A': sel.relativeness = true; break;
      case 'B': sel.timeliness = true; break;
      case 'C': sel.relatedness = true; break;
      default: return std::nullopt;
    }
  }
  if (!sel.any()) return std::nullopt;
  return sel;
}

// ---------------------------------------------------------------------------

QueryModel::QueryModel(const CorpusIndex& index, const ResultSet& rs) : index_(&index), rs_(&rs) {
  if (rs.docs.empty()) throw Error("model", "query " + rs.query.id + " matched no documents");
  const bool conj = rs.query.semantics == Semantics::conjunctive;
  const auto n = rs.docs.size();
  const double dq = static_cast<double>(n);
  const double eq = static_cast<double>(rs.query_size());

  // Relativeness and coverage per matched document.
  relativeness_.resize(n);
  coverage_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const DocIndex d = rs.docs[i];
    const auto total = index.total_mentions(d);
    if (total == 0)
      throw Error("model", "document " + index.document(d).id + " has no entity mentions");
    std::uint64_t query_mass = 0;
    std::size_t query_present = 0;
    for (const auto& m : index.mentions_of(d)) {
      if (is_query_entity(m.entity)) {
        query_mass += m.count;
        ++query_present;
      }
    }
    coverage_[i] = static_cast<double>(query_present) / eq;
    const double share = static_cast<double>(query_mass) / static_cast<double>(total);
    relativeness_[i] = conj ? share : share * coverage_[i];
  }

  // Timeliness per bucket: |docs(t) ∩ D_Q| / |D_Q|, times N(E_Q, t) under OR.
  for (DocIndex d : rs.docs) buckets_.push_back(index.bucket_of(d));
  std::sort(buckets_.begin(), buckets_.end());
  buckets_.erase(std::unique(buckets_.begin(), buckets_.end()), buckets_.end());
  std::vector<std::size_t> bucket_docs(buckets_.size(), 0);
  std::vector<double> bucket_coverage(buckets_.size(), 0.0);
  std::vector<std::size_t> doc_bucket_slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto t = index.bucket_of(rs.docs[i]);
    const auto slot =
        static_cast<std::size_t>(std::lower_bound(buckets_.begin(), buckets_.end(), t) - buckets_.begin());
    doc_bucket_slot[i] = slot;
    ++bucket_docs[slot];
    bucket_coverage[slot] += coverage_[i];
  }
  bucket_scores_.resize(buckets_.size());
  std::vector<double> bucket_mean_coverage(buckets_.size());
  for (std::size_t s = 0; s < buckets_.size(); ++s) {
    bucket_mean_coverage[s] = bucket_coverage[s] / static_cast<double>(bucket_docs[s]);
    const double fraction = static_cast<double>(bucket_docs[s]) / dq;
    bucket_scores_[s] = conj ? fraction : fraction * bucket_mean_coverage[s];
  }

  // Relatedness of each candidate entity.
  //   B = docs mentioning all (AND) / any (OR) query entities, whole corpus.
  std::vector<DocIndex> base;
  if (conj) {
    base.assign(index.docs_of(rs.query_entities.front()).begin(),
                index.docs_of(rs.query_entities.front()).end());
    std::vector<DocIndex> next;
    for (std::size_t i = 1; i < rs.query_entities.size(); ++i) {
      const auto other = index.docs_of(rs.query_entities[i]);
      next.clear();
      std::set_intersection(base.begin(), base.end(), other.begin(), other.end(),
                            std::back_inserter(next));
      base.swap(next);
    }
  } else {
    for (EntityIndex e : rs.query_entities)
      base.insert(base.end(), index.docs_of(e).begin(), index.docs_of(e).end());
    std::sort(base.begin(), base.end());
    base.erase(std::unique(base.begin(), base.end()), base.end());
  }

  const auto related_count = rs.related.size();
  auto slot_of = [&](EntityIndex e) -> std::optional<std::size_t> {
    const auto it = std::lower_bound(rs.related.begin(), rs.related.end(), e);
    if (it == rs.related.end() || *it != e) return std::nullopt;
    return static_cast<std::size_t>(it - rs.related.begin());
  };

  std::vector<std::size_t> in_base(related_count, 0);
  for (DocIndex d : base)
    for (const auto& m : index.mentions_of(d))
      if (const auto s = slot_of(m.entity)) ++in_base[*s];

  std::vector<std::size_t> co_docs(related_count, 0);  // |docs(e) ∩ D_Q|
  std::vector<double> co_coverage(related_count, 0.0);  // Σ coverage over docs(e) ∩ D_Q
  std::vector<double> co_temporal(related_count, 0.0);  // Σ N(E_Q, t_d) over docs(e) ∩ D_Q
  std::vector<std::vector<std::size_t>> doc_related(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& m : index.mentions_of(rs.docs[i])) {
      const auto s = slot_of(m.entity);
      if (!s) continue;
      doc_related[i].push_back(*s);
      ++co_docs[*s];
      co_coverage[*s] += coverage_[i];
      co_temporal[*s] += bucket_mean_coverage[doc_bucket_slot[i]];
    }
  }

  related_scores_.resize(related_count);
  const double base_size = static_cast<double>(base.size());
  for (std::size_t s = 0; s < related_count; ++s) {
    const double idf = 1.0 - static_cast<double>(in_base[s]) / base_size;
    if (conj) {
      related_scores_[s] = idf * (static_cast<double>(co_docs[s]) / dq);
    } else {
      const double mean_coverage = co_coverage[s] / static_cast<double>(co_docs[s]);
      related_scores_[s] = idf * mean_coverage * (co_temporal[s] / dq);
    }
  }

  relatedness_mass_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t s : doc_related[i]) relatedness_mass_[i] += related_scores_[s];
}

std::optional<std::size_t> QueryModel::position_of(DocIndex d) const {
  const auto it = std::lower_bound(rs_->docs.begin(), rs_->docs.end(), d);
  if (it == rs_->docs.end() || *it != d) return std::nullopt;
  return static_cast<std::size_t>(it - rs_->docs.begin());
}

FactorBreakdown QueryModel::breakdown(std::size_t pos) const {
  return FactorBreakdown{relativeness(pos), timeliness(pos), relatedness_mass(pos)};
}

double QueryModel::bucket_score(BucketIndex t) const {
  const auto it = std::lower_bound(buckets_.begin(), buckets_.end(), t);
  if (it == buckets_.end() || *it != t) return 0.0;
  return bucket_scores_[static_cast<std::size_t>(it - buckets_.begin())];
}

double QueryModel::relatedness(EntityIndex e) const {
  const auto& rel = rs_->related;
  const auto it = std::lower_bound(rel.begin(), rel.end(), e);
  if (it == rel.end() || *it != e) return 0.0;
  return related_scores_[static_cast<std::size_t>(it - rel.begin())];
}

bool QueryModel::is_query_entity(EntityIndex e) const {
  return std::binary_search(rs_->query_entities.begin(), rs_->query_entities.end(), e);
}

FactorDistribution QueryModel::distribution(Factor f) const {
  FactorDistribution out;
  out.probability.resize(size());
  double total = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    const auto b = breakdown(i);
    const double raw = f == Factor::relativeness ? b.relativeness
                       : f == Factor::timeliness ? b.timeliness
                                                 : b.relatedness;
    out.probability[i] = raw;
    total += raw;
  }
  if (total > 0.0) {
    for (auto& p : out.probability) p /= total;
  } else {
    out.degenerate = true;
    std::fill(out.probability.begin(), out.probability.end(), 1.0 / static_cast<double>(size()));
  }
  return out;
}

// ---------------------------------------------------------------------------

double relativeness(const Document& d, const Query& q) {
  std::uint64_t total = 0;
  std::uint64_t query_mass = 0;
  std::size_t present = 0;
  for (const auto& [e, count] : d.mentions) {
    total += count;
    if (std::find(q.entities.begin(), q.entities.end(), e) != q.entities.end()) {
      query_mass += count;
      ++present;
    }
  }
  if (total == 0) throw Error("model", "document " + d.id + " has no entity mentions");
  const double share = static_cast<double>(query_mass) / static_cast<double>(total);
  if (q.semantics == Semantics::conjunctive) return share;
  return share * (static_cast<double>(present) / static_cast<double>(q.entities.size()));
}

double timeliness_bucket(const TimeBucket& t, const ResultSet& rs, const CorpusIndex& index) {
  const auto idx = index.find_bucket(t);
  if (!idx) return 0.0;
  return QueryModel(index, rs).bucket_score(*idx);
}

double relatedness(const EntityId& e, const ResultSet& rs, const CorpusIndex& index) {
  const auto idx = index.find_entity(e);
  if (!idx || !std::binary_search(rs.related.begin(), rs.related.end(), *idx))
    throw Error("model", "entity " + e.uri + " is not a related entity of query " + rs.query.id);
  return QueryModel(index, rs).relatedness(*idx);
}

FactorDistribution factor_probability(const ResultSet& rs, const CorpusIndex& index, Factor f) {
  return QueryModel(index, rs).distribution(f);
}

std::vector<ScoredDoc> rank_probabilistic(const QueryModel& model, FactorSelection sel,
                                          std::vector<Factor>* degenerate) {
  if (!sel.any()) throw Error("model", "factor selection is empty");
  std::vector<ScoredDoc> out(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    out[i].doc = model.doc(i);
    out[i].doc_id = model.index().document(model.doc(i)).id;
    out[i].raw = model.breakdown(i);
    out[i].score = 1.0;
  }
  for (Factor f : {Factor::relativeness, Factor::timeliness, Factor::relatedness}) {
    if (!sel.uses(f)) continue;
    const auto dist = model.distribution(f);
    if (dist.degenerate && degenerate) degenerate->push_back(f);
    for (std::size_t i = 0; i < out.size(); ++i) out[i].score *= dist.probability[i];
  }

  order_by_score(
      out, [](const ScoredDoc& s) { return s.score; },
      [](const ScoredDoc& a, const ScoredDoc& b) {
        const auto ra = tie_key(a.raw.relativeness), rb = tie_key(b.raw.relativeness);
        if (ra != rb) return ra > rb;
        const auto ta = tie_key(a.raw.timeliness), tb = tie_key(b.raw.timeliness);
        if (ta != tb) return ta > tb;
        return a.doc_id < b.doc_id;
      });
  return out;
}

std::vector<ScoredDoc> rank_probabilistic(const ResultSet& rs, const CorpusIndex& index,
                                          FactorSelection sel) {
  return rank_probabilistic(QueryModel(index, rs), sel);
}

}  // namespace entrank
