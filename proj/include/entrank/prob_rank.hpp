#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "entrank/corpus.hpp"
#include "entrank/query.hpp"

namespace entrank {

enum class Factor { relativeness, timeliness, relatedness };

/// Which factors enter the joined score: [A] relativeness, [B] timeliness,
/// [C] relatedness.
struct FactorSelection {
  bool relativeness = false;
  bool timeliness = false;
  bool relatedness = false;

  bool any() const { return relativeness || timeliness || relatedness; }
  bool uses(Factor f) const;
  std::string to_string() const;  // e.g. "AC"

  /// Parses letters from {A,B,C} (case-insensitive, any order). Empty or
  /// unknown letters yield std::nullopt.
  static std::optional<FactorSelection> parse(std::string_view text);
  static FactorSelection all() { return {true, true, true}; }
};

/// Raw (unnormalized) factor scores of one document.
struct FactorBreakdown {
  double relativeness = 0.0;  // score^f(d, E_Q)
  double timeliness = 0.0;    // score^t(t_d)
  double relatedness = 0.0;   // sum of score^r over ents(d) \ E_Q
};

struct ScoredDoc {
  std::string doc_id;
  DocIndex doc = 0;
  double score = 0.0;
  FactorBreakdown raw;
};

/// A factor's probability over D_Q, parallel to ResultSet::docs.
struct FactorDistribution {
  std::vector<double> probability;
  bool degenerate = false;  // every raw score was 0; uniform substituted
};

/// Per-query statistics shared by the probabilistic and stochastic rankers.
///
/// Everything is computed once at construction: relativeness and entity
/// coverage per matched document, the timeliness of each bucket holding a
/// matched document, and the relatedness of every candidate entity. The
/// semantics-specific variants (AND/OR) are chosen from the query.
/// Relatedness idf is taken over the whole corpus, not just T_Q.
class QueryModel {
 public:
  /// Throws entrank::Error when `rs` is empty or a matched document has no
  /// mentions.
  QueryModel(const CorpusIndex& index, const ResultSet& rs);

  const CorpusIndex& index() const { return *index_; }
  const ResultSet& result_set() const { return *rs_; }
  Semantics semantics() const { return rs_->query.semantics; }

  std::size_t size() const { return rs_->docs.size(); }
  DocIndex doc(std::size_t pos) const { return rs_->docs[pos]; }
  std::optional<std::size_t> position_of(DocIndex d) const;

  double relativeness(std::size_t pos) const { return relativeness_[pos]; }
  double coverage(std::size_t pos) const { return coverage_[pos]; }
  double timeliness(std::size_t pos) const { return bucket_score(index_->bucket_of(doc(pos))); }
  double relatedness_mass(std::size_t pos) const { return relatedness_mass_[pos]; }
  FactorBreakdown breakdown(std::size_t pos) const;

  /// score^t(t); 0 for buckets holding no matched document.
  double bucket_score(BucketIndex t) const;
  /// score^r(e); 0 for entities outside E_{D_Q} \ E_Q.
  double relatedness(EntityIndex e) const;
  bool is_query_entity(EntityIndex e) const;

  FactorDistribution distribution(Factor f) const;

 private:
  const CorpusIndex* index_;
  const ResultSet* rs_;
  std::vector<double> relativeness_;
  std::vector<double> coverage_;
  std::vector<double> relatedness_mass_;
  std::vector<BucketIndex> buckets_;  // ascending, buckets touched by D_Q
  std::vector<double> bucket_scores_;
  std::vector<double> related_scores_;  // parallel to rs.related
};

/// score^f of a document: the share of its mention mass on query entities,
/// times query-entity coverage under OR semantics.
/// Throws entrank::Error when the document has no mentions.
double relativeness(const Document& d, const Query& q);

double timeliness_bucket(const TimeBucket& t, const ResultSet& rs, const CorpusIndex& index);

/// Throws entrank::Error unless `e` is a candidate related entity of `rs`.
double relatedness(const EntityId& e, const ResultSet& rs, const CorpusIndex& index);

FactorDistribution factor_probability(const ResultSet& rs, const CorpusIndex& index, Factor f);

/// Documents of D_Q by the product of the selected factor probabilities,
/// descending. Ties go to higher raw relativeness, then higher raw
/// timeliness, then ascending document id. Selected factors that fell back
/// to the uniform distribution are appended to `degenerate` when given.
std::vector<ScoredDoc> rank_probabilistic(const QueryModel& model, FactorSelection sel,
                                          std::vector<Factor>* degenerate = nullptr);
std::vector<ScoredDoc> rank_probabilistic(const ResultSet& rs, const CorpusIndex& index,
                                          FactorSelection sel);

}  // namespace entrank
