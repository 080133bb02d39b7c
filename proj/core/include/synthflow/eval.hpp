#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>

#include "synthflow/document.hpp"
#include "synthflow/relext.hpp"

namespace synthflow {

/// Exact-match counts with the 0/0 -> 0 convention on every ratio.
struct PRF {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;

  PRF& operator+=(const PRF& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
    return *this;
  }
};

/// Unweighted means across a set of PRF rows.
struct MacroScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class MatchSetting { kFine, kCoarse };

class DocumentMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DanglingReference : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Entity scores. Under the fine setting per_label carries one row per
/// fine label and per_coarse pools those rows; under the coarse setting
/// matching itself is by coarse group and per_label stays empty. The
/// all row is the unweighted mean over the three coarse groups.
struct EntityEvalReport {
  std::map<VertexLabel, PRF> per_label;
  std::map<CoarseGroup, PRF> per_coarse;
  MacroScore all;
};

/// An entity matches when span set and label (fine) or span set and
/// coarse group (coarse) agree; matching is one-to-one.
EntityEvalReport entity_prf(const AnnotatedDocument& gold,
                            const AnnotatedDocument& pred,
                            MatchSetting setting);

/// Corpus version: documents paired by doc_id, counts pooled. Throws
/// DocumentMismatch on unpaired documents or differing texts.
EntityEvalReport entity_prf(std::span<const AnnotatedDocument> gold,
                            std::span<const AnnotatedDocument> pred,
                            MatchSetting setting);

/// Relation scores over Condition and Next; the all row averages the
/// two. Gold coreference merges mentions before matching, so an edge to
/// any mention of a cluster counts as an edge to the cluster.
struct RelationEvalReport {
  PRF condition;
  PRF next;
  MacroScore all;
};

/// Predictions drawn over an arbitrary entity layer: endpoints align to
/// gold entities by exact span set, unalignable endpoints simply never
/// match. Throws DanglingReference when a relation cites a missing
/// entity id within its own layer.
RelationEvalReport relation_prf(const AnnotatedDocument& gold,
                                std::span<const Entity> pred_entities,
                                std::span<const Relation> pred_relations);

/// Extractor output over the gold entity layer.
RelationEvalReport relation_prf(const AnnotatedDocument& gold,
                                const ExtractionResult& extraction);

RelationEvalReport relation_prf(const AnnotatedDocument& gold,
                                const AnnotatedDocument& pred);

RelationEvalReport relation_prf(std::span<const AnnotatedDocument> gold,
                                std::span<const AnnotatedDocument> pred);

/// Share and correctness of predicted edges per producing rule.
/// coverage(r) = edges from r / all predicted edges; accuracy(r) =
/// edges from r matching gold under coreference equivalence / edges
/// from r.
struct RuleStats {
  struct Row {
    std::size_t edges = 0;
    std::size_t correct = 0;
  };
  std::map<Rule, Row> per_rule;
  std::size_t total_edges = 0;

  double coverage(Rule rule) const;
  double accuracy(Rule rule) const;

  RuleStats& operator+=(const RuleStats& other);
};

RuleStats rule_stats(const AnnotatedDocument& gold,
                     std::span<const PredictedRelation> predictions);

}  // namespace synthflow
