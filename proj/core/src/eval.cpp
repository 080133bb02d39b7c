#include "synthflow/eval.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <unordered_map>

#include "synthflow/graph.hpp"
#include "synthflow/span.hpp"

namespace synthflow {

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

/// Span set plus category, the exact-match identity of an entity.
std::string match_key(const Entity& e, MatchSetting setting) {
  std::string key = to_string(e.spans);
  key += '|';
  key += setting == MatchSetting::kFine
             ? to_string(e.label)
             : to_string(coarse_of(e.label));
  return key;
}

struct LabelTally {
  std::map<VertexLabel, PRF> fine;
  std::map<CoarseGroup, PRF> coarse;
};

void tally_entities(const AnnotatedDocument& gold,
                    const AnnotatedDocument& pred, MatchSetting setting,
                    LabelTally& tally) {
  if (gold.text != pred.text) {
    throw DocumentMismatch("documents " + gold.doc_id + " and " +
                           pred.doc_id + " have different texts");
  }
  std::unordered_map<std::string, std::size_t> gold_keys;
  for (const Entity& e : gold.entities) ++gold_keys[match_key(e, setting)];

  auto bump = [&tally, setting](const Entity& e, auto member) {
    if (setting == MatchSetting::kFine) ++(tally.fine[e.label].*member);
    ++(tally.coarse[coarse_of(e.label)].*member);
  };

  std::unordered_map<std::string, std::size_t> spent;
  for (const Entity& e : pred.entities) {
    std::string key = match_key(e, setting);
    auto it = gold_keys.find(key);
    if (it != gold_keys.end() && spent[key] < it->second) {
      ++spent[key];
      bump(e, &PRF::tp);
    } else {
      bump(e, &PRF::fp);
    }
  }
  std::unordered_map<std::string, std::size_t> gold_seen;
  for (const Entity& e : gold.entities) {
    std::string key = match_key(e, setting);
    if (gold_seen[key] < spent[key]) {
      ++gold_seen[key];  // matched by a prediction
    } else {
      bump(e, &PRF::fn);
    }
  }
}

EntityEvalReport finish_entity_report(LabelTally tally) {
  EntityEvalReport report;
  report.per_label = std::move(tally.fine);
  report.per_coarse = std::move(tally.coarse);
  double p = 0, r = 0, f = 0;
  for (CoarseGroup group : kAllCoarseGroups) {
    const PRF& row = report.per_coarse[group];  // inserts zero row if absent
    p += row.precision();
    r += row.recall();
    f += row.f1();
  }
  report.all = {p / kAllCoarseGroups.size(), r / kAllCoarseGroups.size(),
                f / kAllCoarseGroups.size()};
  return report;
}

/// Lifted edge: endpoint cluster ids (negative = unaligned pred
/// endpoint) plus label.
using LiftedEdge = std::tuple<long long, long long, EdgeLabel>;

struct RelationTally {
  PRF condition;
  PRF next;
};

PRF& row_for(RelationTally& tally, EdgeLabel label) {
  return label == EdgeLabel::kCondition ? tally.condition : tally.next;
}

void tally_relations(const AnnotatedDocument& gold,
                     std::span<const Entity> pred_entities,
                     std::span<const Relation> pred_relations,
                     RelationTally& tally) {
  ClusterMap clusters = merge_coreference(gold.entities, gold.relations);

  std::unordered_map<std::string, long long> cluster_by_span;
  for (const Entity& e : gold.entities) {
    cluster_by_span.emplace(to_string(e.spans),
                            static_cast<long long>(clusters.cluster_of.at(e.id)));
  }

  std::set<LiftedEdge> gold_edges;
  for (const Relation& r : gold.relations) {
    if (r.label == EdgeLabel::kCoreference) continue;
    long long from = static_cast<long long>(clusters.cluster_of.at(r.from));
    long long to = static_cast<long long>(clusters.cluster_of.at(r.to));
    gold_edges.insert({from, to, r.label});
  }

  std::unordered_map<std::string, const Entity*> pred_by_id;
  for (const Entity& e : pred_entities) pred_by_id.emplace(e.id, &e);
  std::unordered_map<std::string, long long> unaligned;
  auto endpoint = [&](const std::string& id, const std::string& rel_id) {
    auto it = pred_by_id.find(id);
    if (it == pred_by_id.end()) {
      throw DanglingReference("relation " + rel_id +
                              " references unknown entity " + id);
    }
    auto hit = cluster_by_span.find(to_string(it->second->spans));
    if (hit != cluster_by_span.end()) return hit->second;
    auto slot = unaligned
                    .try_emplace(
                        id, -static_cast<long long>(unaligned.size()) - 1)
                    .first;
    return slot->second;
  };

  std::set<LiftedEdge> pred_edges;
  for (const Relation& r : pred_relations) {
    if (r.label == EdgeLabel::kCoreference) continue;
    pred_edges.insert({endpoint(r.from, r.id), endpoint(r.to, r.id), r.label});
  }

  for (const LiftedEdge& e : pred_edges) {
    PRF& row = row_for(tally, std::get<2>(e));
    gold_edges.contains(e) ? ++row.tp : ++row.fp;
  }
  for (const LiftedEdge& e : gold_edges) {
    if (!pred_edges.contains(e)) ++row_for(tally, std::get<2>(e)).fn;
  }
}

RelationEvalReport finish_relation_report(RelationTally tally) {
  RelationEvalReport report;
  report.condition = tally.condition;
  report.next = tally.next;
  report.all = {(report.condition.precision() + report.next.precision()) / 2,
                (report.condition.recall() + report.next.recall()) / 2,
                (report.condition.f1() + report.next.f1()) / 2};
  return report;
}

template <typename Fn>
void for_each_pair(std::span<const AnnotatedDocument> gold,
                   std::span<const AnnotatedDocument> pred, Fn&& fn) {
  std::unordered_map<std::string, const AnnotatedDocument*> pred_by_id;
  for (const AnnotatedDocument& doc : pred) {
    pred_by_id.emplace(doc.doc_id, &doc);
  }
  for (const AnnotatedDocument& doc : gold) {
    auto it = pred_by_id.find(doc.doc_id);
    if (it == pred_by_id.end()) {
      throw DocumentMismatch("document " + doc.doc_id +
                             " missing from predictions");
    }
    fn(doc, *it->second);
  }
  if (pred.size() != gold.size()) {
    throw DocumentMismatch("prediction set has documents absent from gold");
  }
}

}  // namespace

double PRF::precision() const { return ratio(tp, tp + fp); }
double PRF::recall() const { return ratio(tp, tp + fn); }
double PRF::f1() const {
  double p = precision();
  double r = recall();
  return p + r == 0.0 ? 0.0 : 2 * p * r / (p + r);
}

EntityEvalReport entity_prf(const AnnotatedDocument& gold,
                            const AnnotatedDocument& pred,
                            MatchSetting setting) {
  LabelTally tally;
  tally_entities(gold, pred, setting, tally);
  return finish_entity_report(std::move(tally));
}

EntityEvalReport entity_prf(std::span<const AnnotatedDocument> gold,
                            std::span<const AnnotatedDocument> pred,
                            MatchSetting setting) {
  LabelTally tally;
  for_each_pair(gold, pred,
                [&](const AnnotatedDocument& g, const AnnotatedDocument& p) {
                  tally_entities(g, p, setting, tally);
                });
  return finish_entity_report(std::move(tally));
}

RelationEvalReport relation_prf(const AnnotatedDocument& gold,
                                std::span<const Entity> pred_entities,
                                std::span<const Relation> pred_relations) {
  RelationTally tally;
  tally_relations(gold, pred_entities, pred_relations, tally);
  return finish_relation_report(std::move(tally));
}

RelationEvalReport relation_prf(const AnnotatedDocument& gold,
                                const ExtractionResult& extraction) {
  std::vector<Relation> relations;
  relations.reserve(extraction.relations.size());
  for (const PredictedRelation& pr : extraction.relations) {
    relations.push_back(pr.relation);
  }
  return relation_prf(gold, gold.entities, relations);
}

RelationEvalReport relation_prf(const AnnotatedDocument& gold,
                                const AnnotatedDocument& pred) {
  if (gold.text != pred.text) {
    throw DocumentMismatch("documents " + gold.doc_id + " and " +
                           pred.doc_id + " have different texts");
  }
  return relation_prf(gold, pred.entities, pred.relations);
}

RelationEvalReport relation_prf(std::span<const AnnotatedDocument> gold,
                                std::span<const AnnotatedDocument> pred) {
  RelationTally tally;
  for_each_pair(gold, pred,
                [&](const AnnotatedDocument& g, const AnnotatedDocument& p) {
                  if (g.text != p.text) {
                    throw DocumentMismatch("document " + g.doc_id +
                                           " has different texts");
                  }
                  tally_relations(g, p.entities, p.relations, tally);
                });
  return finish_relation_report(std::move(tally));
}

double RuleStats::coverage(Rule rule) const {
  auto it = per_rule.find(rule);
  return it == per_rule.end() ? 0.0 : ratio(it->second.edges, total_edges);
}

double RuleStats::accuracy(Rule rule) const {
  auto it = per_rule.find(rule);
  return it == per_rule.end() ? 0.0
                              : ratio(it->second.correct, it->second.edges);
}

RuleStats& RuleStats::operator+=(const RuleStats& other) {
  for (const auto& [rule, row] : other.per_rule) {
    per_rule[rule].edges += row.edges;
    per_rule[rule].correct += row.correct;
  }
  total_edges += other.total_edges;
  return *this;
}

RuleStats rule_stats(const AnnotatedDocument& gold,
                     std::span<const PredictedRelation> predictions) {
  ClusterMap clusters = merge_coreference(gold.entities, gold.relations);
  std::set<LiftedEdge> gold_edges;
  for (const Relation& r : gold.relations) {
    if (r.label == EdgeLabel::kCoreference) continue;
    gold_edges.insert({static_cast<long long>(clusters.cluster_of.at(r.from)),
                       static_cast<long long>(clusters.cluster_of.at(r.to)),
                       r.label});
  }

  RuleStats stats;
  for (const PredictedRelation& pr : predictions) {
    auto from = clusters.cluster_of.find(pr.relation.from);
    auto to = clusters.cluster_of.find(pr.relation.to);
    if (from == clusters.cluster_of.end() || to == clusters.cluster_of.end()) {
      throw DanglingReference("prediction " + pr.relation.id +
                              " references an entity outside the gold layer");
    }
    RuleStats::Row& row = stats.per_rule[pr.rule];
    ++row.edges;
    ++stats.total_edges;
    if (gold_edges.contains({static_cast<long long>(from->second),
                             static_cast<long long>(to->second),
                             pr.relation.label})) {
      ++row.correct;
    }
  }
  return stats;
}

}  // namespace synthflow
