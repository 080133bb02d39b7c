#include "synthflow/eval.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "synthflow/textprep.hpp"

using namespace synthflow;
using doctest::Approx;

namespace {

constexpr double kTight = 1e-12;

AnnotatedDocument tiny_gold() {
  AnnotatedDocument doc;
  doc.doc_id = "tiny";
  doc.text = "LiOH was dried fast\n";
  doc.entities = {{"T1", VertexLabel::kMaterialStart, {{0, 4}}, "LiOH"},
                  {"T2", VertexLabel::kOperation, {{9, 14}}, "dried"}};
  doc.relations = {{"R1", EdgeLabel::kNext, "T1", "T2"}};
  return doc;
}

}  // namespace

TEST_CASE("PRF ratios follow the zero-over-zero convention") {
  PRF empty;
  CHECK(empty.precision() == 0.0);
  CHECK(empty.recall() == 0.0);
  CHECK(empty.f1() == 0.0);

  PRF some{3, 1, 2};
  CHECK(some.precision() == Approx(0.75).epsilon(kTight));
  CHECK(some.recall() == Approx(0.6).epsilon(kTight));
  CHECK(some.f1() == Approx(2.0 / 3.0).epsilon(kTight));

  PRF sum = empty;
  sum += some;
  sum += some;
  CHECK(sum.tp == 6);
  CHECK(sum.fp == 2);
  CHECK(sum.fn == 4);
}

TEST_CASE("entity scores on the two-annotator fixture pair") {
  AnnotatedDocument gold = testsupport::load_fixture("annotator_a", "fig1");
  AnnotatedDocument pred = testsupport::load_fixture("annotator_b", "fig1");

  SUBCASE("fine matching") {
    EntityEvalReport r = entity_prf(gold, pred, MatchSetting::kFine);
    const PRF& others = r.per_label.at(VertexLabel::kPropertyOthers);
    CHECK(others.tp == 4);
    CHECK(others.fp == 0);
    CHECK(others.fn == 1);
    CHECK(others.precision() == Approx(1.0).epsilon(kTight));
    CHECK(others.recall() == Approx(0.8).epsilon(kTight));
    CHECK(others.f1() == Approx(8.0 / 9.0).epsilon(kTight));

    CHECK(r.per_coarse.at(CoarseGroup::kMaterial).f1() ==
          Approx(1.0).epsilon(kTight));
    CHECK(r.per_coarse.at(CoarseGroup::kOperation).f1() ==
          Approx(1.0).epsilon(kTight));
    CHECK(r.per_coarse.at(CoarseGroup::kProperty).f1() ==
          Approx(16.0 / 17.0).epsilon(kTight));

    CHECK(r.all.precision == Approx(1.0).epsilon(kTight));
    CHECK(r.all.recall == Approx(26.0 / 27.0).epsilon(kTight));
    CHECK(r.all.f1 == Approx(50.0 / 51.0).epsilon(kTight));
  }

  SUBCASE("coarse matching pools the fine labels") {
    EntityEvalReport r = entity_prf(gold, pred, MatchSetting::kCoarse);
    CHECK(r.per_label.empty());
    CHECK(r.per_coarse.at(CoarseGroup::kProperty).tp == 8);
    CHECK(r.per_coarse.at(CoarseGroup::kProperty).fn == 1);
  }

  SUBCASE("corpus pooling equals the single document here") {
    std::vector<AnnotatedDocument> g{gold}, p{pred};
    EntityEvalReport pooled = entity_prf(g, p, MatchSetting::kFine);
    CHECK(pooled.all.f1 == Approx(50.0 / 51.0).epsilon(kTight));
  }
}

TEST_CASE("coarse matching forgives fine label confusion") {
  AnnotatedDocument gold = tiny_gold();
  AnnotatedDocument pred = gold;
  pred.entities[0].label = VertexLabel::kMaterialFinal;
  pred.relations.clear();

  EntityEvalReport fine = entity_prf(gold, pred, MatchSetting::kFine);
  CHECK(fine.per_label.at(VertexLabel::kMaterialStart).fn == 1);
  CHECK(fine.per_label.at(VertexLabel::kMaterialFinal).fp == 1);

  EntityEvalReport coarse = entity_prf(gold, pred, MatchSetting::kCoarse);
  CHECK(coarse.per_coarse.at(CoarseGroup::kMaterial).tp == 1);
  CHECK(coarse.per_coarse.at(CoarseGroup::kMaterial).fp == 0);
}

TEST_CASE("entity matching is one-to-one over identical span sets") {
  AnnotatedDocument gold = tiny_gold();
  gold.relations.clear();
  AnnotatedDocument pred = gold;
  Entity dup = pred.entities[0];
  dup.id = "T9";
  pred.entities.push_back(dup);

  EntityEvalReport r = entity_prf(gold, pred, MatchSetting::kFine);
  const PRF& start = r.per_label.at(VertexLabel::kMaterialStart);
  CHECK(start.tp == 1);
  CHECK(start.fp == 1);
  CHECK(start.fn == 0);
}

TEST_CASE("relation scores against the extractor on the flow fixture") {
  AnnotatedDocument gold = testsupport::load_fixture("corpus", "fig1");
  TokenizedText tokens = analyze(gold.text);
  ExtractionResult result = extract(tokens, gold.entities);

  RelationEvalReport r = relation_prf(gold, result);
  CHECK(r.condition.tp == 9);
  CHECK(r.condition.fp == 0);
  CHECK(r.condition.fn == 0);
  CHECK(r.condition.f1() == Approx(1.0).epsilon(kTight));
  // The drying/calcined swap costs two chain edges, and both final-material
  // edges collapse onto one wrong cluster edge.
  CHECK(r.next.tp == 5);
  CHECK(r.next.fp == 3);
  CHECK(r.next.fn == 3);
  CHECK(r.next.f1() == Approx(0.625).epsilon(kTight));
  CHECK(r.all.f1 == Approx((1.0 + 0.625) / 2).epsilon(kTight));

  SUBCASE("an edge to either coreferent mention scores the same") {
    std::vector<Relation> relations;
    for (const PredictedRelation& pr : result.relations) {
      relations.push_back(pr.relation);
    }
    RelationEvalReport base =
        relation_prf(gold, gold.entities, relations);
    for (Relation& rel : relations) {
      if (rel.to == "T2") rel.to = "T1";  // swap LTO for Li4Ti5O12
    }
    RelationEvalReport swapped =
        relation_prf(gold, gold.entities, relations);
    CHECK(swapped.next.tp == base.next.tp);
    CHECK(swapped.next.fp == base.next.fp);
    CHECK(swapped.next.fn == base.next.fn);
    CHECK(swapped.all.f1 == Approx(base.all.f1).epsilon(kTight));
  }
}

TEST_CASE("relation scores between the two annotator versions") {
  AnnotatedDocument gold = testsupport::load_fixture("annotator_a", "fig1");
  AnnotatedDocument pred = testsupport::load_fixture("annotator_b", "fig1");
  RelationEvalReport r = relation_prf(gold, pred);
  CHECK(r.next.f1() == Approx(1.0).epsilon(kTight));
  CHECK(r.condition.tp == 7);
  CHECK(r.condition.fn == 2);
  CHECK(r.condition.f1() == Approx(0.875).epsilon(kTight));
  CHECK(r.all.f1 == Approx((1.0 + 0.875) / 2).epsilon(kTight));
}

TEST_CASE("corpus relation scores pool per-document counts") {
  CorpusHandle gold =
      load_corpus(testsupport::fixture_dir() / "corpus");
  REQUIRE(gold.documents.size() == 2);
  std::vector<AnnotatedDocument> pred;
  for (const AnnotatedDocument& doc : gold.documents) {
    TokenizedText tokens = analyze(doc.text);
    ExtractionResult result = extract(tokens, doc.entities);
    AnnotatedDocument p;
    p.doc_id = doc.doc_id;
    p.text = doc.text;
    p.entities = doc.entities;
    for (const PredictedRelation& pr : result.relations) {
      p.relations.push_back(pr.relation);
    }
    pred.push_back(std::move(p));
  }
  RelationEvalReport r = relation_prf(gold.documents, pred);
  CHECK(r.condition.tp == 10);
  CHECK(r.condition.f1() == Approx(1.0).epsilon(kTight));
  CHECK(r.next.tp == 6);
  CHECK(r.next.fp == 3);
  CHECK(r.next.fn == 3);
  CHECK(r.next.f1() == Approx(2.0 / 3.0).epsilon(kTight));
}

TEST_CASE("predictions over a foreign entity layer align by span set") {
  AnnotatedDocument gold = tiny_gold();
  std::vector<Entity> layer = {
      {"P1", VertexLabel::kMaterialStart, {{0, 4}}, "LiOH"},
      {"P2", VertexLabel::kOperation, {{9, 14}}, "dried"},
      {"P3", VertexLabel::kOperation, {{15, 19}}, "fast"}};
  std::vector<Relation> good = {{"R1", EdgeLabel::kNext, "P1", "P2"}};
  RelationEvalReport hit = relation_prf(gold, layer, good);
  CHECK(hit.next.tp == 1);
  CHECK(hit.next.fp == 0);
  CHECK(hit.next.fn == 0);

  SUBCASE("an endpoint with no gold twin can never match") {
    std::vector<Relation> miss = {{"R1", EdgeLabel::kNext, "P3", "P2"}};
    RelationEvalReport r = relation_prf(gold, layer, miss);
    CHECK(r.next.tp == 0);
    CHECK(r.next.fp == 1);
    CHECK(r.next.fn == 1);
  }

  SUBCASE("a relation citing a missing id is an error") {
    std::vector<Relation> broken = {{"R1", EdgeLabel::kNext, "P1", "P9"}};
    CHECK_THROWS_AS(relation_prf(gold, layer, broken), DanglingReference);
  }

  SUBCASE("coreference relations are not scored") {
    std::vector<Relation> coref = {{"R1", EdgeLabel::kCoreference, "P1", "P2"}};
    RelationEvalReport r = relation_prf(gold, layer, coref);
    CHECK(r.condition.tp + r.condition.fp == 0);
    CHECK(r.next.tp + r.next.fp == 0);
    CHECK(r.next.fn == 1);  // the gold Next edge stays unmatched
  }
}

TEST_CASE("corpus pairing is strict about ids and texts") {
  AnnotatedDocument gold = tiny_gold();
  AnnotatedDocument pred = gold;

  SUBCASE("an unpaired document id") {
    pred.doc_id = "other";
    std::vector<AnnotatedDocument> g{gold}, p{pred};
    CHECK_THROWS_AS(entity_prf(g, p, MatchSetting::kFine), DocumentMismatch);
    CHECK_THROWS_AS(relation_prf(g, p), DocumentMismatch);
  }
  SUBCASE("same id but different text") {
    pred.text = "LiOH was wet fast\n";
    pred.entities[1] = {"T2", VertexLabel::kOperation, {{9, 12}}, "wet"};
    pred.relations.clear();
    std::vector<AnnotatedDocument> g{gold}, p{pred};
    CHECK_THROWS_AS(entity_prf(g, p, MatchSetting::kFine), DocumentMismatch);
  }
}

TEST_CASE("rule_stats attributes credit per producing rule") {
  AnnotatedDocument gold = testsupport::load_fixture("corpus", "fig1");
  TokenizedText tokens = analyze(gold.text);
  ExtractionResult result = extract(tokens, gold.entities);
  RuleStats stats = rule_stats(gold, result.relations);

  CHECK(stats.total_edges == 18);
  CHECK(stats.per_rule.at(Rule::kOO).edges == 4);
  CHECK(stats.per_rule.at(Rule::kOO).correct == 2);
  CHECK(stats.per_rule.at(Rule::kMO).edges == 3);
  CHECK(stats.per_rule.at(Rule::kMO).correct == 3);
  CHECK(stats.per_rule.at(Rule::kOM).edges == 2);
  CHECK(stats.per_rule.at(Rule::kOM).correct == 0);
  CHECK(stats.per_rule.at(Rule::kPoOM).edges == 5);
  CHECK(stats.per_rule.at(Rule::kPoOM).correct == 5);
  CHECK(stats.per_rule.at(Rule::kPO).edges == 4);
  CHECK(stats.per_rule.at(Rule::kPO).correct == 4);

  CHECK(stats.accuracy(Rule::kOO) == Approx(0.5).epsilon(kTight));
  CHECK(stats.accuracy(Rule::kOM) == Approx(0.0).epsilon(kTight));
  CHECK(stats.accuracy(Rule::kPoOM) == Approx(1.0).epsilon(kTight));

  double coverage = 0.0;
  for (Rule rule : kAllRules) coverage += stats.coverage(rule);
  CHECK(coverage == Approx(1.0).epsilon(1e-9));

  SUBCASE("aggregation adds counts") {
    RuleStats twice = stats;
    twice += stats;
    CHECK(twice.total_edges == 36);
    CHECK(twice.per_rule.at(Rule::kPO).edges == 8);
    CHECK(twice.accuracy(Rule::kPO) == Approx(1.0).epsilon(kTight));
  }
}
