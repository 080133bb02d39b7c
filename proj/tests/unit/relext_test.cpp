#include "synthflow/relext.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "synthflow/textprep.hpp"

using namespace synthflow;

namespace {

using Edge = std::tuple<std::string, std::string, EdgeLabel>;

std::set<Edge> edges_of(const ExtractionResult& result) {
  std::set<Edge> out;
  for (const PredictedRelation& pr : result.relations) {
    out.insert({pr.relation.from, pr.relation.to, pr.relation.label});
  }
  return out;
}

std::set<Edge> edges_of_rule(const ExtractionResult& result, Rule rule) {
  std::set<Edge> out;
  for (const PredictedRelation& pr : result.relations) {
    if (pr.rule == rule) {
      out.insert({pr.relation.from, pr.relation.to, pr.relation.label});
    }
  }
  return out;
}

/// Entity over the nth occurrence of a literal word (ASCII texts only,
/// so code points and bytes coincide).
Entity word_entity(const std::string& text, const std::string& word,
                   VertexLabel label, std::size_t occurrence = 0,
                   std::string id = "") {
  std::size_t pos = 0;
  for (std::size_t i = 0; i <= occurrence; ++i) {
    pos = text.find(word, i == 0 ? 0 : pos + 1);
    REQUIRE(pos != std::string::npos);
  }
  Entity e;
  e.id = id.empty() ? word + std::to_string(occurrence) : std::move(id);
  e.label = label;
  e.spans = {{pos, pos + word.size()}};
  e.text = word;
  return e;
}

struct Fixture {
  AnnotatedDocument doc;
  TokenizedText tokens;
};

Fixture load(const std::string& name) {
  Fixture f;
  f.doc = testsupport::load_fixture("corpus", name);
  f.tokens = analyze(f.doc.text);
  return f;
}

}  // namespace

TEST_CASE("rule names round-trip through their string forms") {
  for (Rule rule : kAllRules) {
    CHECK(parse_rule(to_string(rule)) == rule);
  }
  CHECK_FALSE(parse_rule("O-X").has_value());
  for (BracketChainMode mode :
       {BracketChainMode::kLink, BracketChainMode::kSkip,
        BracketChainMode::kInline}) {
    CHECK(parse_bracket_chain_mode(to_string(mode)) == mode);
  }
  CHECK_FALSE(parse_bracket_chain_mode("loop").has_value());
}

TEST_CASE("presets flip exactly the documented switches") {
  RuleConfig full = RuleConfig::preset("full");
  CHECK(full.use_material_sublabels);
  CHECK(full.use_property_sublabels);
  for (Rule rule : kAllRules) CHECK(full.rule_active(rule));

  RuleConfig no_mat = RuleConfig::preset("no-mat-sub");
  CHECK_FALSE(no_mat.use_material_sublabels);
  CHECK(no_mat.use_property_sublabels);
  CHECK_FALSE(no_mat.rule_active(Rule::kOM));
  CHECK(no_mat.rule_active(Rule::kMO));

  RuleConfig no_prop = RuleConfig::preset("no-prop-sub");
  CHECK_FALSE(no_prop.use_property_sublabels);
  CHECK_FALSE(no_prop.rule_active(Rule::kPO));
  CHECK(no_prop.rule_active(Rule::kPoOM));

  RuleConfig no_sub = RuleConfig::preset("no-sub");
  CHECK_FALSE(no_sub.use_material_sublabels);
  CHECK_FALSE(no_sub.use_property_sublabels);

  CHECK_THROWS_AS(RuleConfig::preset("none"), std::invalid_argument);

  RuleConfig narrowed;
  narrowed.enabled_rules = {Rule::kOO};
  CHECK(narrowed.rule_active(Rule::kOO));
  CHECK_FALSE(narrowed.rule_active(Rule::kMO));
}

TEST_CASE("full pipeline on the flow-figure fixture") {
  Fixture f = load("fig1");
  ExtractionResult result = extract(f.tokens, f.doc.entities);

  const std::set<Edge> expected = {
      // operation chain
      {"T9", "T11", EdgeLabel::kNext},   // mixed -> dispersed
      {"T11", "T13", EdgeLabel::kNext},  // dispersed -> ball-milled
      {"T13", "T16", EdgeLabel::kNext},  // ball-milled -> calcined
      {"T16", "T19", EdgeLabel::kNext},  // calcined -> drying
      // source materials
      {"T3", "T9", EdgeLabel::kNext},    // Li2CO3 -> mixed
      {"T6", "T9", EdgeLabel::kNext},    // TiO2 -> mixed
      {"T12", "T11", EdgeLabel::kNext},  // deionized water -> dispersed
      // last operation to the final materials
      {"T19", "T1", EdgeLabel::kNext},  // drying -> Li4Ti5O12
      {"T19", "T2", EdgeLabel::kNext},  // drying -> LTO
      // free-form properties
      {"T3", "T4", EdgeLabel::kCondition},  // Li2CO3 -> 99.99 %
      {"T3", "T5", EdgeLabel::kCondition},  // Li2CO3 -> Aladdin
      {"T6", "T7", EdgeLabel::kCondition},  // TiO2 -> 99.8 %
      {"T6", "T8", EdgeLabel::kCondition},  // TiO2 -> Aladdin
      {"T9", "T10", EdgeLabel::kCondition},  // mixed -> molar ratio
      // typed conditions
      {"T13", "T14", EdgeLabel::kCondition},  // ball-milled -> 4 h
      {"T13", "T15", EdgeLabel::kCondition},  // ball-milled -> 350 rpm
      {"T16", "T17", EdgeLabel::kCondition},  // calcined -> 800 degC
      {"T16", "T18", EdgeLabel::kCondition},  // calcined -> 12 h
  };
  CHECK(edges_of(result) == expected);
  CHECK(result.diagnostics.empty());

  SUBCASE("every edge carries the rule that drew it") {
    CHECK(edges_of_rule(result, Rule::kOO) ==
          std::set<Edge>{{"T9", "T11", EdgeLabel::kNext},
                         {"T11", "T13", EdgeLabel::kNext},
                         {"T13", "T16", EdgeLabel::kNext},
                         {"T16", "T19", EdgeLabel::kNext}});
    CHECK(edges_of_rule(result, Rule::kMO) ==
          std::set<Edge>{{"T3", "T9", EdgeLabel::kNext},
                         {"T6", "T9", EdgeLabel::kNext},
                         {"T12", "T11", EdgeLabel::kNext}});
    CHECK(edges_of_rule(result, Rule::kOM) ==
          std::set<Edge>{{"T19", "T1", EdgeLabel::kNext},
                         {"T19", "T2", EdgeLabel::kNext}});
    CHECK(edges_of_rule(result, Rule::kPoOM).size() == 5);
    CHECK(edges_of_rule(result, Rule::kPO).size() == 4);
  }

  SUBCASE("relation ids run R1..Rn in emission order") {
    for (std::size_t i = 0; i < result.relations.size(); ++i) {
      CHECK(result.relations[i].relation.id == "R" + std::to_string(i + 1));
    }
  }

  SUBCASE("standalone rule runs agree with the combined pass") {
    CHECK(edges_of(rule_o_o(f.tokens, f.doc.entities)) ==
          edges_of_rule(result, Rule::kOO));
    CHECK(edges_of(rule_m_o(f.tokens, f.doc.entities)) ==
          edges_of_rule(result, Rule::kMO));
    CHECK(edges_of(rule_o_m(f.tokens, f.doc.entities)) ==
          edges_of_rule(result, Rule::kOM));
    CHECK(edges_of(rule_po_om(f.tokens, f.doc.entities)) ==
          edges_of_rule(result, Rule::kPoOM));
    CHECK(edges_of(rule_p_o(f.tokens, f.doc.entities)) ==
          edges_of_rule(result, Rule::kPO));
  }

  SUBCASE("extraction is deterministic") {
    ExtractionResult again = extract(f.tokens, f.doc.entities);
    REQUIRE(again.relations.size() == result.relations.size());
    for (std::size_t i = 0; i < again.relations.size(); ++i) {
      CHECK(again.relations[i].relation.id == result.relations[i].relation.id);
      CHECK(again.relations[i].relation.from ==
            result.relations[i].relation.from);
      CHECK(again.relations[i].relation.to == result.relations[i].relation.to);
      CHECK(again.relations[i].rule == result.relations[i].rule);
    }
  }
}

TEST_CASE("bracketed operations consume the material before the bracket") {
  Fixture f = load("dried");
  ExtractionResult result = extract(f.tokens, f.doc.entities);
  CHECK(edges_of(result) ==
        std::set<Edge>{{"T4", "T5", EdgeLabel::kNext},        // Li2CO3 -> dried
                       {"T5", "T6", EdgeLabel::kCondition}});  // dried -> 200 degC

  // The other start materials find no operation anywhere: the only one
  // is bracketed and owned by Li2CO3.
  std::vector<std::string> flagged;
  for (const Diagnostic& d : result.diagnostics) {
    CHECK(d.code == DiagCode::kNoOperationInDocument);
    flagged.push_back(d.entity_id);
  }
  std::sort(flagged.begin(), flagged.end());
  CHECK(flagged == std::vector<std::string>{"T1", "T2", "T3"});
}

TEST_CASE("is_bracketed respects matched pairs within a sentence") {
  Fixture fig1 = load("fig1");
  CHECK(is_bracketed(testsupport::entity_by_text(fig1.doc, "99.99 %"),
                     fig1.tokens));
  CHECK_FALSE(
      is_bracketed(testsupport::entity_by_text(fig1.doc, "mixed"), fig1.tokens));

  Fixture dried = load("dried");
  CHECK(is_bracketed(testsupport::entity_by_text(dried.doc, "dried"),
                     dried.tokens));
  CHECK_FALSE(is_bracketed(testsupport::entity_by_text(dried.doc, "Li2CO3"),
                           dried.tokens));
}

TEST_CASE("bracket chain modes change who joins the operation chain") {
  Fixture f = load("dried");

  SUBCASE("inline treats bracketed operations as ordinary ones") {
    RuleConfig config;
    config.bracket_chain = BracketChainMode::kInline;
    ExtractionResult result = extract(f.tokens, f.doc.entities, config);
    CHECK(edges_of_rule(result, Rule::kMO) ==
          std::set<Edge>{{"T1", "T5", EdgeLabel::kNext},
                         {"T2", "T5", EdgeLabel::kNext},
                         {"T3", "T5", EdgeLabel::kNext},
                         {"T4", "T5", EdgeLabel::kNext}});
    CHECK(result.diagnostics.empty());
  }

  SUBCASE("skip leaves bracketed operations out entirely") {
    RuleConfig config;
    config.bracket_chain = BracketChainMode::kSkip;
    ExtractionResult result = extract(f.tokens, f.doc.entities, config);
    // The bracket still consumes its closest preceding material.
    CHECK(edges_of_rule(result, Rule::kMO) ==
          std::set<Edge>{{"T4", "T5", EdgeLabel::kNext}});
    CHECK(result.diagnostics.size() == 3);
  }

  SUBCASE("link connects a bracketed operation to the chain downstream") {
    const std::string text = "LiOH powder ( ground fine ) was dried slowly";
    TokenizedText doc = analyze(text);
    std::vector<Entity> ents = {
        word_entity(text, "LiOH", VertexLabel::kMaterialStart),
        word_entity(text, "ground", VertexLabel::kOperation),
        word_entity(text, "dried", VertexLabel::kOperation),
    };
    ExtractionResult linked = extract(doc, ents);
    CHECK(edges_of_rule(linked, Rule::kOO).count(
              {"ground0", "dried0", EdgeLabel::kNext}) == 1);

    RuleConfig config;
    config.bracket_chain = BracketChainMode::kSkip;
    ExtractionResult skipped = extract(doc, ents, config);
    CHECK(edges_of_rule(skipped, Rule::kOO).empty());
  }
}

TEST_CASE("one bracket group consumes one material, left to right") {
  const std::string text = "LiOH fine ( ground ) and TiO2 ( mixed ) today";
  TokenizedText doc = analyze(text);
  std::vector<Entity> ents = {
      word_entity(text, "LiOH", VertexLabel::kMaterialStart),
      word_entity(text, "ground", VertexLabel::kOperation),
      word_entity(text, "TiO2", VertexLabel::kMaterialStart),
      word_entity(text, "mixed", VertexLabel::kOperation),
  };
  ExtractionResult result = extract(doc, ents);
  CHECK(edges_of_rule(result, Rule::kMO) ==
        std::set<Edge>{{"LiOH0", "ground0", EdgeLabel::kNext},
                       {"TiO20", "mixed0", EdgeLabel::kNext}});
  CHECK(result.diagnostics.empty());
}

TEST_CASE("equidistant operations resolve to the preceding one") {
  const std::string text = "mixed a LiOH b dried";
  TokenizedText doc = analyze(text);
  std::vector<Entity> ents = {
      word_entity(text, "mixed", VertexLabel::kOperation),
      word_entity(text, "LiOH", VertexLabel::kMaterialStart),
      word_entity(text, "dried", VertexLabel::kOperation),
  };
  ExtractionResult result = extract(doc, ents);
  CHECK(edges_of_rule(result, Rule::kMO) ==
        std::set<Edge>{{"LiOH0", "mixed0", EdgeLabel::kNext}});
}

TEST_CASE("materials prefer an operation in their own sentence") {
  const std::string text = "Mixed a b c LiOH. Dried now.";
  TokenizedText doc = analyze(text);
  REQUIRE(doc.sentences.size() == 2);
  std::vector<Entity> ents = {
      word_entity(text, "Mixed", VertexLabel::kOperation),
      word_entity(text, "LiOH", VertexLabel::kMaterialStart),
      word_entity(text, "Dried", VertexLabel::kOperation),
  };
  // Dried is closer on the token line, but Mixed shares the sentence.
  ExtractionResult result = extract(doc, ents);
  CHECK(edges_of_rule(result, Rule::kMO) ==
        std::set<Edge>{{"LiOH0", "Mixed0", EdgeLabel::kNext}});
}

TEST_CASE("bracketed free properties attach to the last start material") {
  const std::string text = "LiOH then TiO2 ( 99.9 pure ) dried";
  TokenizedText doc = analyze(text);
  Entity purity = word_entity(text, "99.9 pure", VertexLabel::kPropertyOthers);
  std::vector<Entity> ents = {
      word_entity(text, "LiOH", VertexLabel::kMaterialStart),
      word_entity(text, "TiO2", VertexLabel::kMaterialStart),
      purity,
      word_entity(text, "dried", VertexLabel::kOperation),
  };
  ExtractionResult result = extract(doc, ents);
  CHECK(edges_of_rule(result, Rule::kPoOM)
            .count({"TiO20", "99.9 pure0", EdgeLabel::kCondition}) == 1);

  SUBCASE("no preceding start material leaves a diagnostic") {
    const std::string bare = "( 99.9 pure ) dried";
    TokenizedText doc2 = analyze(bare);
    std::vector<Entity> ents2 = {
        word_entity(bare, "99.9 pure", VertexLabel::kPropertyOthers),
        word_entity(bare, "dried", VertexLabel::kOperation),
    };
    ExtractionResult r2 = extract(doc2, ents2);
    REQUIRE(r2.diagnostics.size() == 1);
    CHECK(r2.diagnostics[0].code == DiagCode::kNoHostCandidate);
    CHECK(r2.diagnostics[0].entity_id == "99.9 pure0");
  }
}

TEST_CASE("free properties outside brackets pick the closest host") {
  const std::string text = "LiOH a 4:5 b dried";
  TokenizedText doc = analyze(text);
  std::vector<Entity> ents = {
      word_entity(text, "LiOH", VertexLabel::kMaterialStart),
      word_entity(text, "4:5", VertexLabel::kPropertyOthers),
      word_entity(text, "dried", VertexLabel::kOperation),
  };
  // One filler either side: a tie, resolved to the preceding material.
  ExtractionResult result = extract(doc, ents);
  CHECK(edges_of_rule(result, Rule::kPoOM) ==
        std::set<Edge>{{"LiOH0", "4:50", EdgeLabel::kCondition}});
}

TEST_CASE("typed conditions need a preceding operation") {
  const std::string text = "at 800 degC the powder was dried";
  TokenizedText doc = analyze(text);
  std::vector<Entity> ents = {
      word_entity(text, "800 degC", VertexLabel::kPropertyTemp),
      word_entity(text, "dried", VertexLabel::kOperation),
  };
  ExtractionResult result = extract(doc, ents);
  CHECK(edges_of_rule(result, Rule::kPO).empty());
  REQUIRE(result.diagnostics.size() == 1);
  CHECK(result.diagnostics[0].code == DiagCode::kNoPrecedingOperation);

  SUBCASE("bracketed hosts can be ruled out") {
    const std::string bracketed = "( dried ) at 800 degC then mixed";
    TokenizedText doc2 = analyze(bracketed);
    std::vector<Entity> ents2 = {
        word_entity(bracketed, "dried", VertexLabel::kOperation),
        word_entity(bracketed, "800 degC", VertexLabel::kPropertyTemp),
        word_entity(bracketed, "mixed", VertexLabel::kOperation),
    };
    ExtractionResult allowed = extract(doc2, ents2);
    CHECK(edges_of_rule(allowed, Rule::kPO) ==
          std::set<Edge>{{"dried0", "800 degC0", EdgeLabel::kCondition}});

    RuleConfig config;
    config.bracketed_p_o_hosts = false;
    ExtractionResult banned = extract(doc2, ents2, config);
    CHECK(edges_of_rule(banned, Rule::kPO).empty());
    REQUIRE(banned.diagnostics.size() == 1);
    CHECK(banned.diagnostics[0].code == DiagCode::kNoPrecedingOperation);
  }
}

TEST_CASE("ablations widen the source and host label sets") {
  const std::string text = "powder LTO mixed at 800 degC a 4:5 blend";
  TokenizedText doc = analyze(text);
  std::vector<Entity> ents = {
      word_entity(text, "LTO", VertexLabel::kMaterialFinal),
      word_entity(text, "mixed", VertexLabel::kOperation),
      word_entity(text, "800 degC", VertexLabel::kPropertyTemp),
      word_entity(text, "4:5", VertexLabel::kPropertyOthers),
  };

  SUBCASE("no-mat-sub feeds every material into M-O and turns O-M off") {
    ExtractionResult full = extract(doc, ents);
    CHECK(edges_of_rule(full, Rule::kMO).empty());  // Final is not a source
    CHECK(edges_of_rule(full, Rule::kOM) ==
          std::set<Edge>{{"mixed0", "LTO0", EdgeLabel::kNext}});

    ExtractionResult ablated =
        extract(doc, ents, RuleConfig::preset("no-mat-sub"));
    CHECK(edges_of_rule(ablated, Rule::kMO) ==
          std::set<Edge>{{"LTO0", "mixed0", EdgeLabel::kNext}});
    CHECK(edges_of_rule(ablated, Rule::kOM).empty());
  }

  SUBCASE("no-prop-sub routes typed properties through Po-OM") {
    ExtractionResult full = extract(doc, ents);
    CHECK(edges_of_rule(full, Rule::kPO) ==
          std::set<Edge>{{"mixed0", "800 degC0", EdgeLabel::kCondition}});

    ExtractionResult ablated =
        extract(doc, ents, RuleConfig::preset("no-prop-sub"));
    CHECK(edges_of_rule(ablated, Rule::kPO).empty());
    std::set<Edge> po_om = edges_of_rule(ablated, Rule::kPoOM);
    CHECK(po_om.count({"mixed0", "800 degC0", EdgeLabel::kCondition}) == 1);
  }
}

TEST_CASE("unbalanced brackets disable bracket handling with a notice") {
  const std::string text = "LiOH ( dried at 300 degC no close";
  TokenizedText doc = analyze(text);
  std::vector<Entity> ents = {
      word_entity(text, "LiOH", VertexLabel::kMaterialStart),
      word_entity(text, "dried", VertexLabel::kOperation),
      word_entity(text, "300 degC", VertexLabel::kPropertyTemp),
  };
  ExtractionResult result = extract(doc, ents);
  REQUIRE_FALSE(result.diagnostics.empty());
  CHECK(result.diagnostics[0].code == DiagCode::kUnbalancedBrackets);
  // With no matched pair the operation counts as ordinary.
  CHECK(edges_of_rule(result, Rule::kMO) ==
        std::set<Edge>{{"LiOH0", "dried0", EdgeLabel::kNext}});
}

TEST_CASE("token-overlapping entities are rejected by extraction") {
  const std::string text = "deionized water was used";
  TokenizedText doc = analyze(text);
  std::vector<Entity> ents = {
      word_entity(text, "deionized water", VertexLabel::kMaterialSolvent),
      word_entity(text, "water", VertexLabel::kMaterialSolvent),
  };
  CHECK_THROWS_AS(extract(doc, ents), OverlappingEntities);
}

TEST_CASE("resolve_token_overlaps keeps the longest reading") {
  const std::string text = "deionized water and more water here";
  TokenizedText doc = analyze(text);
  std::vector<Entity> ents = {
      word_entity(text, "water", VertexLabel::kMaterialSolvent, 0, "short"),
      word_entity(text, "deionized water", VertexLabel::kMaterialSolvent, 0,
                  "long"),
      word_entity(text, "here", VertexLabel::kPropertyOthers, 0, "tail"),
  };
  std::vector<Entity> kept = resolve_token_overlaps(doc, ents);
  REQUIRE(kept.size() == 2);
  CHECK(kept[0].id == "long");
  CHECK(kept[1].id == "tail");

  SUBCASE("equal lengths keep the earlier start") {
    std::vector<Entity> pair = {
        word_entity(text, "and more", VertexLabel::kPropertyOthers, 0, "left"),
        word_entity(text, "more water", VertexLabel::kPropertyOthers, 0,
                    "right"),
    };
    std::vector<Entity> survivors = resolve_token_overlaps(doc, pair);
    REQUIRE(survivors.size() == 1);
    CHECK(survivors[0].id == "left");
  }
}

TEST_CASE("a narrowed rule set only emits those rules") {
  Fixture f = load("fig1");
  RuleConfig config;
  config.enabled_rules = {Rule::kPO};
  ExtractionResult result = extract(f.tokens, f.doc.entities, config);
  CHECK(result.relations.size() == 4);
  for (const PredictedRelation& pr : result.relations) {
    CHECK(pr.rule == Rule::kPO);
  }
}

TEST_CASE("extraction over an empty entity layer is empty") {
  TokenizedText doc = analyze("nothing annotated here");
  ExtractionResult result = extract(doc, {});
  CHECK(result.relations.empty());
  CHECK(result.diagnostics.empty());
}
