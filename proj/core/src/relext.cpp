#include "synthflow/relext.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <stdexcept>
#include <tuple>

#include "synthflow/labels.hpp"

namespace synthflow {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::kOO:
      return "O-O";
    case Rule::kMO:
      return "M-O";
    case Rule::kOM:
      return "O-M";
    case Rule::kPoOM:
      return "Po-OM";
    case Rule::kPO:
      return "P-O";
  }
  return "?";
}

std::optional<Rule> parse_rule(std::string_view name) {
  for (Rule rule : kAllRules) {
    if (to_string(rule) == name) return rule;
  }
  return std::nullopt;
}

std::string_view to_string(BracketChainMode mode) {
  switch (mode) {
    case BracketChainMode::kLink:
      return "link";
    case BracketChainMode::kSkip:
      return "skip";
    case BracketChainMode::kInline:
      return "inline";
  }
  return "?";
}

std::optional<BracketChainMode> parse_bracket_chain_mode(
    std::string_view name) {
  if (name == "link") return BracketChainMode::kLink;
  if (name == "skip") return BracketChainMode::kSkip;
  if (name == "inline") return BracketChainMode::kInline;
  return std::nullopt;
}

std::string_view to_string(DiagCode code) {
  switch (code) {
    case DiagCode::kNoOperationInDocument:
      return "NoOperationInDocument";
    case DiagCode::kNoHostCandidate:
      return "NoHostCandidate";
    case DiagCode::kNoPrecedingOperation:
      return "NoPrecedingOperation";
    case DiagCode::kUnbalancedBrackets:
      return "UnbalancedBrackets";
  }
  return "?";
}

RuleConfig RuleConfig::preset(std::string_view name) {
  RuleConfig config;
  if (name == "full") return config;
  if (name == "no-mat-sub") {
    config.use_material_sublabels = false;
    return config;
  }
  if (name == "no-prop-sub") {
    config.use_property_sublabels = false;
    return config;
  }
  if (name == "no-sub") {
    config.use_material_sublabels = false;
    config.use_property_sublabels = false;
    return config;
  }
  throw std::invalid_argument("unknown ablation preset: " + std::string(name));
}

bool RuleConfig::rule_active(Rule rule) const {
  if (!enabled_rules.contains(rule)) return false;
  if (rule == Rule::kOM && !use_material_sublabels) return false;
  if (rule == Rule::kPO && !use_property_sublabels) return false;
  return true;
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

struct BracketGroup {
  std::size_t open_tok = 0;
  std::size_t close_tok = 0;

  std::size_t width() const { return close_tok - open_tok; }
};

struct BracketInfo {
  std::vector<BracketGroup> groups;  // document order of the open token
  bool unbalanced = false;
};

BracketInfo scan_brackets(const TokenizedText& doc) {
  BracketInfo info;
  std::vector<std::size_t> open_stack;
  std::size_t sentence = kNone;
  for (const Token& token : doc.tokens) {
    if (token.sentence_index != sentence) {
      if (!open_stack.empty()) {
        info.unbalanced = true;
        open_stack.clear();
      }
      sentence = token.sentence_index;
    }
    if (token.text == "(") {
      open_stack.push_back(token.index);
    } else if (token.text == ")") {
      if (open_stack.empty()) {
        info.unbalanced = true;
      } else {
        info.groups.push_back({open_stack.back(), token.index});
        open_stack.pop_back();
      }
    }
  }
  if (!open_stack.empty()) info.unbalanced = true;
  std::sort(info.groups.begin(), info.groups.end(),
            [](const BracketGroup& a, const BracketGroup& b) {
              return a.open_tok < b.open_tok;
            });
  return info;
}

/// Smallest matched pair strictly containing the range, if any.
std::size_t enclosing_group(const BracketInfo& info, const TokenRange& range) {
  std::size_t best = kNone;
  for (std::size_t i = 0; i < info.groups.size(); ++i) {
    const BracketGroup& g = info.groups[i];
    if (g.open_tok < range.first && range.last < g.close_tok) {
      if (best == kNone || g.width() < info.groups[best].width()) best = i;
    }
  }
  return best;
}

/// Per-document scratch shared by the rules: entities in document order
/// with their token ranges and bracket membership.
struct Workspace {
  const TokenizedText& doc;
  std::vector<const Entity*> ents;
  std::vector<TokenRange> ranges;
  std::vector<std::size_t> group_of;    // kNone when not bracketed
  std::vector<std::size_t> operations;  // indices into ents, document order
  BracketInfo brackets;

  Workspace(const TokenizedText& document, std::span<const Entity> entities)
      : doc(document), brackets(scan_brackets(document)) {
    ents.reserve(entities.size());
    for (const Entity& e : entities) ents.push_back(&e);
    std::sort(ents.begin(), ents.end(), [](const Entity* a, const Entity* b) {
      return std::tie(a->first_span().start, a->first_span().end, a->id) <
             std::tie(b->first_span().start, b->first_span().end, b->id);
    });
    ranges.reserve(ents.size());
    group_of.reserve(ents.size());
    for (std::size_t i = 0; i < ents.size(); ++i) {
      ranges.push_back(token_range(*ents[i], doc.tokens));
      group_of.push_back(enclosing_group(brackets, ranges.back()));
      if (i > 0 && ranges[i - 1].overlaps(ranges[i])) {
        throw OverlappingEntities("entities " + ents[i - 1]->id + " and " +
                                  ents[i]->id +
                                  " cover overlapping token ranges");
      }
      if (ents[i]->label == VertexLabel::kOperation) operations.push_back(i);
    }
  }

  std::size_t sentence_of(std::size_t i) const {
    return doc.tokens[ranges[i].first].sentence_index;
  }

  bool op_eligible(std::size_t i, const RuleConfig& config) const {
    return config.bracket_chain == BracketChainMode::kInline ||
           group_of[i] == kNone;
  }
};

void emit(ExtractionResult& out, Rule rule, EdgeLabel label,
          const Entity& from, const Entity& to) {
  Relation relation;
  relation.label = label;
  relation.from = from.id;
  relation.to = to.id;
  out.relations.push_back({std::move(relation), rule});
}

void diagnose(ExtractionResult& out, DiagCode code, const Entity& entity,
              std::string detail) {
  out.diagnostics.push_back({code, entity.id, std::move(detail)});
}

/// Closest candidate by intervening-token distance; a tie between a
/// preceding and a following candidate resolves to the preceding one.
std::size_t closest(const Workspace& ws, std::size_t target,
                    const std::vector<std::size_t>& candidates) {
  std::size_t best = kNone;
  std::size_t best_dist = 0;
  bool best_precedes = false;
  for (std::size_t c : candidates) {
    std::size_t dist = token_distance(ws.ranges[c], ws.ranges[target]);
    bool precedes = ws.ranges[c].first < ws.ranges[target].first;
    if (best == kNone || dist < best_dist ||
        (dist == best_dist && precedes && !best_precedes)) {
      best = c;
      best_dist = dist;
      best_precedes = precedes;
    }
  }
  return best;
}

void run_o_o(const Workspace& ws, const RuleConfig& config,
             ExtractionResult& out) {
  std::vector<std::size_t> chain;
  for (std::size_t op : ws.operations) {
    if (ws.op_eligible(op, config)) chain.push_back(op);
  }
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    emit(out, Rule::kOO, EdgeLabel::kNext, *ws.ents[chain[i]],
         *ws.ents[chain[i + 1]]);
  }
  if (config.bracket_chain != BracketChainMode::kLink) return;
  for (std::size_t op : ws.operations) {
    if (ws.group_of[op] == kNone) continue;
    // Nearest chain member that starts after the bracketed operation.
    for (std::size_t follower : chain) {
      if (ws.ranges[follower].first > ws.ranges[op].last) {
        emit(out, Rule::kOO, EdgeLabel::kNext, *ws.ents[op],
             *ws.ents[follower]);
        break;
      }
    }
  }
}

bool material_source_eligible(const Entity& e, const RuleConfig& config) {
  if (!config.use_material_sublabels)
    return coarse_of(e.label) == CoarseGroup::kMaterial;
  return e.label == VertexLabel::kMaterialStart ||
         e.label == VertexLabel::kMaterialSolvent;
}

void run_m_o(const Workspace& ws, const RuleConfig& config,
             ExtractionResult& out) {
  std::vector<std::size_t> sources;
  for (std::size_t i = 0; i < ws.ents.size(); ++i) {
    if (material_source_eligible(*ws.ents[i], config)) sources.push_back(i);
  }
  std::vector<bool> consumed(ws.ents.size(), false);

  // Bracket case: a group that contains an operation consumes the
  // closest material left of its opening bracket.
  if (config.bracket_chain != BracketChainMode::kInline) {
    for (std::size_t g = 0; g < ws.brackets.groups.size(); ++g) {
      std::size_t first_op = kNone;
      for (std::size_t op : ws.operations) {
        if (ws.group_of[op] == g) {
          first_op = op;
          break;
        }
      }
      if (first_op == kNone) continue;
      std::size_t host = kNone;
      for (std::size_t m : sources) {
        if (consumed[m]) continue;
        if (ws.ranges[m].last < ws.brackets.groups[g].open_tok &&
            (host == kNone || ws.ranges[m].last > ws.ranges[host].last)) {
          host = m;
        }
      }
      if (host == kNone) continue;
      emit(out, Rule::kMO, EdgeLabel::kNext, *ws.ents[host],
           *ws.ents[first_op]);
      consumed[host] = true;
    }
  }

  for (std::size_t m : sources) {
    if (consumed[m]) continue;
    std::vector<std::size_t> same_sentence;
    std::vector<std::size_t> other_sentences;
    for (std::size_t op : ws.operations) {
      if (!ws.op_eligible(op, config)) continue;
      (ws.sentence_of(op) == ws.sentence_of(m) ? same_sentence
                                               : other_sentences)
          .push_back(op);
    }
    std::size_t target = closest(ws, m, same_sentence);
    if (target == kNone) target = closest(ws, m, other_sentences);
    if (target == kNone) {
      diagnose(out, DiagCode::kNoOperationInDocument, *ws.ents[m],
               "no eligible operation for material '" + ws.ents[m]->text +
                   "'");
      continue;
    }
    emit(out, Rule::kMO, EdgeLabel::kNext, *ws.ents[m], *ws.ents[target]);
  }
}

void run_o_m(const Workspace& ws, const RuleConfig& config,
             ExtractionResult& out) {
  std::size_t final_op = kNone;
  for (std::size_t op : ws.operations) {
    if (ws.op_eligible(op, config)) final_op = op;
  }
  if (final_op == kNone) return;
  for (std::size_t i = 0; i < ws.ents.size(); ++i) {
    if (ws.ents[i]->label != VertexLabel::kMaterialFinal) continue;
    emit(out, Rule::kOM, EdgeLabel::kNext, *ws.ents[final_op], *ws.ents[i]);
  }
}

bool free_property_eligible(const Entity& e, const RuleConfig& config) {
  if (!config.use_property_sublabels)
    return coarse_of(e.label) == CoarseGroup::kProperty;
  return e.label == VertexLabel::kPropertyOthers;
}

void run_po_om(const Workspace& ws, const RuleConfig& config,
               ExtractionResult& out) {
  for (std::size_t p = 0; p < ws.ents.size(); ++p) {
    if (!free_property_eligible(*ws.ents[p], config)) continue;
    std::size_t host = kNone;
    if (ws.group_of[p] != kNone) {
      // Bracketed property: closest preceding start material.
      for (std::size_t i = 0; i < p; ++i) {
        bool start_like =
            config.use_material_sublabels
                ? ws.ents[i]->label == VertexLabel::kMaterialStart
                : coarse_of(ws.ents[i]->label) == CoarseGroup::kMaterial;
        if (start_like) host = i;
      }
    } else {
      std::vector<std::size_t> candidates;
      for (std::size_t i = 0; i < ws.ents.size(); ++i) {
        if (i == p) continue;
        if (coarse_of(ws.ents[i]->label) == CoarseGroup::kMaterial ||
            ws.ents[i]->label == VertexLabel::kOperation) {
          candidates.push_back(i);
        }
      }
      host = closest(ws, p, candidates);
    }
    if (host == kNone) {
      diagnose(out, DiagCode::kNoHostCandidate, *ws.ents[p],
               "no host candidate for property '" + ws.ents[p]->text + "'");
      continue;
    }
    emit(out, Rule::kPoOM, EdgeLabel::kCondition, *ws.ents[host],
         *ws.ents[p]);
  }
}

void run_p_o(const Workspace& ws, const RuleConfig& config,
             ExtractionResult& out) {
  for (std::size_t p = 0; p < ws.ents.size(); ++p) {
    switch (ws.ents[p]->label) {
      case VertexLabel::kPropertyTime:
      case VertexLabel::kPropertyTemp:
      case VertexLabel::kPropertyRot:
      case VertexLabel::kPropertyPress:
      case VertexLabel::kPropertyAtmosphere:
        break;
      default:
        continue;
    }
    std::size_t host = kNone;
    for (std::size_t op : ws.operations) {
      if (ws.ranges[op].first >= ws.ranges[p].first) break;
      if (!config.bracketed_p_o_hosts && ws.group_of[op] != kNone &&
          config.bracket_chain != BracketChainMode::kInline) {
        continue;
      }
      if (host == kNone || ws.ranges[op].last > ws.ranges[host].last)
        host = op;
    }
    if (host == kNone) {
      diagnose(out, DiagCode::kNoPrecedingOperation, *ws.ents[p],
               "no preceding operation for property '" + ws.ents[p]->text +
                   "'");
      continue;
    }
    emit(out, Rule::kPO, EdgeLabel::kCondition, *ws.ents[host], *ws.ents[p]);
  }
}

void run_rule(Rule rule, const Workspace& ws, const RuleConfig& config,
              ExtractionResult& out) {
  switch (rule) {
    case Rule::kOO:
      run_o_o(ws, config, out);
      break;
    case Rule::kMO:
      run_m_o(ws, config, out);
      break;
    case Rule::kOM:
      run_o_m(ws, config, out);
      break;
    case Rule::kPoOM:
      run_po_om(ws, config, out);
      break;
    case Rule::kPO:
      run_p_o(ws, config, out);
      break;
  }
}

void finalize(const Workspace& ws, ExtractionResult& result) {
  if (ws.brackets.unbalanced) {
    result.diagnostics.insert(
        result.diagnostics.begin(),
        {DiagCode::kUnbalancedBrackets, "",
         "unmatched bracket token, bracket rules skip the stray pair"});
  }
  std::vector<PredictedRelation> unique;
  std::set<std::tuple<std::string, std::string, EdgeLabel>> seen;
  for (PredictedRelation& pr : result.relations) {
    if (!seen.insert({pr.relation.from, pr.relation.to, pr.relation.label})
             .second) {
      continue;
    }
    pr.relation.id = "R" + std::to_string(unique.size() + 1);
    unique.push_back(std::move(pr));
  }
  result.relations = std::move(unique);
}

ExtractionResult run_single(Rule rule, const TokenizedText& doc,
                            std::span<const Entity> entities,
                            const RuleConfig& config) {
  Workspace ws(doc, entities);
  ExtractionResult result;
  if (config.rule_active(rule)) run_rule(rule, ws, config, result);
  finalize(ws, result);
  return result;
}

}  // namespace

bool is_bracketed(const Entity& entity, const TokenizedText& doc) {
  BracketInfo info = scan_brackets(doc);
  TokenRange range = token_range(entity, doc.tokens);
  return enclosing_group(info, range) != kNone;
}

ExtractionResult rule_o_o(const TokenizedText& doc,
                          std::span<const Entity> entities,
                          const RuleConfig& config) {
  return run_single(Rule::kOO, doc, entities, config);
}

ExtractionResult rule_m_o(const TokenizedText& doc,
                          std::span<const Entity> entities,
                          const RuleConfig& config) {
  return run_single(Rule::kMO, doc, entities, config);
}

ExtractionResult rule_o_m(const TokenizedText& doc,
                          std::span<const Entity> entities,
                          const RuleConfig& config) {
  return run_single(Rule::kOM, doc, entities, config);
}

ExtractionResult rule_po_om(const TokenizedText& doc,
                            std::span<const Entity> entities,
                            const RuleConfig& config) {
  return run_single(Rule::kPoOM, doc, entities, config);
}

ExtractionResult rule_p_o(const TokenizedText& doc,
                          std::span<const Entity> entities,
                          const RuleConfig& config) {
  return run_single(Rule::kPO, doc, entities, config);
}

ExtractionResult extract(const TokenizedText& doc,
                         std::span<const Entity> entities,
                         const RuleConfig& config) {
  Workspace ws(doc, entities);
  ExtractionResult result;
  for (Rule rule : kAllRules) {
    if (config.rule_active(rule)) run_rule(rule, ws, config, result);
  }
  finalize(ws, result);
  return result;
}

std::vector<Entity> resolve_token_overlaps(const TokenizedText& doc,
                                           std::vector<Entity> entities) {
  struct Candidate {
    Entity entity;
    TokenRange range;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(entities.size());
  for (Entity& e : entities) {
    TokenRange range = token_range(e, doc.tokens);
    candidates.push_back({std::move(e), range});
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.range.length() != b.range.length())
                return a.range.length() > b.range.length();
              if (a.range.first != b.range.first)
                return a.range.first < b.range.first;
              return a.entity.id < b.entity.id;
            });
  std::vector<Candidate> kept;
  for (Candidate& c : candidates) {
    bool clashes = false;
    for (const Candidate& k : kept) {
      if (k.range.overlaps(c.range)) {
        clashes = true;
        break;
      }
    }
    if (!clashes) kept.push_back(std::move(c));
  }
  std::sort(kept.begin(), kept.end(), [](const Candidate& a,
                                         const Candidate& b) {
    return std::tie(a.range.first, a.entity.id) <
           std::tie(b.range.first, b.entity.id);
  });
  std::vector<Entity> out;
  out.reserve(kept.size());
  for (Candidate& c : kept) out.push_back(std::move(c.entity));
  return out;
}

}  // namespace synthflow
