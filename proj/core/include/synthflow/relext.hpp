#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "synthflow/document.hpp"
#include "synthflow/textprep.hpp"

namespace synthflow {

/// The five edge-drawing rules. O-O chains operations, M-O attaches
/// source materials to operations, O-M connects the last operation to
/// final materials, Po-OM hosts free-form properties, P-O attaches
/// typed conditions to their preceding operation.
enum class Rule { kOO, kMO, kOM, kPoOM, kPO };

inline constexpr std::array<Rule, 5> kAllRules = {
    Rule::kOO, Rule::kMO, Rule::kOM, Rule::kPoOM, Rule::kPO};

std::string_view to_string(Rule rule);  // "O-O", "M-O", ...
std::optional<Rule> parse_rule(std::string_view name);

/// How operations inside brackets join the operation chain:
/// link   — excluded from the main chain, but each gets a Next edge to
///          the nearest following non-bracketed operation;
/// skip   — excluded entirely;
/// inline — treated like ordinary operations.
enum class BracketChainMode { kLink, kSkip, kInline };

std::string_view to_string(BracketChainMode mode);
std::optional<BracketChainMode> parse_bracket_chain_mode(std::string_view name);

struct RuleConfig {
  std::set<Rule> enabled_rules{Rule::kOO, Rule::kMO, Rule::kOM, Rule::kPoOM,
                               Rule::kPO};
  bool use_material_sublabels = true;
  bool use_property_sublabels = true;
  BracketChainMode bracket_chain = BracketChainMode::kLink;
  /// Whether bracketed operations may host typed P-O conditions.
  bool bracketed_p_o_hosts = true;

  /// Ablation presets: full | no-mat-sub | no-prop-sub | no-sub.
  /// Disabling material sublabels widens M-O to every material type and
  /// turns O-M off; disabling property sublabels widens Po-OM to every
  /// property type and turns P-O off.
  static RuleConfig preset(std::string_view name);

  /// A rule is active when enabled and not switched off by the sublabel
  /// ablations.
  bool rule_active(Rule rule) const;
};

struct PredictedRelation {
  Relation relation;
  Rule rule = Rule::kOO;
};

enum class DiagCode {
  kNoOperationInDocument,  // M-O found no eligible operation anywhere
  kNoHostCandidate,        // Po-OM found no host
  kNoPrecedingOperation,   // P-O found no operation at or before the property
  kUnbalancedBrackets,
};

std::string_view to_string(DiagCode code);

struct Diagnostic {
  DiagCode code;
  std::string entity_id;  // empty for document-level notes
  std::string message;
};

struct ExtractionResult {
  std::vector<PredictedRelation> relations;
  std::vector<Diagnostic> diagnostics;
};

/// True iff the entity lies strictly between a matched '(' ')' token
/// pair inside one sentence. Unbalanced brackets never bracket anything.
bool is_bracketed(const Entity& entity, const TokenizedText& doc);

/// Individual rules, mainly for analysis and tests. Entities must be
/// token-disjoint (throws OverlappingEntities otherwise).
ExtractionResult rule_o_o(const TokenizedText& doc,
                          std::span<const Entity> entities,
                          const RuleConfig& config = {});
ExtractionResult rule_m_o(const TokenizedText& doc,
                          std::span<const Entity> entities,
                          const RuleConfig& config = {});
ExtractionResult rule_o_m(const TokenizedText& doc,
                          std::span<const Entity> entities,
                          const RuleConfig& config = {});
ExtractionResult rule_po_om(const TokenizedText& doc,
                            std::span<const Entity> entities,
                            const RuleConfig& config = {});
ExtractionResult rule_p_o(const TokenizedText& doc,
                          std::span<const Entity> entities,
                          const RuleConfig& config = {});

/// Runs the enabled rules in order O-O, M-O, O-M, Po-OM, P-O and unions
/// their output. Duplicate (from, to, label) edges keep the first rule's
/// attribution. Relation ids are assigned R1..Rn in emission order.
ExtractionResult extract(const TokenizedText& doc,
                         std::span<const Entity> entities,
                         const RuleConfig& config = {});

/// Keep-longest resolution for token-overlapping entities: longer token
/// ranges win, earlier start wins ties; losers are dropped. Returns
/// survivors in document order.
std::vector<Entity> resolve_token_overlaps(const TokenizedText& doc,
                                           std::vector<Entity> entities);

}  // namespace synthflow
