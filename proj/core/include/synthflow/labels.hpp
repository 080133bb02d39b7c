#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace synthflow {

/// Fine-grained phrase types: five material roles, the single operation
/// type, and six property kinds.
enum class VertexLabel {
  kMaterialStart,
  kMaterialIntermedium,
  kMaterialFinal,
  kMaterialSolvent,
  kMaterialOthers,
  kOperation,
  kPropertyTime,
  kPropertyTemp,
  kPropertyRot,
  kPropertyPress,
  kPropertyAtmosphere,
  kPropertyOthers,
};

enum class CoarseGroup {
  kMaterial,
  kOperation,
  kProperty,
};

enum class EdgeLabel {
  kCondition,
  kNext,
  kCoreference,
};

inline constexpr std::array<VertexLabel, 12> kAllVertexLabels = {
    VertexLabel::kMaterialStart,    VertexLabel::kMaterialIntermedium,
    VertexLabel::kMaterialFinal,    VertexLabel::kMaterialSolvent,
    VertexLabel::kMaterialOthers,   VertexLabel::kOperation,
    VertexLabel::kPropertyTime,     VertexLabel::kPropertyTemp,
    VertexLabel::kPropertyRot,      VertexLabel::kPropertyPress,
    VertexLabel::kPropertyAtmosphere, VertexLabel::kPropertyOthers,
};

inline constexpr std::array<CoarseGroup, 3> kAllCoarseGroups = {
    CoarseGroup::kMaterial,
    CoarseGroup::kOperation,
    CoarseGroup::kProperty,
};

inline constexpr std::array<EdgeLabel, 3> kAllEdgeLabels = {
    EdgeLabel::kCondition,
    EdgeLabel::kNext,
    EdgeLabel::kCoreference,
};

/// Coarse group of a fine label. Total: every fine label belongs to
/// exactly one group (5 material, 1 operation, 6 property).
CoarseGroup coarse_of(VertexLabel label);

/// Label names as written in standoff files ("Material-Start", "Next", ...).
std::string_view to_string(VertexLabel label);
std::string_view to_string(EdgeLabel label);
std::string_view to_string(CoarseGroup group);

/// Case-sensitive lookup; nullopt for anything outside the inventory.
std::optional<VertexLabel> parse_vertex_label(std::string_view name);
std::optional<EdgeLabel> parse_edge_label(std::string_view name);

}  // namespace synthflow
