#include "synthflow/labels.hpp"

namespace synthflow {

CoarseGroup coarse_of(VertexLabel label) {
  switch (label) {
    case VertexLabel::kMaterialStart:
    case VertexLabel::kMaterialIntermedium:
    case VertexLabel::kMaterialFinal:
    case VertexLabel::kMaterialSolvent:
    case VertexLabel::kMaterialOthers:
      return CoarseGroup::kMaterial;
    case VertexLabel::kOperation:
      return CoarseGroup::kOperation;
    case VertexLabel::kPropertyTime:
    case VertexLabel::kPropertyTemp:
    case VertexLabel::kPropertyRot:
    case VertexLabel::kPropertyPress:
    case VertexLabel::kPropertyAtmosphere:
    case VertexLabel::kPropertyOthers:
      return CoarseGroup::kProperty;
  }
  return CoarseGroup::kProperty;  // unreachable
}

std::string_view to_string(VertexLabel label) {
  switch (label) {
    case VertexLabel::kMaterialStart:       return "Material-Start";
    case VertexLabel::kMaterialIntermedium: return "Material-Intermedium";
    case VertexLabel::kMaterialFinal:       return "Material-Final";
    case VertexLabel::kMaterialSolvent:     return "Material-Solvent";
    case VertexLabel::kMaterialOthers:      return "Material-Others";
    case VertexLabel::kOperation:           return "Operation";
    case VertexLabel::kPropertyTime:        return "Property-Time";
    case VertexLabel::kPropertyTemp:        return "Property-Temp";
    case VertexLabel::kPropertyRot:         return "Property-Rot";
    case VertexLabel::kPropertyPress:       return "Property-Press";
    case VertexLabel::kPropertyAtmosphere:  return "Property-Atmosphere";
    case VertexLabel::kPropertyOthers:      return "Property-Others";
  }
  return "";
}

std::string_view to_string(EdgeLabel label) {
  switch (label) {
    case EdgeLabel::kCondition:   return "Condition";
    case EdgeLabel::kNext:        return "Next";
    case EdgeLabel::kCoreference: return "Coreference";
  }
  return "";
}

std::string_view to_string(CoarseGroup group) {
  switch (group) {
    case CoarseGroup::kMaterial:  return "Material";
    case CoarseGroup::kOperation: return "Operation";
    case CoarseGroup::kProperty:  return "Property";
  }
  return "";
}

std::optional<VertexLabel> parse_vertex_label(std::string_view name) {
  for (VertexLabel label : kAllVertexLabels) {
    if (to_string(label) == name) return label;
  }
  return std::nullopt;
}

std::optional<EdgeLabel> parse_edge_label(std::string_view name) {
  for (EdgeLabel label : kAllEdgeLabels) {
    if (to_string(label) == name) return label;
  }
  return std::nullopt;
}

}  // namespace synthflow
