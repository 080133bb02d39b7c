#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "synthflow/document.hpp"
#include "synthflow/relext.hpp"

namespace synthflow {

/// Partition of entities into coreference clusters: connected components
/// of the undirected Coreference relation graph, singletons elsewhere.
/// Clusters and their members are ordered by first-span start.
struct ClusterMap {
  std::vector<std::vector<std::string>> clusters;
  std::unordered_map<std::string, std::size_t> cluster_of;
  std::vector<std::string> warnings;
};

ClusterMap merge_coreference(std::span<const Entity> entities,
                             std::span<const Relation> relations);

/// One merged vertex. The representative is the earliest mention by
/// first-span start; label and rep_span come from it.
struct GraphNode {
  std::size_t id = 0;
  VertexLabel label = VertexLabel::kOperation;
  std::string representative;
  std::vector<std::string> members;
  std::vector<std::string> texts;
  Span rep_span;
};

struct GraphEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  EdgeLabel label = EdgeLabel::kNext;
  std::optional<Rule> rule;  // set when the edge came from the extractor
};

/// Flow graph over coreference clusters. Edges carry only Condition and
/// Next labels; the Next subgraph is verified acyclic on construction.
struct SynthesisGraph {
  std::string doc_id;
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  std::vector<std::string> warnings;
};

class CycleDetected : public std::runtime_error {
 public:
  CycleDetected(const std::string& message, std::vector<std::size_t> cycle)
      : std::runtime_error(message), cycle_(std::move(cycle)) {}

  /// Node ids forming one offending cycle, in edge order.
  const std::vector<std::size_t>& cycle() const { return cycle_; }

 private:
  std::vector<std::size_t> cycle_;
};

/// Builds the cluster graph from annotated relations. Coreference
/// relations merge nodes, Condition/Next are lifted onto clusters,
/// duplicates collapse, merge-induced self-loops are dropped with a
/// warning. Throws CycleDetected when the Next subgraph has a cycle and
/// std::invalid_argument on dangling endpoints.
SynthesisGraph build_graph(const AnnotatedDocument& doc);

/// Same, from an extraction run: no coreference, every entity its own
/// node, edges keep their rule attribution.
SynthesisGraph build_graph(std::string_view doc_id,
                           std::span<const Entity> entities,
                           const ExtractionResult& extraction);

/// Kahn's ordering of all nodes; Next edges constrain the order, ties
/// fall back to representative span position. Throws CycleDetected.
std::vector<std::size_t> topo_order(const SynthesisGraph& graph);

/// GraphViz rendering. Materials are filled boxes, operations ellipses,
/// properties notes; Next edges solid, Condition edges dashed.
std::string to_dot(const SynthesisGraph& graph);

}  // namespace synthflow
