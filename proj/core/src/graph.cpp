#include "synthflow/graph.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace synthflow {

namespace {

const Entity* require_entity(
    const std::unordered_map<std::string, const Entity*>& by_id,
    const std::string& entity_id, const std::string& relation_id) {
  auto it = by_id.find(entity_id);
  if (it == by_id.end()) {
    throw std::invalid_argument("relation " + relation_id +
                                " references unknown entity " + entity_id);
  }
  return it->second;
}

std::optional<std::vector<std::size_t>> find_next_cycle(
    std::size_t node_count, const std::vector<GraphEdge>& edges) {
  std::vector<std::vector<std::size_t>> adj(node_count);
  for (const GraphEdge& e : edges) {
    if (e.label == EdgeLabel::kNext) adj[e.from].push_back(e.to);
  }
  std::vector<int> color(node_count, 0);  // 0 new, 1 on path, 2 done
  std::vector<std::size_t> path;
  struct Frame {
    std::size_t node;
    std::size_t next = 0;
  };
  for (std::size_t start = 0; start < node_count; ++start) {
    if (color[start] != 0) continue;
    std::vector<Frame> stack{{start, 0}};
    color[start] = 1;
    path.push_back(start);
    while (!stack.empty()) {
      Frame& frame = stack.back();
      if (frame.next < adj[frame.node].size()) {
        std::size_t child = adj[frame.node][frame.next++];
        if (color[child] == 0) {
          color[child] = 1;
          path.push_back(child);
          stack.push_back({child, 0});
        } else if (color[child] == 1) {
          auto it = std::find(path.begin(), path.end(), child);
          return std::vector<std::size_t>(it, path.end());
        }
      } else {
        color[frame.node] = 2;
        path.pop_back();
        stack.pop_back();
      }
    }
  }
  return std::nullopt;
}

SynthesisGraph assemble(
    std::string_view doc_id, std::span<const Entity> entities,
    const std::vector<std::pair<const Relation*, std::optional<Rule>>>& lifted,
    std::span<const Relation> coreference) {
  SynthesisGraph graph;
  graph.doc_id = std::string(doc_id);

  std::unordered_map<std::string, const Entity*> by_id;
  for (const Entity& e : entities) by_id.emplace(e.id, &e);

  ClusterMap clusters = merge_coreference(entities, coreference);
  graph.warnings = clusters.warnings;

  graph.nodes.reserve(clusters.clusters.size());
  for (std::size_t c = 0; c < clusters.clusters.size(); ++c) {
    GraphNode node;
    node.id = c;
    node.members = clusters.clusters[c];
    for (const std::string& member : node.members) {
      node.texts.push_back(by_id.at(member)->text);
    }
    const Entity& rep = *by_id.at(node.members.front());
    node.representative = rep.id;
    node.label = rep.label;
    node.rep_span = rep.first_span();
    graph.nodes.push_back(std::move(node));
  }

  std::set<std::tuple<std::size_t, std::size_t, EdgeLabel>> seen;
  for (const auto& [relation, rule] : lifted) {
    if (relation->label == EdgeLabel::kCoreference) continue;
    const Entity* from = require_entity(by_id, relation->from, relation->id);
    const Entity* to = require_entity(by_id, relation->to, relation->id);
    std::size_t from_c = clusters.cluster_of.at(from->id);
    std::size_t to_c = clusters.cluster_of.at(to->id);
    if (from_c == to_c) {
      graph.warnings.push_back("dropped self-loop edge " + relation->id +
                               " inside cluster of " + from->id);
      continue;
    }
    if (!seen.insert({from_c, to_c, relation->label}).second) continue;
    graph.edges.push_back({from_c, to_c, relation->label, rule});
  }

  if (auto cycle = find_next_cycle(graph.nodes.size(), graph.edges)) {
    std::string message = "flow graph for " + graph.doc_id +
                          " has a cycle through clusters:";
    for (std::size_t node : *cycle) {
      message += " c" + std::to_string(node);
    }
    throw CycleDetected(message, std::move(*cycle));
  }
  return graph;
}

std::string dot_escape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    if (c == '\\' || c == '"') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

ClusterMap merge_coreference(std::span<const Entity> entities,
                             std::span<const Relation> relations) {
  std::unordered_map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    index_of.emplace(entities[i].id, i);
  }

  std::vector<std::size_t> parent(entities.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };

  for (const Relation& r : relations) {
    if (r.label != EdgeLabel::kCoreference) continue;
    auto from = index_of.find(r.from);
    auto to = index_of.find(r.to);
    if (from == index_of.end() || to == index_of.end()) {
      throw std::invalid_argument("coreference relation " + r.id +
                                  " references an unknown entity");
    }
    parent[find(from->second)] = find(to->second);
  }

  std::unordered_map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < entities.size(); ++i) {
    components[find(i)].push_back(i);
  }

  auto span_key = [&entities](std::size_t i) {
    return std::tuple<std::size_t, std::size_t, const std::string&>(
        entities[i].first_span().start, entities[i].first_span().end,
        entities[i].id);
  };

  std::vector<std::vector<std::size_t>> ordered;
  ordered.reserve(components.size());
  for (auto& [root, members] : components) {
    std::sort(members.begin(), members.end(),
              [&](std::size_t a, std::size_t b) {
                return span_key(a) < span_key(b);
              });
    ordered.push_back(std::move(members));
  }
  std::sort(ordered.begin(), ordered.end(),
            [&](const std::vector<std::size_t>& a,
                const std::vector<std::size_t>& b) {
              return span_key(a.front()) < span_key(b.front());
            });

  ClusterMap map;
  map.clusters.reserve(ordered.size());
  for (std::size_t c = 0; c < ordered.size(); ++c) {
    std::vector<std::string> ids;
    CoarseGroup group = coarse_of(entities[ordered[c].front()].label);
    bool mixed = false;
    for (std::size_t i : ordered[c]) {
      ids.push_back(entities[i].id);
      map.cluster_of.emplace(entities[i].id, c);
      mixed = mixed || coarse_of(entities[i].label) != group;
    }
    if (mixed) {
      map.warnings.push_back("coreference cluster of " + ids.front() +
                             " mixes coarse groups");
    }
    map.clusters.push_back(std::move(ids));
  }
  return map;
}

SynthesisGraph build_graph(const AnnotatedDocument& doc) {
  std::vector<std::pair<const Relation*, std::optional<Rule>>> lifted;
  lifted.reserve(doc.relations.size());
  for (const Relation& r : doc.relations) lifted.push_back({&r, std::nullopt});
  return assemble(doc.doc_id, doc.entities, lifted, doc.relations);
}

SynthesisGraph build_graph(std::string_view doc_id,
                           std::span<const Entity> entities,
                           const ExtractionResult& extraction) {
  std::vector<std::pair<const Relation*, std::optional<Rule>>> lifted;
  lifted.reserve(extraction.relations.size());
  for (const PredictedRelation& pr : extraction.relations) {
    lifted.push_back({&pr.relation, pr.rule});
  }
  return assemble(doc_id, entities, lifted, {});
}

std::vector<std::size_t> topo_order(const SynthesisGraph& graph) {
  std::vector<std::size_t> indegree(graph.nodes.size(), 0);
  std::vector<std::vector<std::size_t>> adj(graph.nodes.size());
  for (const GraphEdge& e : graph.edges) {
    if (e.label != EdgeLabel::kNext) continue;
    adj[e.from].push_back(e.to);
    ++indegree[e.to];
  }

  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;
  auto key = [&graph](std::size_t node) {
    return Key(graph.nodes[node].rep_span.start,
               graph.nodes[node].rep_span.end, node);
  };
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    if (indegree[i] == 0) ready.push(key(i));
  }

  std::vector<std::size_t> order;
  order.reserve(graph.nodes.size());
  while (!ready.empty()) {
    std::size_t node = std::get<2>(ready.top());
    ready.pop();
    order.push_back(node);
    for (std::size_t child : adj[node]) {
      if (--indegree[child] == 0) ready.push(key(child));
    }
  }
  if (order.size() != graph.nodes.size()) {
    auto cycle = find_next_cycle(graph.nodes.size(), graph.edges);
    throw CycleDetected("topological order impossible, graph has a cycle",
                        cycle.value_or(std::vector<std::size_t>{}));
  }
  return order;
}

std::string to_dot(const SynthesisGraph& graph) {
  std::ostringstream out;
  out << "digraph \"" << dot_escape(graph.doc_id) << "\" {\n";
  out << "  rankdir=LR;\n";
  out << "  node [fontname=\"Helvetica\", style=filled];\n";
  for (const GraphNode& node : graph.nodes) {
    std::string label;
    for (std::size_t i = 0; i < node.texts.size(); ++i) {
      if (i > 0) label += " = ";
      label += node.texts[i];
    }
    const char* shape = "box";
    const char* fill = "lightcoral";
    switch (coarse_of(node.label)) {
      case CoarseGroup::kMaterial:
        break;
      case CoarseGroup::kOperation:
        shape = "ellipse";
        fill = "palegreen";
        break;
      case CoarseGroup::kProperty:
        shape = "note";
        fill = "khaki";
        break;
    }
    out << "  c" << node.id << " [label=\"" << dot_escape(label)
        << "\", shape=" << shape << ", fillcolor=" << fill << "];\n";
  }
  for (const GraphEdge& edge : graph.edges) {
    out << "  c" << edge.from << " -> c" << edge.to << " [style="
        << (edge.label == EdgeLabel::kCondition ? "dashed" : "solid");
    if (edge.rule) out << ", label=\"" << to_string(*edge.rule) << "\"";
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace synthflow
