#pragma once
// Flow-direction assignment for PCF-derived graphs. A root end node is
// selected by one of four strategies, then every edge reachable from it is
// re-pointed away from the root by a breadth-first traversal. The reachable
// component must be acyclic; anything unreachable is left untouched.

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "plantgraph/error.hpp"
#include "plantgraph/graph.hpp"
#include "plantgraph/pcf.hpp"

namespace plantgraph {

enum class Axis { X, Y, Z };

inline const char* to_string(Axis a) {
  switch (a) {
    case Axis::X: return "x";
    case Axis::Y: return "y";
    case Axis::Z: return "z";
  }
  return "?";
}

inline std::optional<Axis> axis_from_string(std::string_view s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  return std::nullopt;
}

inline double axis_value(const Vec3& v, Axis a) {
  switch (a) {
    case Axis::X: return v.x;
    case Axis::Y: return v.y;
    case Axis::Z: return v.z;
  }
  return 0.0;
}

/// Root at the node coinciding with the pipeline's START-CO-ORDS record.
struct RootFromStartCoords {};

/// Root at the end connection with strictly maximal coordinate along
/// up_axis. Candidates closer than epsilon are a tie, which is an error.
struct RootFromElevation {
  Axis up_axis = Axis::Z;
};

/// Root at a caller-chosen node.
struct RootExplicit {
  std::string node_id;
};

enum class PumpRole { Origin, Terminus };

/// Maps equipment nozzle tags to their role relative to flow. The end
/// connection whose tag maps to Origin becomes the root.
struct RootFromPumpMap {
  std::map<std::string, PumpRole> roles;
};

using RootStrategy = std::variant<RootFromStartCoords, RootFromElevation,
                                  RootExplicit, RootFromPumpMap>;

namespace detail {

inline double graph_epsilon(const LabeledDiGraph& g) {
  auto it = g.metadata().options.find("epsilon");
  if (it == g.metadata().options.end()) return 1.0;
  char* end = nullptr;
  double value = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || !(value > 0.0)) return 1.0;
  return value;
}

inline std::vector<const GraphNode*> end_connection_nodes(
    const LabeledDiGraph& g) {
  std::vector<const GraphNode*> out;
  for (const auto& n : g.nodes()) {
    if (n.node_class == NodeClass::EndConnection && n.coordinate) {
      out.push_back(&n);
    }
  }
  return out;
}

}  // namespace detail

/// Picks the orientation root. StartCoords consults `pipeline`; the other
/// strategies only look at the graph, and accept a default-constructed
/// pipeline.
inline std::string find_root(const LabeledDiGraph& g,
                             const PcfPipeline& pipeline,
                             const RootStrategy& strategy) {
  const double epsilon = detail::graph_epsilon(g);

  if (std::holds_alternative<RootFromStartCoords>(strategy)) {
    if (!pipeline.start_coords) {
      throw Error(ErrorCode::NoStartCoords,
                  "pipeline '" + pipeline.name +
                      "' has no START-CO-ORDS record");
    }
    QuantizedCoord want = quantize(*pipeline.start_coords, epsilon);
    std::string found;
    for (const auto& n : g.nodes()) {
      if (!n.coordinate || quantize(*n.coordinate, epsilon) != want) continue;
      if (found.empty() || n.id < found) found = n.id;
    }
    if (found.empty()) {
      throw Error(ErrorCode::UnknownNode,
                  "no node at the pipeline's START-CO-ORDS");
    }
    return found;
  }

  if (const auto* elevation = std::get_if<RootFromElevation>(&strategy)) {
    auto candidates = detail::end_connection_nodes(g);
    if (candidates.empty()) {
      throw Error(ErrorCode::UnknownNode,
                  "graph has no end-connection nodes with coordinates");
    }
    const GraphNode* best = candidates.front();
    for (const GraphNode* c : candidates) {
      if (axis_value(*c->coordinate, elevation->up_axis) >
          axis_value(*best->coordinate, elevation->up_axis)) {
        best = c;
      }
    }
    double top = axis_value(*best->coordinate, elevation->up_axis);
    for (const GraphNode* c : candidates) {
      if (c == best) continue;
      double v = axis_value(*c->coordinate, elevation->up_axis);
      if (top - v < epsilon) {
        throw Error(ErrorCode::ElevationTie,
                    "end connections '" + best->id + "' and '" + c->id +
                        "' are within " + std::to_string(epsilon) +
                        " along " + to_string(elevation->up_axis));
      }
    }
    return best->id;
  }

  if (const auto* explicit_root = std::get_if<RootExplicit>(&strategy)) {
    if (!g.has_node(explicit_root->node_id)) {
      throw Error(ErrorCode::UnknownNode,
                  "node '" + explicit_root->node_id + "' not in graph");
    }
    return explicit_root->node_id;
  }

  const auto& pump_map = std::get<RootFromPumpMap>(strategy);
  std::vector<std::string> origins;
  for (const auto& n : g.nodes()) {
    if (n.node_class != NodeClass::EndConnection) continue;
    auto tag = n.attrs.find("tag");
    if (tag == n.attrs.end() || tag->second.empty()) continue;
    auto role = pump_map.roles.find(tag->second);
    if (role != pump_map.roles.end() && role->second == PumpRole::Origin) {
      origins.push_back(n.id);
    }
  }
  if (origins.empty()) {
    throw Error(ErrorCode::UnknownNode,
                "no end connection carries a tag mapped to 'origin'");
  }
  if (origins.size() > 1) {
    std::sort(origins.begin(), origins.end());
    throw Error(ErrorCode::AmbiguousRoot,
                "several end connections map to 'origin': '" + origins[0] +
                    "', '" + origins[1] + "'" +
                    (origins.size() > 2 ? ", ..." : ""));
  }
  return origins.front();
}

/// Directs every edge in root's component away from the root. The component
/// must be a tree in the undirected sense; edges outside it are kept as they
/// were, with a warning. Node set and undirected edge multiset are
/// unchanged.
inline LabeledDiGraph orient_from_root(const LabeledDiGraph& g,
                                       const std::string& root) {
  if (!g.has_node(root)) {
    throw Error(ErrorCode::UnknownNode, "root '" + root + "' not in graph");
  }

  std::map<std::string, std::vector<std::string>> adjacent;
  for (const auto& e : g.edges()) {
    adjacent[e.source].push_back(e.target);
    adjacent[e.target].push_back(e.source);
  }
  for (auto& [id, neighbors] : adjacent) {
    std::sort(neighbors.begin(), neighbors.end());
  }

  std::map<std::string, std::string> parent;
  std::set<std::string> visited{root};
  std::deque<std::string> queue{root};
  while (!queue.empty()) {
    std::string u = std::move(queue.front());
    queue.pop_front();
    auto it = adjacent.find(u);
    if (it == adjacent.end()) continue;
    for (const auto& w : it->second) {
      if (visited.insert(w).second) {
        parent[w] = u;
        queue.push_back(w);
      }
    }
  }

  std::size_t component_edges = 0;
  std::size_t outside_edges = 0;
  for (const auto& e : g.edges()) {
    if (visited.count(e.source) && visited.count(e.target)) {
      ++component_edges;
    } else {
      ++outside_edges;
    }
  }
  if (component_edges != visited.size() - 1) {
    throw Error(ErrorCode::CycleDetected,
                "component of root '" + root +
                    "' is not a tree: " + std::to_string(visited.size()) +
                    " nodes, " + std::to_string(component_edges) + " edges");
  }

  LabeledDiGraph out;
  out.set_directed(g.directed());
  out.metadata() = g.metadata();
  for (const auto& n : g.nodes()) out.add_node(n);
  for (const auto& e : g.edges()) {
    if (visited.count(e.source) && visited.count(e.target)) {
      auto p = parent.find(e.source);
      if (p != parent.end() && p->second == e.target) {
        GraphEdge flipped = e;
        std::swap(flipped.source, flipped.target);
        out.add_edge(std::move(flipped));
        continue;
      }
    }
    out.add_edge(e);
  }
  if (outside_edges > 0) {
    out.metadata().warn("orient: " + std::to_string(outside_edges) +
                        " edge(s) not reachable from root '" + root +
                        "' left untouched");
  }
  out.metadata().options["root"] = root;
  return out;
}

}  // namespace plantgraph
