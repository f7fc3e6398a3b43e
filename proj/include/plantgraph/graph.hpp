#pragma once
// Labeled directed multigraph shared by the 2D (Proteus) and 3D (PCF)
// ingestion paths, plus short-id assignment and generic merging.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "plantgraph/error.hpp"

namespace plantgraph {

enum class NodeClass {
  Tank,
  Pump,
  Nozzle,
  Valve,
  Instrument,
  EndConnection,
  Coordinate,
  Unknown,
};

enum class EdgeClass {
  Pipe,
  Weld,
  Valve,
  Segment,
  Signal,
  Unknown,
};

enum class Origin {
  Proteus,
  Pcf,
  Synthetic,
};

inline const char* to_string(NodeClass c) {
  switch (c) {
    case NodeClass::Tank: return "Tank";
    case NodeClass::Pump: return "Pump";
    case NodeClass::Nozzle: return "Nozzle";
    case NodeClass::Valve: return "Valve";
    case NodeClass::Instrument: return "Instrument";
    case NodeClass::EndConnection: return "EndConnection";
    case NodeClass::Coordinate: return "Coordinate";
    case NodeClass::Unknown: return "Unknown";
  }
  return "Unknown";
}

inline const char* to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::Pipe: return "Pipe";
    case EdgeClass::Weld: return "Weld";
    case EdgeClass::Valve: return "Valve";
    case EdgeClass::Segment: return "Segment";
    case EdgeClass::Signal: return "Signal";
    case EdgeClass::Unknown: return "Unknown";
  }
  return "Unknown";
}

inline const char* to_string(Origin o) {
  switch (o) {
    case Origin::Proteus: return "Proteus";
    case Origin::Pcf: return "Pcf";
    case Origin::Synthetic: return "Synthetic";
  }
  return "Synthetic";
}

inline std::optional<NodeClass> node_class_from_string(std::string_view s) {
  if (s == "Tank") return NodeClass::Tank;
  if (s == "Pump") return NodeClass::Pump;
  if (s == "Nozzle") return NodeClass::Nozzle;
  if (s == "Valve") return NodeClass::Valve;
  if (s == "Instrument") return NodeClass::Instrument;
  if (s == "EndConnection") return NodeClass::EndConnection;
  if (s == "Coordinate") return NodeClass::Coordinate;
  if (s == "Unknown") return NodeClass::Unknown;
  return std::nullopt;
}

inline std::optional<EdgeClass> edge_class_from_string(std::string_view s) {
  if (s == "Pipe") return EdgeClass::Pipe;
  if (s == "Weld") return EdgeClass::Weld;
  if (s == "Valve") return EdgeClass::Valve;
  if (s == "Segment") return EdgeClass::Segment;
  if (s == "Signal") return EdgeClass::Signal;
  if (s == "Unknown") return EdgeClass::Unknown;
  return std::nullopt;
}

inline std::optional<Origin> origin_from_string(std::string_view s) {
  if (s == "Proteus") return Origin::Proteus;
  if (s == "Pcf") return Origin::Pcf;
  if (s == "Synthetic") return Origin::Synthetic;
  return std::nullopt;
}

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct GraphNode {
  std::string id;        // unique within a graph
  std::string short_id;  // e.g. "E3"; presentation metadata, regenerable
  std::string label;     // human readable tag, may be empty
  NodeClass node_class = NodeClass::Unknown;
  std::optional<Vec3> coordinate;  // in the source file's declared units
  Origin origin = Origin::Synthetic;
  // Carried metadata (pipeline name, end-connection tag/reference, ...).
  // Not part of graph equality.
  std::map<std::string, std::string> attrs;
};

struct GraphEdge {
  std::string source;
  std::string target;
  EdgeClass edge_class = EdgeClass::Unknown;
  std::string label;  // e.g. valve name, may be empty
  std::map<std::string, std::string> attrs;
};

struct GraphMetadata {
  std::vector<std::string> sources;
  std::string units_bore;
  std::string units_coords;
  std::map<std::string, std::string> options;
  std::vector<std::string> warnings;

  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

/// Directed multigraph with class-labeled nodes and edges. Append-only:
/// transformations build new graphs rather than mutating in place. Node ids
/// are unique; every edge endpoint must reference an existing node.
class LabeledDiGraph {
 public:
  bool directed() const { return directed_; }
  void set_directed(bool directed) { directed_ = directed; }

  const std::vector<GraphNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }

  GraphMetadata& metadata() { return metadata_; }
  const GraphMetadata& metadata() const { return metadata_; }

  bool empty() const { return nodes_.empty(); }

  bool has_node(std::string_view id) const {
    return index_.find(std::string(id)) != index_.end();
  }

  const GraphNode* node(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &nodes_[it->second];
  }

  /// Mutable node access for label/class upgrades. The id field must not
  /// be changed through this pointer.
  GraphNode* node(std::string_view id) {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &nodes_[it->second];
  }

  void add_node(GraphNode n) {
    if (n.id.empty()) {
      throw Error(ErrorCode::MissingId, "graph node with empty id");
    }
    auto [it, inserted] = index_.emplace(n.id, nodes_.size());
    if (!inserted) {
      throw Error(ErrorCode::DuplicateId, "duplicate node id '" + n.id + "'");
    }
    nodes_.push_back(std::move(n));
  }

  void add_edge(GraphEdge e) {
    if (!has_node(e.source)) {
      throw Error(ErrorCode::DanglingEdge,
                  "edge references missing node '" + e.source + "'");
    }
    if (!has_node(e.target)) {
      throw Error(ErrorCode::DanglingEdge,
                  "edge references missing node '" + e.target + "'");
    }
    edges_.push_back(std::move(e));
  }

 private:
  bool directed_ = true;
  std::vector<GraphNode> nodes_;
  std::vector<GraphEdge> edges_;
  GraphMetadata metadata_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Short-id prefix per component class. Equipment shares "E"; coordinate
/// and end-connection nodes share "C".
inline char short_id_prefix(NodeClass c) {
  switch (c) {
    case NodeClass::Tank:
    case NodeClass::Pump: return 'E';
    case NodeClass::Nozzle: return 'N';
    case NodeClass::Instrument: return 'I';
    case NodeClass::Valve: return 'V';
    case NodeClass::Coordinate:
    case NodeClass::EndConnection: return 'C';
    case NodeClass::Unknown: return 'X';
  }
  return 'X';
}

/// Assigns every node a short id <prefix><counter>, counters starting at 1
/// per prefix, in lexicographic node-id order. Existing short ids are
/// overwritten, which makes the operation idempotent.
inline LabeledDiGraph assign_short_ids(LabeledDiGraph graph) {
  std::vector<std::string> ids;
  ids.reserve(graph.nodes().size());
  for (const auto& n : graph.nodes()) ids.push_back(n.id);
  std::sort(ids.begin(), ids.end());

  std::map<char, int> counters;
  for (const auto& id : ids) {
    GraphNode* n = graph.node(id);
    char prefix = short_id_prefix(n->node_class);
    n->short_id = prefix + std::to_string(++counters[prefix]);
  }
  return graph;
}

using NodeIdentity =
    std::function<bool(const GraphNode&, const GraphNode&)>;

namespace detail {

struct UnionFind {
  std::vector<std::size_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = i;
  }

  std::size_t find(std::size_t v) {
    while (parent[v] != v) {
      parent[v] = parent[parent[v]];
      v = parent[v];
    }
    return v;
  }

  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

inline void check_identity_within(const LabeledDiGraph& g,
                                  const NodeIdentity& identity,
                                  const char* which) {
  const auto& nodes = g.nodes();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      if (identity(nodes[i], nodes[j])) {
        throw Error(ErrorCode::IdentityConflict,
                    std::string("identity predicate matches nodes '") +
                        nodes[i].id + "' and '" + nodes[j].id +
                        "' within the " + which + " operand");
      }
    }
  }
}

}  // namespace detail

/// Merges two graphs. Node pairs matched by `identity` (evaluated across the
/// operands, closed transitively via union-find) are fused into one node; the
/// first operand wins on label/class conflicts, with a warning recorded in
/// the result metadata. Edges are re-pointed at fused nodes and deduplicated
/// by (source, target, class). Throws IdentityConflict if the predicate
/// matches two nodes inside a single operand, or if both operands carry an
/// unfused node with the same id.
inline LabeledDiGraph merge_graphs(const LabeledDiGraph& a,
                                   const LabeledDiGraph& b,
                                   const NodeIdentity& identity) {
  detail::check_identity_within(a, identity, "first");
  detail::check_identity_within(b, identity, "second");

  const std::size_t na = a.nodes().size();
  const std::size_t nb = b.nodes().size();
  detail::UnionFind uf(na + nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (identity(a.nodes()[i], b.nodes()[j])) uf.unite(i, na + j);
    }
  }

  LabeledDiGraph out;
  out.set_directed(a.directed());

  // Representative per class: lowest node id from the first operand if the
  // class has one, otherwise lowest node id from the second.
  std::unordered_map<std::size_t, std::size_t> rep;  // class root -> flat index
  auto flat_node = [&](std::size_t flat) -> const GraphNode& {
    return flat < na ? a.nodes()[flat] : b.nodes()[flat - na];
  };
  for (std::size_t flat = 0; flat < na + nb; ++flat) {
    std::size_t root = uf.find(flat);
    auto it = rep.find(root);
    if (it == rep.end()) {
      rep.emplace(root, flat);
      continue;
    }
    std::size_t cur = it->second;
    bool cur_in_a = cur < na;
    bool new_in_a = flat < na;
    if (new_in_a != cur_in_a) {
      if (new_in_a) it->second = flat;
      continue;
    }
    if (flat_node(flat).id < flat_node(cur).id) it->second = flat;
  }

  // Fuse node data. The representative's fields seed the fused node; the
  // remaining members are merged in operand order (all of a, then all of b).
  std::map<std::size_t, GraphNode> fused;  // class root -> fused node
  std::vector<std::size_t> root_order;
  auto absorb = [&](std::size_t flat) {
    const GraphNode& n = flat_node(flat);
    std::size_t root = uf.find(flat);
    auto it = fused.find(root);
    if (it == fused.end()) {
      it = fused.emplace(root, flat_node(rep.at(root))).first;
      root_order.push_back(root);
    }
    if (flat == rep.at(root)) return;
    GraphNode& dst = it->second;
    if (dst.label.empty()) {
      dst.label = n.label;
    } else if (!n.label.empty() && n.label != dst.label) {
      out.metadata().warn("merge: node '" + dst.id + "' label '" + dst.label +
                          "' kept over '" + n.label + "'");
    }
    if (dst.node_class == NodeClass::Unknown) {
      dst.node_class = n.node_class;
    } else if (n.node_class != NodeClass::Unknown &&
               n.node_class != dst.node_class) {
      out.metadata().warn("merge: node '" + dst.id + "' class '" +
                          std::string(to_string(dst.node_class)) +
                          "' kept over '" + to_string(n.node_class) + "'");
    }
    if (!dst.coordinate && n.coordinate) dst.coordinate = n.coordinate;
    if (dst.short_id.empty()) dst.short_id = n.short_id;
    for (const auto& [k, v] : n.attrs) dst.attrs.emplace(k, v);
  };
  for (std::size_t i = 0; i < na; ++i) absorb(i);
  for (std::size_t j = 0; j < nb; ++j) absorb(na + j);

  // Unfused id collisions across operands would silently alias distinct
  // nodes; refuse them instead.
  std::set<std::string> seen_ids;
  for (std::size_t root : root_order) {
    if (!seen_ids.insert(fused.at(root).id).second) {
      throw Error(ErrorCode::IdentityConflict,
                  "node id '" + fused.at(root).id +
                      "' appears in both operands without being identified");
    }
  }
  for (std::size_t root : root_order) out.add_node(fused.at(root));

  // Re-point edges at representatives; drop self-loops created by fusion;
  // dedupe by (source, target, class).
  std::unordered_map<std::string, std::string> remap;
  for (std::size_t flat = 0; flat < na + nb; ++flat) {
    remap[flat_node(flat).id] = flat_node(rep.at(uf.find(flat))).id;
  }
  // Distinct ids in the two operands can coincide textually only when fused
  // (checked above), so a flat map keyed by id is unambiguous.
  std::set<std::tuple<std::string, std::string, EdgeClass>> seen_edges;
  auto add_edges = [&](const LabeledDiGraph& g) {
    for (const auto& e : g.edges()) {
      GraphEdge copy = e;
      copy.source = remap.at(e.source);
      copy.target = remap.at(e.target);
      if (copy.source == copy.target) {
        out.metadata().warn("merge: dropped self-loop on '" + copy.source +
                            "' created by node fusion");
        continue;
      }
      if (!seen_edges.emplace(copy.source, copy.target, copy.edge_class)
               .second) {
        continue;
      }
      out.add_edge(std::move(copy));
    }
  };
  add_edges(a);
  add_edges(b);

  // Metadata: union of sources, first operand wins on units and options.
  GraphMetadata& md = out.metadata();
  md.sources = a.metadata().sources;
  for (const auto& s : b.metadata().sources) {
    if (std::find(md.sources.begin(), md.sources.end(), s) == md.sources.end())
      md.sources.push_back(s);
  }
  md.units_bore = a.metadata().units_bore.empty() ? b.metadata().units_bore
                                                  : a.metadata().units_bore;
  md.units_coords = a.metadata().units_coords.empty()
                        ? b.metadata().units_coords
                        : a.metadata().units_coords;
  md.options = a.metadata().options;
  for (const auto& [k, v] : b.metadata().options) md.options.emplace(k, v);
  std::vector<std::string> warnings = a.metadata().warnings;
  warnings.insert(warnings.end(), b.metadata().warnings.begin(),
                  b.metadata().warnings.end());
  warnings.insert(warnings.end(), md.warnings.begin(), md.warnings.end());
  md.warnings = std::move(warnings);

  return out;
}

/// Graph equality for tests and round-trip checks: equal directedness, equal
/// node sets over (id, label, class, coordinate, origin) and equal edge
/// multisets over (source, target, class). Short ids, attrs and metadata are
/// presentation/bookkeeping and do not participate.
inline bool graphs_equal(const LabeledDiGraph& a, const LabeledDiGraph& b) {
  if (a.directed() != b.directed()) return false;
  if (a.nodes().size() != b.nodes().size()) return false;
  if (a.edges().size() != b.edges().size()) return false;

  for (const auto& n : a.nodes()) {
    const GraphNode* m = b.node(n.id);
    if (m == nullptr) return false;
    if (n.label != m->label || n.node_class != m->node_class ||
        n.coordinate != m->coordinate || n.origin != m->origin) {
      return false;
    }
  }

  using EdgeKey = std::tuple<std::string, std::string, EdgeClass>;
  auto edge_keys = [](const LabeledDiGraph& g) {
    std::vector<EdgeKey> keys;
    keys.reserve(g.edges().size());
    for (const auto& e : g.edges())
      keys.emplace_back(e.source, e.target, e.edge_class);
    std::sort(keys.begin(), keys.end());
    return keys;
  };
  return edge_keys(a) == edge_keys(b);
}

/// Number of connected components of the undirected view.
inline std::size_t count_undirected_components(const LabeledDiGraph& g) {
  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t i = 0; i < g.nodes().size(); ++i)
    pos.emplace(g.nodes()[i].id, i);
  detail::UnionFind uf(g.nodes().size());
  for (const auto& e : g.edges()) uf.unite(pos.at(e.source), pos.at(e.target));
  std::set<std::size_t> roots;
  for (std::size_t i = 0; i < g.nodes().size(); ++i) roots.insert(uf.find(i));
  return roots.size();
}

}  // namespace plantgraph
