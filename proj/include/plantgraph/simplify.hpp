#pragma once
// Abstraction-level adjustments applied before graph matching: valve edges
// become valve nodes, pipe/weld runs through coordinate nodes collapse to
// single edges, and directions can be stripped entirely.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "plantgraph/error.hpp"
#include "plantgraph/graph.hpp"

namespace plantgraph {

namespace detail {

inline std::string format_length(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

/// Replaces each Valve edge (u,v) with a synthetic Valve node V plus Pipe
/// edges u->V and V->v. Node and edge counts each grow by the number of
/// Valve edges; no Valve edge survives.
inline LabeledDiGraph valve_edges_to_nodes(const LabeledDiGraph& g) {
  LabeledDiGraph out;
  out.set_directed(g.directed());
  out.metadata() = g.metadata();
  for (const auto& n : g.nodes()) out.add_node(n);

  auto unique_id = [&out](const std::string& base) {
    std::string id = base;
    int suffix = 2;
    while (out.has_node(id)) id = base + "_" + std::to_string(suffix++);
    return id;
  };

  std::size_t ordinal = 0;
  for (const auto& e : g.edges()) {
    if (e.edge_class != EdgeClass::Valve) {
      out.add_edge(e);
      continue;
    }
    ++ordinal;
    GraphNode v;
    v.id = unique_id(e.label.empty() ? "valve-" + std::to_string(ordinal)
                                     : e.label);
    v.label = e.label;
    v.node_class = NodeClass::Valve;
    v.origin = Origin::Synthetic;
    v.attrs = e.attrs;
    std::string vid = v.id;
    out.add_node(std::move(v));
    out.add_edge({e.source, vid, EdgeClass::Pipe, "", {}});
    out.add_edge({vid, e.target, EdgeClass::Pipe, "", {}});
  }
  return out;
}

namespace detail {

struct ChainScan {
  // Path nodes terminal..terminal; edge indices between consecutive nodes.
  std::vector<std::string> path;
  std::vector<std::size_t> edge_indices;
  bool is_cycle = false;
};

inline bool chain_edge(const GraphEdge& e) {
  return e.edge_class == EdgeClass::Pipe || e.edge_class == EdgeClass::Weld;
}

}  // namespace detail

/// Collapses every maximal Pipe/Weld run whose interior nodes are
/// degree-two Coordinate nodes into one Pipe edge between the run's end
/// nodes. Interior nodes are removed; branch points (degree three or more)
/// and all non-Coordinate nodes survive. The replacement edge records the
/// original hop count as attr "chain_length" and, when every node on the
/// run has a coordinate, the summed point-to-point distance as
/// "geom_length". Runs whose edges disagree on direction, or that close a
/// loop, are left as they are with a warning.
inline LabeledDiGraph collapse_piping_chains(const LabeledDiGraph& g) {
  const auto& edges = g.edges();

  // incidence[node] = indices of edges touching it (self-loops twice).
  std::map<std::string, std::vector<std::size_t>> incidence;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    incidence[edges[i].source].push_back(i);
    incidence[edges[i].target].push_back(i);
  }

  auto interior = [&](const std::string& id) {
    const GraphNode* n = g.node(id);
    if (n == nullptr || n->node_class != NodeClass::Coordinate) return false;
    auto it = incidence.find(id);
    if (it == incidence.end() || it->second.size() != 2) return false;
    for (std::size_t i : it->second) {
      if (!detail::chain_edge(edges[i])) return false;
      if (edges[i].source == edges[i].target) return false;
    }
    return it->second[0] != it->second[1];
  };

  auto other_end = [&](std::size_t i, const std::string& id) {
    return edges[i].source == id ? edges[i].target : edges[i].source;
  };

  std::vector<bool> claimed(edges.size(), false);
  std::vector<detail::ChainScan> chains;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (claimed[i] || !detail::chain_edge(edges[i])) continue;

    detail::ChainScan chain;
    chain.path = {edges[i].source, edges[i].target};
    chain.edge_indices = {i};
    claimed[i] = true;

    // Grow at the front, then at the back, through interior nodes.
    for (int side = 0; side < 2; ++side) {
      while (true) {
        const std::string& tip =
            side == 0 ? chain.path.front() : chain.path.back();
        if (!interior(tip)) break;
        const auto& incident = incidence.at(tip);
        std::size_t next =
            claimed[incident[0]] ? incident[1] : incident[0];
        if (claimed[next]) {
          chain.is_cycle = true;  // looped back onto the chain itself
          break;
        }
        claimed[next] = true;
        chain.edge_indices.insert(side == 0 ? chain.edge_indices.begin()
                                            : chain.edge_indices.end(),
                                  next);
        std::string grown = other_end(next, tip);
        if (side == 0) {
          chain.path.insert(chain.path.begin(), std::move(grown));
        } else {
          chain.path.push_back(std::move(grown));
        }
      }
      if (chain.is_cycle) break;
    }
    chains.push_back(std::move(chain));
  }

  // Work out, per chain, whether it collapses and to which edge.
  std::vector<char> edge_drop(edges.size(), 0);
  std::map<std::size_t, GraphEdge> replacement;  // keyed by first edge index
  std::set<std::string> dead_nodes;
  std::vector<std::string> warnings;

  for (const auto& chain : chains) {
    if (chain.is_cycle) {
      warnings.push_back("collapse: pipe run at '" + chain.path.front() +
                         "' closes a loop; left intact");
      continue;
    }
    const auto& path = chain.path;
    const auto& idx = chain.edge_indices;
    if (path.front() == path.back()) {
      warnings.push_back("collapse: pipe run loops back to '" + path.front() +
                         "'; left intact");
      continue;
    }
    bool has_weld = false;
    for (std::size_t i : idx) {
      if (edges[i].edge_class == EdgeClass::Weld) has_weld = true;
    }
    if (idx.size() == 1 && !has_weld) continue;  // lone Pipe edge, keep as-is

    std::size_t forward = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (edges[idx[k]].source == path[k]) ++forward;
    }
    if (g.directed() && forward != 0 && forward != idx.size()) {
      warnings.push_back("collapse: pipe run between '" + path.front() +
                         "' and '" + path.back() +
                         "' mixes edge directions; left intact");
      continue;
    }

    GraphEdge merged;
    if (!g.directed() || forward == idx.size()) {
      merged.source = path.front();
      merged.target = path.back();
    } else {
      merged.source = path.back();
      merged.target = path.front();
    }
    merged.edge_class = EdgeClass::Pipe;
    merged.attrs["chain_length"] = std::to_string(idx.size());
    bool all_located = true;
    double length = 0.0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const GraphNode* a = g.node(path[k]);
      const GraphNode* b = g.node(path[k + 1]);
      if (a == nullptr || b == nullptr || !a->coordinate || !b->coordinate) {
        all_located = false;
        break;
      }
      double dx = b->coordinate->x - a->coordinate->x;
      double dy = b->coordinate->y - a->coordinate->y;
      double dz = b->coordinate->z - a->coordinate->z;
      length += std::sqrt(dx * dx + dy * dy + dz * dz);
    }
    if (all_located) merged.attrs["geom_length"] = detail::format_length(length);

    for (std::size_t i : idx) edge_drop[i] = 1;
    replacement.emplace(*std::min_element(idx.begin(), idx.end()),
                        std::move(merged));
    for (std::size_t k = 1; k + 1 < path.size(); ++k) {
      dead_nodes.insert(path[k]);
    }
  }

  LabeledDiGraph out;
  out.set_directed(g.directed());
  out.metadata() = g.metadata();
  for (const auto& n : g.nodes()) {
    if (!dead_nodes.count(n.id)) out.add_node(n);
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto rep = replacement.find(i);
    if (rep != replacement.end()) {
      out.add_edge(rep->second);
    } else if (!edge_drop[i]) {
      out.add_edge(edges[i]);
    }
  }
  for (auto& w : warnings) out.metadata().warn(std::move(w));
  return out;
}

/// Clears the directed flag and deduplicates mirrored edges: for each
/// unordered node pair and class, the surviving multiplicity is
/// max(forward count, backward count), emitted in canonical low-to-high id
/// order. Node data is untouched.
inline LabeledDiGraph strip_directions(const LabeledDiGraph& g) {
  LabeledDiGraph out;
  out.set_directed(false);
  out.metadata() = g.metadata();
  for (const auto& n : g.nodes()) out.add_node(n);

  using Key = std::tuple<std::string, std::string, EdgeClass>;
  struct Slot {
    GraphEdge prototype;
    std::size_t forward = 0;
    std::size_t backward = 0;
  };
  std::map<Key, Slot> slots;
  std::vector<Key> order;
  for (const auto& e : g.edges()) {
    bool flip = e.target < e.source;
    Key key{flip ? e.target : e.source, flip ? e.source : e.target,
            e.edge_class};
    auto it = slots.find(key);
    if (it == slots.end()) {
      GraphEdge proto = e;
      if (flip) std::swap(proto.source, proto.target);
      it = slots.emplace(key, Slot{std::move(proto), 0, 0}).first;
      order.push_back(key);
    }
    if (flip) {
      ++it->second.backward;
    } else {
      ++it->second.forward;
    }
  }
  for (const auto& key : order) {
    const Slot& slot = slots.at(key);
    std::size_t count = std::max(slot.forward, slot.backward);
    for (std::size_t i = 0; i < count; ++i) out.add_edge(slot.prototype);
  }
  return out;
}

}  // namespace plantgraph
