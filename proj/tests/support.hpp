#pragma once
// Shared test helpers: fixture loading, randomized instance generators, and
// the property suites reused by both the unit binaries and the acceptance
// runner. Every suite returns the first violation found, or nullopt.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <plantgraph/plantgraph.hpp>

namespace testsup {

using plantgraph::EdgeClass;
using plantgraph::GraphEdge;
using plantgraph::GraphNode;
using plantgraph::LabeledDiGraph;
using plantgraph::NodeClass;
using plantgraph::Origin;
using plantgraph::PcfPipeline;
using plantgraph::Vec3;

inline std::string fixtures_dir() {
  const char* env = std::getenv("FIXTURES_DIR");
  return (env != nullptr && *env != '\0') ? env : "tests/fixtures";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string read_fixture(const std::string& name) {
  return read_file(fixtures_dir() + "/" + name);
}

// Minimal integer union-find, independent of the library's merging code.
struct MiniUf {
  std::vector<std::size_t> parent;
  explicit MiniUf(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }
};

// ---------------------------------------------------------------- generators

inline std::string printable_token(std::mt19937& rng, std::size_t max_len = 8) {
  static constexpr char alphabet[] =
      "abcdefghijklmnopqrstuvwxyz"
      "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 _-./:#<>&\"'";
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, sizeof(alphabet) - 2);
  std::size_t n = len(rng);
  std::string out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out += alphabet[pick(rng)];
  return out;
}

inline Vec3 random_coord(std::mt19937& rng) {
  std::uniform_int_distribution<int> grid(-80, 80);
  return Vec3{grid(rng) * 0.25, grid(rng) * 0.25, grid(rng) * 0.25};
}

inline NodeClass random_node_class(std::mt19937& rng) {
  static constexpr NodeClass kClasses[] = {
      NodeClass::Tank,       NodeClass::Pump,          NodeClass::Nozzle,
      NodeClass::Valve,      NodeClass::Instrument,    NodeClass::Coordinate,
      NodeClass::EndConnection, NodeClass::Unknown};
  return kClasses[std::uniform_int_distribution<int>(0, 7)(rng)];
}

inline EdgeClass random_edge_class(std::mt19937& rng) {
  static constexpr EdgeClass kClasses[] = {EdgeClass::Pipe,  EdgeClass::Weld,
                                           EdgeClass::Valve, EdgeClass::Segment,
                                           EdgeClass::Signal, EdgeClass::Unknown};
  return kClasses[std::uniform_int_distribution<int>(0, 5)(rng)];
}

/// Arbitrary graph exercising every field: random classes, labels, attrs,
/// optional coordinates, self-loops and parallel edges allowed.
inline LabeledDiGraph random_graph(std::mt19937& rng,
                                   std::size_t max_nodes = 10,
                                   std::size_t max_edges = 14) {
  LabeledDiGraph g;
  std::uniform_int_distribution<int> coin(0, 1);
  g.set_directed(coin(rng) == 0);
  std::size_t n =
      std::uniform_int_distribution<std::size_t>(0, max_nodes)(rng);
  for (std::size_t i = 0; i < n; ++i) {
    GraphNode node;
    node.id = "n" + std::to_string(i);
    node.short_id = coin(rng) ? "s" + std::to_string(i) : "";
    node.label = printable_token(rng);
    node.node_class = random_node_class(rng);
    if (coin(rng)) node.coordinate = random_coord(rng);
    node.origin = static_cast<Origin>(
        std::uniform_int_distribution<int>(0, 2)(rng));
    int attrs = std::uniform_int_distribution<int>(0, 2)(rng);
    for (int a = 0; a < attrs; ++a) {
      node.attrs["k" + std::to_string(a)] = printable_token(rng);
    }
    g.add_node(std::move(node));
  }
  if (n > 0) {
    std::size_t m =
        std::uniform_int_distribution<std::size_t>(0, max_edges)(rng);
    std::uniform_int_distribution<std::size_t> node_pick(0, n - 1);
    for (std::size_t i = 0; i < m; ++i) {
      GraphEdge e;
      e.source = "n" + std::to_string(node_pick(rng));
      e.target = "n" + std::to_string(node_pick(rng));
      e.edge_class = random_edge_class(rng);
      e.label = printable_token(rng, 5);
      if (coin(rng)) e.attrs["w"] = printable_token(rng, 4);
      g.add_edge(std::move(e));
    }
  }
  auto& md = g.metadata();
  if (coin(rng)) md.units_bore = "MM";
  if (coin(rng)) md.units_coords = "MM";
  int options = std::uniform_int_distribution<int>(0, 2)(rng);
  for (int i = 0; i < options; ++i) {
    md.options["o" + std::to_string(i)] = printable_token(rng, 5);
  }
  if (coin(rng)) md.sources.push_back(printable_token(rng, 6));
  if (coin(rng)) md.warnings.push_back(printable_token(rng, 12));
  return g;
}

/// Random labeled tree with random per-edge storage direction; suitable for
/// orientation tests. Node ids are zero-padded for stable ordering.
inline LabeledDiGraph random_tree(std::mt19937& rng, std::size_t max_nodes = 12) {
  LabeledDiGraph g;
  std::size_t n = std::uniform_int_distribution<std::size_t>(2, max_nodes)(rng);
  auto id_of = [](std::size_t i) {
    std::string s = std::to_string(i);
    return "t" + std::string(2 - std::min<std::size_t>(2, s.size()), '0') + s;
  };
  std::uniform_int_distribution<int> coin(0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    GraphNode node;
    node.id = id_of(i);
    node.node_class = i == 0 ? NodeClass::EndConnection : NodeClass::Coordinate;
    node.coordinate = random_coord(rng);
    node.origin = Origin::Pcf;
    g.add_node(std::move(node));
  }
  static constexpr EdgeClass kPiping[] = {EdgeClass::Pipe, EdgeClass::Weld,
                                          EdgeClass::Valve};
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t parent = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    GraphEdge e;
    e.source = coin(rng) ? id_of(parent) : id_of(i);
    e.target = e.source == id_of(parent) ? id_of(i) : id_of(parent);
    e.edge_class = kPiping[std::uniform_int_distribution<int>(0, 2)(rng)];
    g.add_edge(std::move(e));
  }
  return g;
}

/// Plant-shaped graph for collapse tests: preserved terminal nodes joined by
/// chains of degree-two Coordinate interiors, every chain coherently
/// directed. Returns the ids of the preserved nodes too.
inline std::pair<LabeledDiGraph, std::vector<std::string>> random_chain_graph(
    std::mt19937& rng) {
  LabeledDiGraph g;
  std::uniform_int_distribution<int> coin(0, 1);
  std::size_t preserved =
      std::uniform_int_distribution<std::size_t>(2, 6)(rng);
  static constexpr NodeClass kTerminal[] = {
      NodeClass::EndConnection, NodeClass::Valve, NodeClass::Tank,
      NodeClass::Pump};
  std::vector<std::string> terminals;
  for (std::size_t i = 0; i < preserved; ++i) {
    GraphNode node;
    node.id = "P" + std::to_string(i);
    node.node_class = kTerminal[std::uniform_int_distribution<int>(0, 3)(rng)];
    node.coordinate = random_coord(rng);
    node.origin = Origin::Pcf;
    terminals.push_back(node.id);
    g.add_node(std::move(node));
  }
  std::size_t chains = std::uniform_int_distribution<std::size_t>(1, 7)(rng);
  std::uniform_int_distribution<std::size_t> t_pick(0, preserved - 1);
  for (std::size_t c = 0; c < chains; ++c) {
    std::size_t a = t_pick(rng);
    std::size_t b = t_pick(rng);
    if (a == b) continue;  // self-chains are handled by dedicated tests
    std::size_t interior = std::uniform_int_distribution<std::size_t>(0, 4)(rng);
    std::vector<std::string> path{terminals[a]};
    for (std::size_t k = 0; k < interior; ++k) {
      GraphNode node;
      node.id = "c" + std::to_string(c) + "_" + std::to_string(k);
      node.node_class = NodeClass::Coordinate;
      node.coordinate = random_coord(rng);
      node.origin = Origin::Pcf;
      path.push_back(node.id);
      g.add_node(std::move(node));
    }
    path.push_back(terminals[b]);
    bool forward = coin(rng) == 0;
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      GraphEdge e;
      e.source = forward ? path[k] : path[k + 1];
      e.target = forward ? path[k + 1] : path[k];
      e.edge_class = coin(rng) ? EdgeClass::Pipe : EdgeClass::Weld;
      g.add_edge(std::move(e));
    }
  }
  if (coin(rng) == 0 && preserved >= 2) {
    GraphEdge e;  // non-piping edges must never take part in a collapse
    e.source = terminals[0];
    e.target = terminals[1];
    e.edge_class = EdgeClass::Signal;
    g.add_edge(std::move(e));
  }
  return {std::move(g), std::move(terminals)};
}

/// Random pipeline on a coarse lattice: endpoints jitter within the default
/// tolerance, so coincidence is exactly lattice-point equality.
inline PcfPipeline random_pipeline(std::mt19937& rng,
                                   std::size_t max_components = 20) {
  PcfPipeline pl;
  pl.name = "L-R" + std::to_string(
                        std::uniform_int_distribution<int>(1, 999)(rng));
  pl.units.bore = "MM";
  pl.units.coords = "MM";

  std::uniform_int_distribution<int> cell(0, 3);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  auto lattice_point = [&](int& lx, int& ly, int& lz) {
    lx = cell(rng);
    ly = cell(rng);
    lz = cell(rng);
  };
  auto place = [&](int lx, int ly, int lz) {
    return Vec3{lx * 10.0 + jitter(rng), ly * 10.0 + jitter(rng),
                lz * 10.0 + jitter(rng)};
  };

  static constexpr plantgraph::PcfComponentKind kKinds[] = {
      plantgraph::PcfComponentKind::Pipe, plantgraph::PcfComponentKind::Weld,
      plantgraph::PcfComponentKind::Valve};
  std::size_t n =
      std::uniform_int_distribution<std::size_t>(1, max_components)(rng);
  std::vector<std::tuple<int, int, int>> used;
  for (std::size_t i = 0; i < n; ++i) {
    int ax, ay, az, bx, by, bz;
    lattice_point(ax, ay, az);
    do {
      lattice_point(bx, by, bz);
    } while (ax == bx && ay == by && az == bz);
    plantgraph::PcfComponent c;
    c.kind = kKinds[std::uniform_int_distribution<int>(0, 2)(rng)];
    c.keyword = to_string(c.kind);
    c.endpoints.push_back({place(ax, ay, az), 50.0});
    c.endpoints.push_back({place(bx, by, bz), 50.0});
    pl.components.push_back(std::move(c));
    used.emplace_back(ax, ay, az);
    used.emplace_back(bx, by, bz);
  }

  if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
    std::size_t ends = std::uniform_int_distribution<std::size_t>(1, 2)(rng);
    for (std::size_t i = 0; i < ends && i < used.size(); ++i) {
      auto [lx, ly, lz] =
          used[std::uniform_int_distribution<std::size_t>(0, used.size() - 1)(rng)];
      plantgraph::EndConnection ec;
      ec.kind = plantgraph::EndConnectionKind::Equipment;
      ec.coordinate = place(lx, ly, lz);
      ec.tag = "NZ-" + std::to_string(i) + "-" +
               std::to_string(std::uniform_int_distribution<int>(1, 99)(rng));
      pl.end_connections.push_back(std::move(ec));
    }
  }
  return pl;
}

// ------------------------------------------------------------------- checks

inline std::optional<std::string> integrity_violation(const LabeledDiGraph& g) {
  std::set<std::string> ids;
  for (const auto& n : g.nodes()) {
    if (n.id.empty()) return "node with empty id";
    if (!ids.insert(n.id).second) return "duplicate node id " + n.id;
  }
  for (const auto& e : g.edges()) {
    if (!ids.count(e.source)) return "edge source " + e.source + " missing";
    if (!ids.count(e.target)) return "edge target " + e.target + " missing";
  }
  return std::nullopt;
}

inline std::vector<std::tuple<std::string, std::string, EdgeClass>>
undirected_multiset(const LabeledDiGraph& g) {
  std::vector<std::tuple<std::string, std::string, EdgeClass>> out;
  for (const auto& e : g.edges()) {
    out.emplace_back(std::min(e.source, e.target),
                     std::max(e.source, e.target), e.edge_class);
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::map<std::string, std::set<std::string>> undirected_adjacency(
    const LabeledDiGraph& g) {
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& n : g.nodes()) adj[n.id];
  for (const auto& e : g.edges()) {
    adj[e.source].insert(e.target);
    adj[e.target].insert(e.source);
  }
  return adj;
}

inline std::set<std::string> reachable_from(
    const std::map<std::string, std::set<std::string>>& adj,
    const std::string& start) {
  std::set<std::string> seen{start};
  std::vector<std::string> stack{start};
  while (!stack.empty()) {
    std::string u = std::move(stack.back());
    stack.pop_back();
    auto it = adj.find(u);
    if (it == adj.end()) continue;
    for (const auto& w : it->second) {
      if (seen.insert(w).second) stack.push_back(w);
    }
  }
  return seen;
}

// -------------------------------------------------------------------- suites

/// Referential integrity and id uniqueness across randomized operation
/// sequences.
inline std::optional<std::string> suite_referential_integrity(
    std::size_t iterations, unsigned seed = 0xA11CE) {
  for (std::size_t i = 0; i < iterations; ++i) {
    std::mt19937 rng(seed + static_cast<unsigned>(i));
    LabeledDiGraph g = random_graph(rng);
    auto fail = [&](const std::string& op,
                    const std::string& what) -> std::optional<std::string> {
      return "iteration " + std::to_string(i) + ", after " + op + ": " + what;
    };
    auto check = [&](const char* op) -> std::optional<std::string> {
      if (auto v = integrity_violation(g)) return fail(op, *v);
      return std::nullopt;
    };
    if (auto v = check("generation")) return v;

    g = plantgraph::assign_short_ids(g);
    if (auto v = check("assign_short_ids")) return v;

    g = plantgraph::valve_edges_to_nodes(g);
    if (auto v = check("valve_edges_to_nodes")) return v;

    g = plantgraph::collapse_piping_chains(g);
    if (auto v = check("collapse_piping_chains")) return v;

    if (!g.nodes().empty()) {
      try {
        g = plantgraph::orient_from_root(g, g.nodes().front().id);
      } catch (const plantgraph::Error&) {
        // cycles and such; orientation refused is fine here
      }
      if (auto v = check("orient_from_root")) return v;
    }

    LabeledDiGraph other = random_graph(rng, 6, 8);
    // Rename to avoid raw id collisions; fuse purely by identical labels.
    {
      LabeledDiGraph renamed;
      renamed.set_directed(other.directed());
      for (const auto& n : other.nodes()) {
        GraphNode copy = n;
        copy.id = "m" + copy.id;
        renamed.add_node(std::move(copy));
      }
      for (const auto& e : other.edges()) {
        GraphEdge copy = e;
        copy.source = "m" + copy.source;
        copy.target = "m" + copy.target;
        renamed.add_edge(std::move(copy));
      }
      other = std::move(renamed);
    }
    try {
      g = plantgraph::merge_graphs(
          g, other, [](const GraphNode& a, const GraphNode& b) {
            return !a.label.empty() && a.label == b.label;
          });
    } catch (const plantgraph::Error&) {
      // identity conflicts are legal outcomes for arbitrary inputs
    }
    if (auto v = check("merge_graphs")) return v;

    g = plantgraph::strip_directions(g);
    if (auto v = check("strip_directions")) return v;

    g = plantgraph::import_graph(plantgraph::export_json(g));
    if (auto v = check("json round trip")) return v;
  }
  return std::nullopt;
}

/// Orientation yields a tree pointing away from the root and preserves the
/// undirected edge multiset; re-orienting is the identity.
inline std::optional<std::string> suite_orientation(std::size_t iterations,
                                                    unsigned seed = 0xB0B) {
  for (std::size_t i = 0; i < iterations; ++i) {
    std::mt19937 rng(seed + static_cast<unsigned>(i));
    LabeledDiGraph g = random_tree(rng);
    std::uniform_int_distribution<std::size_t> pick(0, g.nodes().size() - 1);
    std::string root = g.nodes()[pick(rng)].id;
    auto fail = [&](const std::string& what) {
      return std::optional<std::string>("iteration " + std::to_string(i) +
                                        " root " + root + ": " + what);
    };

    LabeledDiGraph oriented;
    try {
      oriented = plantgraph::orient_from_root(g, root);
    } catch (const plantgraph::Error& e) {
      return fail(std::string("unexpected error ") + e.what());
    }

    if (undirected_multiset(g) != undirected_multiset(oriented)) {
      return fail("undirected edge multiset changed");
    }
    if (oriented.nodes().size() != g.nodes().size()) {
      return fail("node count changed");
    }

    std::map<std::string, std::size_t> in_degree;
    for (const auto& n : oriented.nodes()) in_degree[n.id] = 0;
    for (const auto& e : oriented.edges()) ++in_degree[e.target];
    for (const auto& [id, deg] : in_degree) {
      std::size_t want = id == root ? 0 : 1;
      if (deg != want) {
        return fail("in-degree of " + id + " is " + std::to_string(deg) +
                    ", expected " + std::to_string(want));
      }
    }

    // Depth oracle: independent BFS; every edge must step one level down.
    auto adj = undirected_adjacency(g);
    std::map<std::string, std::size_t> depth{{root, 0}};
    std::vector<std::string> frontier{root};
    while (!frontier.empty()) {
      std::vector<std::string> next;
      for (const auto& u : frontier) {
        for (const auto& w : adj.at(u)) {
          if (!depth.count(w)) {
            depth[w] = depth.at(u) + 1;
            next.push_back(w);
          }
        }
      }
      frontier = std::move(next);
    }
    for (const auto& e : oriented.edges()) {
      if (depth.at(e.target) != depth.at(e.source) + 1) {
        return fail("edge " + e.source + "->" + e.target +
                    " does not point away from the root");
      }
    }

    LabeledDiGraph again = plantgraph::orient_from_root(oriented, root);
    if (!plantgraph::graphs_equal(again, oriented)) {
      return fail("re-orientation changed the graph");
    }
  }
  return std::nullopt;
}

/// Collapse preserves reachability between preserved nodes, removes every
/// chain interior, and is idempotent.
inline std::optional<std::string> suite_collapse(std::size_t iterations,
                                                 unsigned seed = 0xC0C0A) {
  for (std::size_t i = 0; i < iterations; ++i) {
    std::mt19937 rng(seed + static_cast<unsigned>(i));
    auto [g, terminals] = random_chain_graph(rng);
    auto fail = [&](const std::string& what) {
      return std::optional<std::string>("iteration " + std::to_string(i) +
                                        ": " + what);
    };

    auto before_adj = undirected_adjacency(g);
    LabeledDiGraph collapsed = plantgraph::collapse_piping_chains(g);
    if (auto v = integrity_violation(collapsed)) return fail(*v);
    auto after_adj = undirected_adjacency(collapsed);

    for (const auto& a : terminals) {
      auto before = reachable_from(before_adj, a);
      auto after = reachable_from(after_adj, a);
      for (const auto& b : terminals) {
        if (before.count(b) != after.count(b)) {
          return fail("reachability " + a + " -> " + b + " changed");
        }
      }
    }

    std::map<std::string, std::vector<const GraphEdge*>> incident;
    for (const auto& e : collapsed.edges()) {
      incident[e.source].push_back(&e);
      incident[e.target].push_back(&e);
    }
    for (const auto& n : collapsed.nodes()) {
      if (n.node_class != NodeClass::Coordinate) continue;
      auto it = incident.find(n.id);
      if (it == incident.end() || it->second.size() != 2) continue;
      bool piping = true;
      for (const GraphEdge* e : it->second) {
        piping = piping && (e->edge_class == EdgeClass::Pipe ||
                            e->edge_class == EdgeClass::Weld);
        piping = piping && e->source != e->target;
      }
      if (piping && it->second[0] != it->second[1]) {
        return fail("chain interior " + n.id + " survived");
      }
    }

    LabeledDiGraph twice = plantgraph::collapse_piping_chains(collapsed);
    if (!plantgraph::graphs_equal(twice, collapsed)) {
      return fail("collapse is not idempotent");
    }
  }
  return std::nullopt;
}

/// JSON round trip is the identity, byte for byte on re-export.
inline std::optional<std::string> suite_roundtrip(std::size_t iterations,
                                                  unsigned seed = 0xD00D) {
  for (std::size_t i = 0; i < iterations; ++i) {
    std::mt19937 rng(seed + static_cast<unsigned>(i));
    LabeledDiGraph g = random_graph(rng);
    std::string first = plantgraph::export_json(g);
    LabeledDiGraph back;
    try {
      back = plantgraph::import_graph(first);
    } catch (const plantgraph::Error& e) {
      return "iteration " + std::to_string(i) + ": import failed: " + e.what();
    }
    if (!plantgraph::graphs_equal(g, back)) {
      return "iteration " + std::to_string(i) + ": graphs differ";
    }
    std::string second = plantgraph::export_json(back);
    if (first != second) {
      return "iteration " + std::to_string(i) + ": re-export differs";
    }
  }
  return std::nullopt;
}

/// Node identity in PCF graphs is exactly quantized-coordinate identity.
inline std::optional<std::string> suite_quantized(std::size_t iterations,
                                                  unsigned seed = 0xE66) {
  for (std::size_t i = 0; i < iterations; ++i) {
    std::mt19937 rng(seed + static_cast<unsigned>(i));
    PcfPipeline pl = random_pipeline(rng);
    LabeledDiGraph g;
    try {
      g = plantgraph::pcf_to_graph(pl, 1.0);
    } catch (const plantgraph::Error& e) {
      return "iteration " + std::to_string(i) + ": " + e.what();
    }
    auto fail = [&](const std::string& what) {
      return std::optional<std::string>("iteration " + std::to_string(i) +
                                        ": " + what);
    };
    const auto& nodes = g.nodes();
    for (std::size_t a = 0; a < nodes.size(); ++a) {
      if (!nodes[a].coordinate) return fail("node without coordinate");
      for (std::size_t b = a + 1; b < nodes.size(); ++b) {
        if (plantgraph::quantize(*nodes[a].coordinate, 1.0) ==
            plantgraph::quantize(*nodes[b].coordinate, 1.0)) {
          return fail("nodes " + nodes[a].id + " and " + nodes[b].id +
                      " share a quantized coordinate");
        }
      }
    }
    std::size_t edge_kind = 0;
    for (const auto& c : pl.components) {
      if (c.kind == plantgraph::PcfComponentKind::Pipe ||
          c.kind == plantgraph::PcfComponentKind::Weld ||
          c.kind == plantgraph::PcfComponentKind::Valve) {
        ++edge_kind;
      }
    }
    if (g.edges().size() != edge_kind) return fail("edge count mismatch");
    for (const auto& e : g.edges()) {
      if (e.source == e.target) return fail("self-loop edge");
    }
    if (auto v = integrity_violation(g)) return fail(*v);
  }
  return std::nullopt;
}

/// pcf_to_graph connectivity equals a brute-force pairwise
/// coordinate-coincidence construction.
inline std::optional<std::string> suite_connectivity_oracle(
    std::size_t iterations, unsigned seed = 0xF1E1D) {
  for (std::size_t i = 0; i < iterations; ++i) {
    std::mt19937 rng(seed + static_cast<unsigned>(i));
    PcfPipeline pl = random_pipeline(rng, 20);
    pl.end_connections.clear();  // connectivity is about component endpoints
    LabeledDiGraph g = plantgraph::pcf_to_graph(pl, 1.0);
    auto fail = [&](const std::string& what) {
      return std::optional<std::string>("iteration " + std::to_string(i) +
                                        ": " + what);
    };

    std::vector<Vec3> points;
    for (const auto& c : pl.components) {
      if (c.kind != plantgraph::PcfComponentKind::Pipe &&
          c.kind != plantgraph::PcfComponentKind::Weld &&
          c.kind != plantgraph::PcfComponentKind::Valve) {
        continue;
      }
      points.push_back(c.endpoints[0].coordinate);
      points.push_back(c.endpoints[1].coordinate);
    }

    MiniUf oracle(points.size());
    for (std::size_t p = 0; p + 1 < points.size(); p += 2) {
      oracle.unite(p, p + 1);
    }
    for (std::size_t a = 0; a < points.size(); ++a) {
      for (std::size_t b = a + 1; b < points.size(); ++b) {
        if (plantgraph::quantize(points[a], 1.0) ==
            plantgraph::quantize(points[b], 1.0)) {
          oracle.unite(a, b);
        }
      }
    }

    // Map each endpoint to its graph node, then take graph connectivity.
    std::map<std::string, std::size_t> node_index;
    for (std::size_t k = 0; k < g.nodes().size(); ++k) {
      node_index[g.nodes()[k].id] = k;
    }
    MiniUf graph_uf(g.nodes().size());
    for (const auto& e : g.edges()) {
      graph_uf.unite(node_index.at(e.source), node_index.at(e.target));
    }
    auto node_of_point = [&](const Vec3& p) -> std::optional<std::size_t> {
      auto q = plantgraph::quantize(p, 1.0);
      for (std::size_t k = 0; k < g.nodes().size(); ++k) {
        if (g.nodes()[k].coordinate &&
            plantgraph::quantize(*g.nodes()[k].coordinate, 1.0) == q) {
          return k;
        }
      }
      return std::nullopt;
    };
    std::vector<std::size_t> owner(points.size());
    for (std::size_t p = 0; p < points.size(); ++p) {
      auto k = node_of_point(points[p]);
      if (!k) return fail("endpoint has no node");
      owner[p] = *k;
    }
    for (std::size_t a = 0; a < points.size(); ++a) {
      for (std::size_t b = a + 1; b < points.size(); ++b) {
        bool oracle_same = oracle.same(a, b);
        bool graph_same = graph_uf.same(owner[a], owner[b]);
        if (oracle_same != graph_same) {
          return fail("pair " + std::to_string(a) + "," + std::to_string(b) +
                      ": oracle says " + (oracle_same ? "joined" : "apart") +
                      ", graph says " + (graph_same ? "joined" : "apart"));
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace testsup
