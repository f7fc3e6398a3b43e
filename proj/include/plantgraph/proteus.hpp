#pragma once
// Proteus XML (DEXPI P&ID) parsing and conversion to labeled graphs.
//
// Only the connectivity-bearing subset is extracted: Equipment with nested
// Nozzles, PipingNetworkSegment Connections, InstrumentComponents and
// SignalLines. Elements are matched by local name, ignoring namespaces;
// everything else is skipped without error.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "plantgraph/error.hpp"
#include "plantgraph/graph.hpp"

namespace plantgraph {

struct ProteusNozzle {
  std::string id;
  std::string tag;
  std::string component_class;
};

struct EquipmentItem {
  std::string id;
  std::string tag;  // TagName, may be empty
  std::string component_class;
  std::vector<ProteusNozzle> nozzles;
};

struct SegmentConnection {
  std::string from_id;
  std::string to_id;
};

struct PipingSegment {
  std::string id;
  std::optional<SegmentConnection> connection;
  std::vector<std::string> inline_component_ids;
};

struct InstrumentItem {
  std::string id;
  std::string tag;
  std::string component_class;
};

struct SignalLink {
  std::string from_id;
  std::string to_id;
};

struct ProteusModel {
  std::vector<EquipmentItem> equipment;
  std::vector<PipingSegment> segments;
  std::vector<InstrumentItem> instruments;
  std::vector<SignalLink> signal_links;

  std::size_t nozzle_count() const {
    std::size_t n = 0;
    for (const auto& e : equipment) n += e.nozzles.size();
    return n;
  }
};

struct ProteusGraphOptions {
  bool include_signals = false;
};

namespace detail {

inline std::string_view local_name(std::string_view qualified) {
  auto pos = qualified.rfind(':');
  return pos == std::string_view::npos ? qualified
                                       : qualified.substr(pos + 1);
}

inline std::string xml_attr(const boost::property_tree::ptree& node,
                            const char* name) {
  auto attrs = node.get_child_optional("<xmlattr>");
  if (!attrs) return {};
  for (const auto& [key, value] : *attrs) {
    if (local_name(key) == name) return value.data();
  }
  return {};
}

inline std::string required_id(const boost::property_tree::ptree& node,
                               std::string_view element) {
  std::string id = xml_attr(node, "ID");
  if (id.empty()) {
    throw Error(ErrorCode::MissingId,
                "<" + std::string(element) + "> element without ID");
  }
  return id;
}

inline NodeClass classify_component(std::string_view component_class) {
  std::string lowered(component_class);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lowered.find("tank") != std::string::npos) return NodeClass::Tank;
  if (lowered.find("pump") != std::string::npos) return NodeClass::Pump;
  if (lowered.find("valve") != std::string::npos) return NodeClass::Valve;
  if (lowered.find("nozzle") != std::string::npos) return NodeClass::Nozzle;
  return NodeClass::Unknown;
}

inline void collect_nozzles(const boost::property_tree::ptree& node,
                            EquipmentItem& equipment) {
  for (const auto& [key, child] : node) {
    std::string_view name = local_name(key);
    if (name == "<xmlattr>") continue;
    if (name == "Nozzle") {
      ProteusNozzle nozzle;
      nozzle.id = required_id(child, "Nozzle");
      nozzle.tag = xml_attr(child, "TagName");
      nozzle.component_class = xml_attr(child, "ComponentClass");
      equipment.nozzles.push_back(std::move(nozzle));
      continue;
    }
    if (name == "Equipment") continue;  // nested equipment owns its nozzles
    collect_nozzles(child, equipment);
  }
}

inline std::optional<SegmentConnection> read_connection(
    const boost::property_tree::ptree& node) {
  for (const auto& [key, child] : node) {
    std::string_view name = local_name(key);
    if (name != "Connection" && name != "Connect") continue;
    SegmentConnection c;
    c.from_id = xml_attr(child, "FromID");
    c.to_id = xml_attr(child, "ToID");
    if (!c.from_id.empty() && !c.to_id.empty()) return c;
  }
  return std::nullopt;
}

struct ProteusWalker {
  ProteusModel& model;

  void walk(const boost::property_tree::ptree& node) {
    for (const auto& [key, child] : node) {
      std::string_view name = local_name(key);
      if (name == "<xmlattr>") continue;
      if (name == "Equipment") {
        handle_equipment(child);
      } else if (name == "PipingNetworkSegment") {
        handle_segment(child);
      } else if (name == "InstrumentComponent") {
        handle_instrument(child);
        walk(child);
      } else if (name == "SignalLine") {
        handle_signal_line(child);
      } else {
        walk(child);
      }
    }
  }

  void handle_equipment(const boost::property_tree::ptree& node) {
    EquipmentItem item;
    item.id = required_id(node, "Equipment");
    item.tag = xml_attr(node, "TagName");
    item.component_class = xml_attr(node, "ComponentClass");
    collect_nozzles(node, item);
    model.equipment.push_back(std::move(item));
    // Nested equipment becomes its own item.
    for (const auto& [key, child] : node) {
      if (local_name(key) == "Equipment") handle_equipment(child);
    }
  }

  void handle_segment(const boost::property_tree::ptree& node) {
    PipingSegment segment;
    segment.id = required_id(node, "PipingNetworkSegment");
    segment.connection = read_connection(node);
    for (const auto& [key, child] : node) {
      std::string_view name = local_name(key);
      if (name == "<xmlattr>" || name == "Connection" || name == "Connect")
        continue;
      std::string id = xml_attr(child, "ID");
      if (!id.empty()) segment.inline_component_ids.push_back(id);
      if (name == "InstrumentComponent") handle_instrument(child);
    }
    model.segments.push_back(std::move(segment));
  }

  void handle_instrument(const boost::property_tree::ptree& node) {
    InstrumentItem item;
    item.id = required_id(node, "InstrumentComponent");
    item.tag = xml_attr(node, "TagName");
    item.component_class = xml_attr(node, "ComponentClass");
    model.instruments.push_back(std::move(item));
  }

  void handle_signal_line(const boost::property_tree::ptree& node) {
    if (auto c = read_connection(node)) {
      model.signal_links.push_back(SignalLink{c->from_id, c->to_id});
    }
  }
};

}  // namespace detail

/// Parses the Proteus XML subset listed above out of `xml_text`.
inline ProteusModel parse_proteus(std::string_view xml_text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(xml_text)};
  try {
    pt::read_xml(in, tree,
                 pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::XmlSyntax, e.what());
  }

  ProteusModel model;
  detail::ProteusWalker walker{model};
  walker.walk(tree);
  return model;
}

/// Converts a parsed model to a graph: nodes for equipment and nozzles,
/// Segment edges for nozzle containment and for segment connections. Inline
/// piping components and instruments never become nodes on the piping paths;
/// connections ending at them are chained through to the nearest terminal.
/// With include_signals, Instrument nodes and Signal edges are added and may
/// form subgraphs disconnected from the piping.
inline LabeledDiGraph proteus_to_graph(const ProteusModel& model,
                                       const ProteusGraphOptions& opts = {}) {
  LabeledDiGraph g;
  g.set_directed(true);
  g.metadata().options["include_signals"] =
      opts.include_signals ? "true" : "false";

  for (const auto& eq : model.equipment) {
    GraphNode n;
    n.id = eq.id;
    n.label = eq.tag;
    n.node_class = detail::classify_component(eq.component_class);
    n.origin = Origin::Proteus;
    if (!eq.component_class.empty())
      n.attrs["component_class"] = eq.component_class;
    g.add_node(std::move(n));
    for (const auto& nozzle : eq.nozzles) {
      GraphNode nn;
      nn.id = nozzle.id;
      nn.label = nozzle.tag;
      nn.node_class = NodeClass::Nozzle;
      nn.origin = Origin::Proteus;
      g.add_node(std::move(nn));
    }
  }

  std::set<std::tuple<std::string, std::string, EdgeClass>> seen;
  auto add_unique_edge = [&](GraphEdge e) {
    if (seen.emplace(e.source, e.target, e.edge_class).second)
      g.add_edge(std::move(e));
  };

  // Containment: nozzle -> parent equipment.
  for (const auto& eq : model.equipment) {
    for (const auto& nozzle : eq.nozzles) {
      add_unique_edge({nozzle.id, eq.id, EdgeClass::Segment, "", {}});
    }
  }

  // Attachment points referenced by segment connections are either terminal
  // (equipment/nozzle nodes) or pass-through (inline piping components and
  // instruments, which the graph skips).
  std::set<std::string> pass_through;
  for (const auto& seg : model.segments) {
    for (const auto& id : seg.inline_component_ids) pass_through.insert(id);
  }
  for (const auto& inst : model.instruments) pass_through.insert(inst.id);
  for (const auto& n : g.nodes()) pass_through.erase(n.id);

  struct Arc {
    std::string from;
    std::string to;
  };
  std::vector<Arc> arcs;
  for (const auto& seg : model.segments) {
    if (!seg.connection) continue;
    const auto& c = *seg.connection;
    auto known = [&](const std::string& id) {
      return g.has_node(id) || pass_through.count(id) > 0;
    };
    if (!known(c.from_id) || !known(c.to_id)) {
      const std::string& missing = known(c.from_id) ? c.to_id : c.from_id;
      g.metadata().warn("proteus: segment '" + seg.id +
                        "' connection references unknown id '" + missing +
                        "'");
      continue;
    }
    if (c.from_id == c.to_id) {
      g.metadata().warn("proteus: segment '" + seg.id +
                        "' connects '" + c.from_id + "' to itself; dropped");
      continue;
    }
    arcs.push_back({c.from_id, c.to_id});
  }

  // Chain through pass-through points: consecutive segments meeting at an
  // inline component fuse into one terminal-to-terminal arc.
  std::set<std::string> active;
  for (const auto& a : arcs) {
    if (pass_through.count(a.from)) active.insert(a.from);
    if (pass_through.count(a.to)) active.insert(a.to);
  }
  for (const auto& point : active) {
    std::vector<Arc> in, out, rest;
    for (auto& a : arcs) {
      if (a.to == point) {
        in.push_back(a);
      } else if (a.from == point) {
        out.push_back(a);
      } else {
        rest.push_back(a);
      }
    }
    if (in.empty() || out.empty()) {
      g.metadata().warn("proteus: piping connection dead-ends at inline "
                        "component '" + point + "'; " +
                        std::to_string(in.size() + out.size()) +
                        " connection(s) dropped");
      arcs = std::move(rest);
      continue;
    }
    for (const auto& i : in) {
      for (const auto& o : out) {
        if (i.from == o.to) {
          g.metadata().warn("proteus: chain through '" + point +
                            "' loops back to '" + i.from + "'; dropped");
          continue;
        }
        rest.push_back({i.from, o.to});
      }
    }
    arcs = std::move(rest);
  }

  for (const auto& a : arcs) {
    add_unique_edge({a.from, a.to, EdgeClass::Segment, "", {}});
  }

  if (opts.include_signals) {
    for (const auto& inst : model.instruments) {
      GraphNode n;
      n.id = inst.id;
      n.label = inst.tag;
      n.node_class = NodeClass::Instrument;
      n.origin = Origin::Proteus;
      if (!inst.component_class.empty())
        n.attrs["component_class"] = inst.component_class;
      g.add_node(std::move(n));
    }
    for (const auto& link : model.signal_links) {
      const GraphNode* from = g.node(link.from_id);
      const GraphNode* to = g.node(link.to_id);
      if (from == nullptr || to == nullptr ||
          from->node_class != NodeClass::Instrument ||
          to->node_class != NodeClass::Instrument) {
        g.metadata().warn("proteus: signal line between '" + link.from_id +
                          "' and '" + link.to_id +
                          "' has a non-instrument endpoint; dropped");
        continue;
      }
      if (link.from_id == link.to_id) {
        g.metadata().warn("proteus: signal line on '" + link.from_id +
                          "' loops; dropped");
        continue;
      }
      add_unique_edge({link.from_id, link.to_id, EdgeClass::Signal, "", {}});
    }
  }

  return g;
}

/// Standalone diagnostic view of the control-signal structure: Instrument
/// nodes plus Signal edges only. Typically many small disconnected
/// components; never merged into the piping graph automatically.
inline LabeledDiGraph extract_signal_graph(const ProteusModel& model) {
  LabeledDiGraph g;
  g.set_directed(true);
  for (const auto& inst : model.instruments) {
    GraphNode n;
    n.id = inst.id;
    n.label = inst.tag;
    n.node_class = NodeClass::Instrument;
    n.origin = Origin::Proteus;
    if (!inst.component_class.empty())
      n.attrs["component_class"] = inst.component_class;
    g.add_node(std::move(n));
  }
  std::set<std::tuple<std::string, std::string, EdgeClass>> seen;
  for (const auto& link : model.signal_links) {
    if (!g.has_node(link.from_id) || !g.has_node(link.to_id)) {
      g.metadata().warn("proteus: signal link '" + link.from_id + "' -> '" +
                        link.to_id + "' references a missing instrument");
      continue;
    }
    if (link.from_id == link.to_id) continue;
    if (seen.emplace(link.from_id, link.to_id, EdgeClass::Signal).second) {
      g.add_edge({link.from_id, link.to_id, EdgeClass::Signal, "", {}});
    }
  }
  return g;
}

}  // namespace plantgraph
