#pragma once
// PCF (Piping Component File) parsing and conversion to labeled graphs.
//
// The grammar is line oriented: an unindented line opens a record (PIPE,
// WELD, VALVE, END-CONNECTION-EQUIPMENT, ...), indented lines carry the
// attributes of the open record (END-POINT, NAME, ...). Keywords are
// uppercase and matched case-sensitively.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "plantgraph/error.hpp"
#include "plantgraph/graph.hpp"

namespace plantgraph {

struct PcfUnits {
  std::string bore;
  std::string coords;
};

enum class PcfComponentKind { Pipe, Weld, Valve, TeeStub, Other };

inline const char* to_string(PcfComponentKind k) {
  switch (k) {
    case PcfComponentKind::Pipe: return "PIPE";
    case PcfComponentKind::Weld: return "WELD";
    case PcfComponentKind::Valve: return "VALVE";
    case PcfComponentKind::TeeStub: return "TEE-STUB";
    case PcfComponentKind::Other: return "OTHER";
  }
  return "OTHER";
}

struct PcfEndpoint {
  Vec3 coordinate;
  double bore = 0.0;
};

struct PcfComponent {
  PcfComponentKind kind = PcfComponentKind::Other;
  std::string keyword;  // raw record keyword
  std::string name;     // NAME attribute, if present
  std::vector<PcfEndpoint> endpoints;
  // All attribute lines as (keyword, rest-of-line); FLOW ends up here and is
  // never consulted for orientation.
  std::vector<std::pair<std::string, std::string>> attributes;
};

enum class EndConnectionKind { Equipment, PipelineRef };

inline const char* to_string(EndConnectionKind k) {
  return k == EndConnectionKind::Equipment ? "Equipment" : "PipelineRef";
}

struct EndConnection {
  EndConnectionKind kind = EndConnectionKind::Equipment;
  Vec3 coordinate;
  std::string tag;        // nozzle or equipment tag, possibly empty
  std::string reference;  // referenced pipeline, for PipelineRef
};

struct PcfPipeline {
  std::string name;  // pipeline reference
  PcfUnits units;
  std::optional<Vec3> start_coords;
  std::vector<PcfComponent> components;
  std::vector<EndConnection> end_connections;

  std::size_t component_count(PcfComponentKind kind) const {
    std::size_t n = 0;
    for (const auto& c : components) n += (c.kind == kind) ? 1 : 0;
    return n;
  }
};

/// Per-axis integral coordinate at tolerance `epsilon`; the identity of
/// coordinate nodes.
struct QuantizedCoord {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;

  friend auto operator<=>(const QuantizedCoord&, const QuantizedCoord&) =
      default;
};

inline QuantizedCoord quantize(const Vec3& v, double epsilon) {
  return {std::llround(v.x / epsilon), std::llround(v.y / epsilon),
          std::llround(v.z / epsilon)};
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r' || s.front() == '\n'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' ||
                        s.back() == '\r' || s.back() == '\n'))
    s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

inline std::optional<double> parse_number(std::string_view tok) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

}  // namespace detail

/// Parses one PCF file. Pipe/weld/valve components must carry exactly two
/// END-POINT lines; unknown record kinds are preserved as Other and ignored
/// by the graph conversion.
inline PcfPipeline parse_pcf(std::string_view text) {
  PcfPipeline pl;

  enum class RecordKind { None, Component, EndConnection, Plain };
  RecordKind open = RecordKind::None;
  PcfComponent* component = nullptr;
  EndConnection* connection = nullptr;
  std::vector<std::size_t> connection_points;  // END-POINTs per end connection
  int line_no = 0;

  auto syntax_error = [&](const std::string& what) -> Error {
    return Error(ErrorCode::PcfSyntax,
                 what + " (line " + std::to_string(line_no) + ")");
  };

  auto parse_point = [&](const std::vector<std::string_view>& tokens,
                         const char* keyword) -> PcfEndpoint {
    if (tokens.size() < 4) {
      throw syntax_error(std::string(keyword) + " needs 3 coordinates");
    }
    PcfEndpoint ep;
    double* coords[3] = {&ep.coordinate.x, &ep.coordinate.y,
                         &ep.coordinate.z};
    for (int i = 0; i < 3; ++i) {
      auto v = detail::parse_number(tokens[1 + i]);
      if (!v) {
        throw syntax_error(std::string(keyword) + " coordinate '" +
                           std::string(tokens[1 + i]) + "' is not numeric");
      }
      *coords[i] = *v;
    }
    if (tokens.size() > 4) {
      if (auto bore = detail::parse_number(tokens[4])) {
        if (*bore < 0) throw syntax_error("negative bore");
        ep.bore = *bore;
      }
    }
    return ep;
  };

  auto rest_after = [](std::string_view line,
                       std::string_view keyword) -> std::string {
    std::string_view t = detail::trim(line);
    t.remove_prefix(keyword.size());
    return std::string(detail::trim(t));
  };

  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) continue;

    bool indented = line.front() == ' ' || line.front() == '\t';
    auto tokens = detail::split_ws(line);
    std::string keyword(tokens[0]);

    if (!indented) {
      // A new record closes the previous one.
      component = nullptr;
      connection = nullptr;
      open = RecordKind::Plain;

      if (keyword == "PIPELINE-REFERENCE") {
        if (pl.name.empty()) pl.name = rest_after(line, keyword);
      } else if (keyword == "UNITS-BORE") {
        pl.units.bore = rest_after(line, keyword);
      } else if (keyword == "UNITS-CO-ORDS") {
        pl.units.coords = rest_after(line, keyword);
      } else if (keyword == "START-CO-ORDS") {
        pl.start_coords = parse_point(tokens, "START-CO-ORDS").coordinate;
      } else if (keyword == "PIPE" || keyword == "WELD" ||
                 keyword == "VALVE" || keyword == "TEE-STUB") {
        PcfComponent c;
        c.keyword = keyword;
        c.kind = keyword == "PIPE"   ? PcfComponentKind::Pipe
                 : keyword == "WELD" ? PcfComponentKind::Weld
                 : keyword == "VALVE" ? PcfComponentKind::Valve
                                      : PcfComponentKind::TeeStub;
        pl.components.push_back(std::move(c));
        component = &pl.components.back();
        open = RecordKind::Component;
      } else if (keyword == "END-CONNECTION-EQUIPMENT" ||
                 keyword == "END-CONNECTION-PIPELINE") {
        EndConnection ec;
        ec.kind = keyword == "END-CONNECTION-EQUIPMENT"
                      ? EndConnectionKind::Equipment
                      : EndConnectionKind::PipelineRef;
        pl.end_connections.push_back(ec);
        connection = &pl.end_connections.back();
        connection_points.push_back(0);
        open = RecordKind::EndConnection;
      } else {
        PcfComponent c;
        c.keyword = keyword;
        c.kind = PcfComponentKind::Other;
        pl.components.push_back(std::move(c));
        component = &pl.components.back();
        open = RecordKind::Component;
      }
      continue;
    }

    // Attribute line.
    if (open == RecordKind::None) {
      throw syntax_error("attribute '" + keyword + "' before any record");
    }
    if (component != nullptr) {
      if (keyword == "END-POINT") {
        component->endpoints.push_back(parse_point(tokens, "END-POINT"));
      } else if (keyword == "NAME") {
        component->name = rest_after(line, keyword);
      }
      component->attributes.emplace_back(keyword, rest_after(line, keyword));
    } else if (connection != nullptr) {
      if (keyword == "END-POINT") {
        if (++connection_points.back() > 1) {
          throw syntax_error("end connection with more than one END-POINT");
        }
        connection->coordinate = parse_point(tokens, "END-POINT").coordinate;
      } else if (keyword == "NAME") {
        connection->tag = rest_after(line, keyword);
      } else if (keyword == "PIPELINE-REFERENCE") {
        connection->reference = rest_after(line, keyword);
      }
    } else if (keyword == "START-CO-ORDS") {
      // Some exporters nest this under PIPELINE-REFERENCE.
      pl.start_coords = parse_point(tokens, "START-CO-ORDS").coordinate;
    } else if (keyword == "UNITS-BORE") {
      pl.units.bore = rest_after(line, keyword);
    } else if (keyword == "UNITS-CO-ORDS") {
      pl.units.coords = rest_after(line, keyword);
    }
  }

  for (std::size_t i = 0; i < pl.components.size(); ++i) {
    const auto& c = pl.components[i];
    bool edge_kind = c.kind == PcfComponentKind::Pipe ||
                     c.kind == PcfComponentKind::Weld ||
                     c.kind == PcfComponentKind::Valve;
    if (edge_kind && c.endpoints.size() != 2) {
      throw Error(ErrorCode::EndpointCount,
                  c.keyword + " component #" + std::to_string(i + 1) +
                      " has " + std::to_string(c.endpoints.size()) +
                      " END-POINT lines, expected 2");
    }
  }
  for (std::size_t i = 0; i < pl.end_connections.size(); ++i) {
    if (connection_points[i] != 1) {
      throw Error(ErrorCode::PcfSyntax,
                  "end connection #" + std::to_string(i + 1) +
                      " lacks an END-POINT");
    }
  }

  return pl;
}

namespace detail {

inline std::string coord_node_id(const std::string& pipeline,
                                 const QuantizedCoord& q) {
  return pipeline + ":" + std::to_string(q.x) + "_" + std::to_string(q.y) +
         "_" + std::to_string(q.z);
}

inline EdgeClass edge_class_of(PcfComponentKind k) {
  switch (k) {
    case PcfComponentKind::Pipe: return EdgeClass::Pipe;
    case PcfComponentKind::Weld: return EdgeClass::Weld;
    case PcfComponentKind::Valve: return EdgeClass::Valve;
    default: return EdgeClass::Unknown;
  }
}

inline std::string format_epsilon(double epsilon) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", epsilon);
  return buf;
}

}  // namespace detail

/// Converts one parsed pipeline to a graph: one Coordinate node per distinct
/// quantized endpoint, one edge per pipe/weld/valve component (file order,
/// first endpoint -> second endpoint), end connections fused onto their
/// coincident coordinate node. Edge directions carry no flow semantics; see
/// orient.hpp. Tee-stubs produce no edges, branching emerges from shared
/// coordinates.
inline LabeledDiGraph pcf_to_graph(const PcfPipeline& pipeline,
                                   double epsilon = 1.0) {
  if (!(epsilon > 0)) {
    throw Error(ErrorCode::PcfSyntax, "epsilon must be positive");
  }

  LabeledDiGraph g;
  g.set_directed(true);
  g.metadata().units_bore = pipeline.units.bore;
  g.metadata().units_coords = pipeline.units.coords;
  g.metadata().options["epsilon"] = detail::format_epsilon(epsilon);
  g.metadata().options["pipeline"] = pipeline.name;

  std::map<QuantizedCoord, std::string> node_of;
  auto ensure_node = [&](const Vec3& c) -> std::string {
    QuantizedCoord q = quantize(c, epsilon);
    auto it = node_of.find(q);
    if (it != node_of.end()) return it->second;
    GraphNode n;
    n.id = detail::coord_node_id(pipeline.name, q);
    n.node_class = NodeClass::Coordinate;
    n.coordinate = c;
    n.origin = Origin::Pcf;
    n.attrs["pipeline"] = pipeline.name;
    g.add_node(std::move(n));
    node_of.emplace(q, detail::coord_node_id(pipeline.name, q));
    return node_of.at(q);
  };

  std::size_t flow_attrs = 0;
  std::size_t tee_stubs = 0;
  for (std::size_t i = 0; i < pipeline.components.size(); ++i) {
    const PcfComponent& c = pipeline.components[i];
    for (const auto& [k, v] : c.attributes) flow_attrs += (k == "FLOW") ? 1 : 0;
    if (c.kind == PcfComponentKind::TeeStub) {
      ++tee_stubs;
      continue;
    }
    if (detail::edge_class_of(c.kind) == EdgeClass::Unknown) continue;

    QuantizedCoord q0 = quantize(c.endpoints[0].coordinate, epsilon);
    QuantizedCoord q1 = quantize(c.endpoints[1].coordinate, epsilon);
    if (q0 == q1) {
      throw Error(ErrorCode::DegenerateComponent,
                  c.keyword + " component #" + std::to_string(i + 1) +
                      " endpoints coincide at tolerance " +
                      detail::format_epsilon(epsilon));
    }
    GraphEdge e;
    e.source = ensure_node(c.endpoints[0].coordinate);
    e.target = ensure_node(c.endpoints[1].coordinate);
    e.edge_class = detail::edge_class_of(c.kind);
    e.label = c.name;
    g.add_edge(std::move(e));
  }
  if (flow_attrs > 0)
    g.metadata().options["flow_attrs"] = std::to_string(flow_attrs);
  if (tee_stubs > 0)
    g.metadata().options["tee_stubs"] = std::to_string(tee_stubs);

  for (const EndConnection& ec : pipeline.end_connections) {
    QuantizedCoord q = quantize(ec.coordinate, epsilon);
    std::string label_core = !ec.tag.empty() ? ec.tag : ec.reference;
    std::string label = label_core + "/" + to_string(ec.kind);

    auto it = node_of.find(q);
    if (it == node_of.end()) {
      // No component endpoint within epsilon; keep the node anyway.
      GraphNode n;
      n.id = detail::coord_node_id(pipeline.name, q);
      n.node_class = NodeClass::EndConnection;
      n.label = label;
      n.coordinate = ec.coordinate;
      n.origin = Origin::Pcf;
      n.attrs["pipeline"] = pipeline.name;
      n.attrs["end_kind"] = to_string(ec.kind);
      if (!ec.tag.empty()) n.attrs["tag"] = ec.tag;
      if (!ec.reference.empty()) n.attrs["ref"] = ec.reference;
      g.add_node(std::move(n));
      node_of.emplace(q, detail::coord_node_id(pipeline.name, q));
      g.metadata().warn("pcf: end connection '" + label +
                        "' matches no component endpoint within epsilon");
      continue;
    }

    GraphNode* n = g.node(it->second);
    if (n->node_class == NodeClass::EndConnection) {
      g.metadata().warn("pcf: multiple end connections at node '" + n->id +
                        "'; keeping '" + n->label + "'");
      continue;
    }
    n->node_class = NodeClass::EndConnection;
    n->label = label;
    n->attrs["end_kind"] = to_string(ec.kind);
    if (!ec.tag.empty()) n->attrs["tag"] = ec.tag;
    if (!ec.reference.empty()) n->attrs["ref"] = ec.reference;
  }

  return g;
}

/// Merges per-pipeline graphs into one plant graph. Nodes are identified when
/// they are mutually referencing pipeline-end connections, equipment end
/// connections sharing a tag, or coordinate-coincident at `epsilon`. All
/// files must declare the same units.
inline LabeledDiGraph merge_pipelines(const std::vector<PcfPipeline>& pipelines,
                                      double epsilon = 1.0) {
  if (pipelines.empty()) {
    throw Error(ErrorCode::MalformedDocument, "no pipelines to merge");
  }
  for (const auto& pl : pipelines) {
    if (pl.units.coords != pipelines.front().units.coords ||
        pl.units.bore != pipelines.front().units.bore) {
      throw Error(ErrorCode::UnitMismatch,
                  "pipeline '" + pl.name + "' declares units (" +
                      pl.units.bore + ", " + pl.units.coords +
                      ") but '" + pipelines.front().name + "' declares (" +
                      pipelines.front().units.bore + ", " +
                      pipelines.front().units.coords + ")");
    }
  }

  auto attr = [](const GraphNode& n, const char* key) -> std::string_view {
    auto it = n.attrs.find(key);
    return it == n.attrs.end() ? std::string_view{} : std::string_view(it->second);
  };
  NodeIdentity identity = [&attr, epsilon](const GraphNode& a,
                                           const GraphNode& b) {
    bool ends = a.node_class == NodeClass::EndConnection &&
                b.node_class == NodeClass::EndConnection;
    if (ends && attr(a, "end_kind") == "PipelineRef" &&
        attr(b, "end_kind") == "PipelineRef" &&
        attr(a, "ref") == attr(b, "pipeline") &&
        attr(b, "ref") == attr(a, "pipeline")) {
      return true;
    }
    if (ends && attr(a, "end_kind") == "Equipment" &&
        attr(b, "end_kind") == "Equipment" && !attr(a, "tag").empty() &&
        attr(a, "tag") == attr(b, "tag")) {
      return true;
    }
    if (a.coordinate && b.coordinate &&
        quantize(*a.coordinate, epsilon) == quantize(*b.coordinate, epsilon)) {
      return true;
    }
    return false;
  };

  LabeledDiGraph merged = pcf_to_graph(pipelines.front(), epsilon);
  for (std::size_t i = 1; i < pipelines.size(); ++i) {
    merged = merge_graphs(merged, pcf_to_graph(pipelines[i], epsilon),
                          identity);
  }
  merged.metadata().options["pipeline"] = "";
  merged.metadata().options["pipelines"] = std::to_string(pipelines.size());
  return merged;
}

}  // namespace plantgraph
