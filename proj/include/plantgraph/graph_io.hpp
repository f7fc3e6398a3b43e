#pragma once
// GraphDocument JSON interchange plus DOT and GraphML renderings.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "plantgraph/graph.hpp"

namespace plantgraph {

enum class ExportFormat { Json, Dot, GraphMl };

inline constexpr const char* kGraphDocumentVersion = "1";

namespace detail {

// Stable presentation order: nodes by id, edges by (source, target, class,
// label). All exporters share it so cross-format node sets line up.
inline std::vector<const GraphNode*> sorted_nodes(const LabeledDiGraph& g) {
  std::vector<const GraphNode*> out;
  out.reserve(g.nodes().size());
  for (const auto& n : g.nodes()) out.push_back(&n);
  std::sort(out.begin(), out.end(),
            [](const GraphNode* a, const GraphNode* b) { return a->id < b->id; });
  return out;
}

inline std::vector<const GraphEdge*> sorted_edges(const LabeledDiGraph& g) {
  std::vector<const GraphEdge*> out;
  out.reserve(g.edges().size());
  for (const auto& e : g.edges()) out.push_back(&e);
  std::sort(out.begin(), out.end(),
            [](const GraphEdge* a, const GraphEdge* b) {
              return std::tie(a->source, a->target, a->edge_class, a->label) <
                     std::tie(b->source, b->target, b->edge_class, b->label);
            });
  return out;
}

inline bool dot_plain_id(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')
    return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) != 0 || c == '_';
  });
}

inline std::string dot_id(std::string_view s) {
  if (dot_plain_id(s)) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

// Joins the non-empty parts with DOT newline escapes.
inline std::string dot_label(const std::vector<std::string>& parts) {
  std::string joined;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    if (!joined.empty()) joined += "\\n";
    for (char c : p) {
      if (c == '"' || c == '\\') joined += '\\';
      joined += c;
    }
  }
  return joined;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline nlohmann::ordered_json to_document(const LabeledDiGraph& g) {
  nlohmann::ordered_json doc;
  doc["format_version"] = kGraphDocumentVersion;

  nlohmann::ordered_json md;
  md["directed"] = g.directed();
  md["sources"] = g.metadata().sources;
  md["units"] = {{"bore", g.metadata().units_bore},
                 {"coords", g.metadata().units_coords}};
  md["options"] = g.metadata().options;
  md["warnings"] = g.metadata().warnings;
  doc["metadata"] = std::move(md);

  doc["nodes"] = nlohmann::ordered_json::array();
  for (const GraphNode* n : detail::sorted_nodes(g)) {
    nlohmann::ordered_json jn;
    jn["id"] = n->id;
    jn["short_id"] = n->short_id;
    jn["label"] = n->label;
    jn["class"] = to_string(n->node_class);
    if (n->coordinate) {
      jn["coord"] = {n->coordinate->x, n->coordinate->y, n->coordinate->z};
    }
    jn["origin"] = to_string(n->origin);
    if (!n->attrs.empty()) jn["attrs"] = n->attrs;
    doc["nodes"].push_back(std::move(jn));
  }

  doc["edges"] = nlohmann::ordered_json::array();
  for (const GraphEdge* e : detail::sorted_edges(g)) {
    nlohmann::ordered_json je;
    je["source"] = e->source;
    je["target"] = e->target;
    je["class"] = to_string(e->edge_class);
    if (!e->label.empty()) je["label"] = e->label;
    if (!e->attrs.empty()) je["meta"] = e->attrs;
    doc["edges"].push_back(std::move(je));
  }

  return doc;
}

inline std::string export_json(const LabeledDiGraph& g) {
  return to_document(g).dump(2) + "\n";
}

inline std::string export_dot(const LabeledDiGraph& g) {
  std::string out;
  out += g.directed() ? "digraph plantgraph {\n" : "graph plantgraph {\n";
  const char* arrow = g.directed() ? " -> " : " -- ";

  for (const GraphNode* n : detail::sorted_nodes(g)) {
    std::vector<std::string> parts;
    parts.push_back(n->short_id.empty() ? n->id : n->short_id);
    parts.push_back(n->label);
    parts.push_back(to_string(n->node_class));
    out += "  " + detail::dot_id(n->id) + " [label=\"" +
           detail::dot_label(parts) + "\"];\n";
  }
  for (const GraphEdge* e : detail::sorted_edges(g)) {
    out += "  " + detail::dot_id(e->source) + arrow +
           detail::dot_id(e->target) + " [label=\"" +
           detail::dot_label({to_string(e->edge_class), e->label}) + "\"];\n";
  }
  out += "}\n";
  return out;
}

inline std::string export_graphml(const LabeledDiGraph& g) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"n_short_id\" for=\"node\" attr.name=\"short_id\" attr.type=\"string\"/>\n"
      "  <key id=\"n_label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      "  <key id=\"n_class\" for=\"node\" attr.name=\"class\" attr.type=\"string\"/>\n"
      "  <key id=\"n_origin\" for=\"node\" attr.name=\"origin\" attr.type=\"string\"/>\n"
      "  <key id=\"n_x\" for=\"node\" attr.name=\"x\" attr.type=\"double\"/>\n"
      "  <key id=\"n_y\" for=\"node\" attr.name=\"y\" attr.type=\"double\"/>\n"
      "  <key id=\"n_z\" for=\"node\" attr.name=\"z\" attr.type=\"double\"/>\n"
      "  <key id=\"e_class\" for=\"edge\" attr.name=\"class\" attr.type=\"string\"/>\n"
      "  <key id=\"e_label\" for=\"edge\" attr.name=\"label\" attr.type=\"string\"/>\n";
  out += std::string("  <graph id=\"G\" edgedefault=\"") +
         (g.directed() ? "directed" : "undirected") + "\">\n";

  for (const GraphNode* n : detail::sorted_nodes(g)) {
    out += "    <node id=\"" + detail::xml_escape(n->id) + "\">\n";
    if (!n->short_id.empty()) {
      out += "      <data key=\"n_short_id\">" +
             detail::xml_escape(n->short_id) + "</data>\n";
    }
    if (!n->label.empty()) {
      out += "      <data key=\"n_label\">" + detail::xml_escape(n->label) +
             "</data>\n";
    }
    out += std::string("      <data key=\"n_class\">") +
           to_string(n->node_class) + "</data>\n";
    out += std::string("      <data key=\"n_origin\">") +
           to_string(n->origin) + "</data>\n";
    if (n->coordinate) {
      out += "      <data key=\"n_x\">" +
             detail::format_double(n->coordinate->x) + "</data>\n";
      out += "      <data key=\"n_y\">" +
             detail::format_double(n->coordinate->y) + "</data>\n";
      out += "      <data key=\"n_z\">" +
             detail::format_double(n->coordinate->z) + "</data>\n";
    }
    out += "    </node>\n";
  }
  for (const GraphEdge* e : detail::sorted_edges(g)) {
    out += "    <edge source=\"" + detail::xml_escape(e->source) +
           "\" target=\"" + detail::xml_escape(e->target) + "\">\n";
    out += std::string("      <data key=\"e_class\">") +
           to_string(e->edge_class) + "</data>\n";
    if (!e->label.empty()) {
      out += "      <data key=\"e_label\">" + detail::xml_escape(e->label) +
             "</data>\n";
    }
    out += "    </edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

inline std::string export_graph(const LabeledDiGraph& g, ExportFormat format) {
  switch (format) {
    case ExportFormat::Json: return export_json(g);
    case ExportFormat::Dot: return export_dot(g);
    case ExportFormat::GraphMl: return export_graphml(g);
  }
  return {};
}

/// Loads a GraphDocument (JSON). Throws MalformedDocument on syntax or
/// schema violations, VersionMismatch on a foreign format_version and
/// DanglingEdge when an edge references a missing node.
inline LabeledDiGraph import_graph(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }

  try {
    if (!doc.is_object() || !doc.contains("format_version")) {
      throw Error(ErrorCode::MalformedDocument,
                  "missing top-level format_version");
    }
    if (doc["format_version"].get<std::string>() != kGraphDocumentVersion) {
      throw Error(ErrorCode::VersionMismatch,
                  "unsupported format_version '" +
                      doc["format_version"].get<std::string>() + "'");
    }

    LabeledDiGraph g;
    if (doc.contains("metadata")) {
      const auto& md = doc["metadata"];
      g.set_directed(md.value("directed", true));
      if (md.contains("sources"))
        g.metadata().sources = md["sources"].get<std::vector<std::string>>();
      if (md.contains("units")) {
        g.metadata().units_bore = md["units"].value("bore", "");
        g.metadata().units_coords = md["units"].value("coords", "");
      }
      if (md.contains("options")) {
        g.metadata().options =
            md["options"].get<std::map<std::string, std::string>>();
      }
      if (md.contains("warnings"))
        g.metadata().warnings = md["warnings"].get<std::vector<std::string>>();
    }

    for (const auto& jn : doc.value("nodes", nlohmann::json::array())) {
      GraphNode n;
      n.id = jn.at("id").get<std::string>();
      n.short_id = jn.value("short_id", "");
      n.label = jn.value("label", "");
      auto cls = node_class_from_string(jn.at("class").get<std::string>());
      if (!cls) {
        throw Error(ErrorCode::MalformedDocument,
                    "unknown node class '" +
                        jn.at("class").get<std::string>() + "'");
      }
      n.node_class = *cls;
      if (jn.contains("coord")) {
        const auto& c = jn["coord"];
        if (!c.is_array() || c.size() != 3) {
          throw Error(ErrorCode::MalformedDocument,
                      "node '" + n.id + "' coord is not a 3-vector");
        }
        n.coordinate = Vec3{c[0].get<double>(), c[1].get<double>(),
                            c[2].get<double>()};
      }
      auto origin = origin_from_string(jn.value("origin", "Synthetic"));
      if (!origin) {
        throw Error(ErrorCode::MalformedDocument,
                    "unknown origin '" + jn.value("origin", "") + "'");
      }
      n.origin = *origin;
      if (jn.contains("attrs")) {
        n.attrs = jn["attrs"].get<std::map<std::string, std::string>>();
      }
      try {
        g.add_node(std::move(n));
      } catch (const Error& e) {
        throw Error(ErrorCode::MalformedDocument, e.what());
      }
    }

    for (const auto& je : doc.value("edges", nlohmann::json::array())) {
      GraphEdge e;
      e.source = je.at("source").get<std::string>();
      e.target = je.at("target").get<std::string>();
      auto cls = edge_class_from_string(je.at("class").get<std::string>());
      if (!cls) {
        throw Error(ErrorCode::MalformedDocument,
                    "unknown edge class '" +
                        je.at("class").get<std::string>() + "'");
      }
      e.edge_class = *cls;
      e.label = je.value("label", "");
      if (je.contains("meta")) {
        e.attrs = je["meta"].get<std::map<std::string, std::string>>();
      }
      g.add_edge(std::move(e));  // throws DanglingEdge on missing endpoints
    }

    return g;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
}

}  // namespace plantgraph
