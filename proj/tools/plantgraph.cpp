// Command-line front end: converts Proteus XML and PCF files to graph
// documents, orients and simplifies them, and runs the whole chain at once.
//
// Exit codes: 0 success, 1 warnings under --strict, 2 usage or input errors.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <plantgraph/plantgraph.hpp>

namespace {

using plantgraph::Error;
using plantgraph::ErrorCode;
using plantgraph::ExportFormat;
using plantgraph::LabeledDiGraph;
using plantgraph::PcfPipeline;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << content;
  if (!out) throw std::runtime_error(path + ": write failed");
}

ExportFormat parse_format(const std::string& name) {
  if (name == "json") return ExportFormat::Json;
  if (name == "dot") return ExportFormat::Dot;
  if (name == "graphml") return ExportFormat::GraphMl;
  throw std::runtime_error("unknown format '" + name + "'");
}

double default_epsilon() {
  const char* env = std::getenv("PLANTGRAPH_EPSILON");
  if (env == nullptr || *env == '\0') return 1.0;
  char* end = nullptr;
  double value = std::strtod(env, &end);
  if (end == env || *end != '\0' || !(value > 0.0) || !std::isfinite(value)) {
    throw std::runtime_error(
        "PLANTGRAPH_EPSILON must be a positive number, got '" +
        std::string(env) + "'");
  }
  return value;
}

// Collects warnings across all graphs a command produced; --strict turns a
// non-empty collection into exit 1.
struct Session {
  bool strict = false;
  std::size_t warning_count = 0;

  void drain(const LabeledDiGraph& g) {
    for (const auto& w : g.metadata().warnings) {
      std::cerr << "warning: " << w << "\n";
      ++warning_count;
    }
  }

  void note(const std::string& w) {
    std::cerr << "warning: " << w << "\n";
    ++warning_count;
  }
};

PcfPipeline parse_pcf_file(const std::string& path) {
  try {
    return plantgraph::parse_pcf(read_file(path));
  } catch (const Error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

plantgraph::ProteusModel parse_proteus_file(const std::string& path) {
  try {
    return plantgraph::parse_proteus(read_file(path));
  } catch (const Error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

LabeledDiGraph import_graph_file(const std::string& path) {
  try {
    return plantgraph::import_graph(read_file(path));
  } catch (const Error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

plantgraph::RootFromPumpMap load_pump_map(const std::string& path) {
  plantgraph::RootFromPumpMap strategy;
  std::istringstream in(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view sv = plantgraph::detail::trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected <nozzle-tag>=origin|terminus");
    }
    std::string tag{plantgraph::detail::trim(sv.substr(0, eq))};
    std::string_view role = plantgraph::detail::trim(sv.substr(eq + 1));
    if (tag.empty()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": empty nozzle tag");
    }
    plantgraph::PumpRole parsed;
    if (role == "origin") {
      parsed = plantgraph::PumpRole::Origin;
    } else if (role == "terminus") {
      parsed = plantgraph::PumpRole::Terminus;
    } else {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": role must be 'origin' or 'terminus'");
    }
    auto it = strategy.roles.find(tag);
    if (it != strategy.roles.end() && it->second != parsed) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": conflicting role for '" + tag + "'");
    }
    strategy.roles[tag] = parsed;
  }
  if (strategy.roles.empty()) {
    throw std::runtime_error(path + ": pump map has no entries");
  }
  return strategy;
}

std::string safe_file_stem(const std::string& name) {
  std::string out;
  for (char c : name) {
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-') ? c : '_';
  }
  return out.empty() ? std::string("pipeline") : out;
}

struct ProteusArgs {
  std::string input;
  std::string output;
  std::string format = "json";
  bool signals = false;
};

void run_proteus2graph(const ProteusArgs& args, Session& session) {
  auto model = parse_proteus_file(args.input);
  plantgraph::ProteusGraphOptions opts;
  opts.include_signals = args.signals;
  LabeledDiGraph g = proteus_to_graph(model, opts);
  g.metadata().sources.push_back(args.input);
  g = assign_short_ids(g);
  session.drain(g);
  write_text(args.output, export_graph(g, parse_format(args.format)));
}

struct PcfArgs {
  std::vector<std::string> inputs;
  std::string output;
  std::string format = "json";
  double epsilon = 1.0;
  bool epsilon_set = false;
  bool merge = false;
};

void run_pcf2graph(const PcfArgs& args, Session& session) {
  double epsilon = args.epsilon_set ? args.epsilon : default_epsilon();
  if (args.inputs.size() > 1 && !args.merge) {
    throw CLI::ValidationError("pcf2graph",
                               "multiple inputs require --merge");
  }
  std::vector<PcfPipeline> pipelines;
  pipelines.reserve(args.inputs.size());
  for (const auto& path : args.inputs) {
    pipelines.push_back(parse_pcf_file(path));
  }
  LabeledDiGraph g = args.merge
                         ? merge_pipelines(pipelines, epsilon)
                         : pcf_to_graph(pipelines.front(), epsilon);
  for (const auto& path : args.inputs) g.metadata().sources.push_back(path);
  g = assign_short_ids(g);
  session.drain(g);
  write_text(args.output, export_graph(g, parse_format(args.format)));
}

struct OrientArgs {
  std::string input;
  std::string output;
  std::string start_coords_pcf;
  std::string elevation_axis;
  std::string root_id;
  std::string pump_map_path;
};

void run_orient(const OrientArgs& args, Session& session) {
  LabeledDiGraph g = import_graph_file(args.input);

  PcfPipeline pipeline;
  plantgraph::RootStrategy strategy = plantgraph::RootExplicit{};
  if (!args.start_coords_pcf.empty()) {
    pipeline = parse_pcf_file(args.start_coords_pcf);
    strategy = plantgraph::RootFromStartCoords{};
  } else if (!args.elevation_axis.empty()) {
    auto axis = plantgraph::axis_from_string(args.elevation_axis);
    if (!axis) {
      throw CLI::ValidationError("--elevation-axis",
                                 "must be one of x, y, z");
    }
    strategy = plantgraph::RootFromElevation{*axis};
  } else if (!args.root_id.empty()) {
    strategy = plantgraph::RootExplicit{args.root_id};
  } else {
    strategy = load_pump_map(args.pump_map_path);
  }

  std::string root = find_root(g, pipeline, strategy);
  LabeledDiGraph oriented = orient_from_root(g, root);
  session.drain(oriented);
  write_text(args.output, plantgraph::export_json(oriented));
}

struct SimplifyArgs {
  std::string input;
  std::string output;
  bool valves_to_nodes = false;
  bool collapse = false;
  bool undirected = false;
};

void run_simplify(const SimplifyArgs& args, Session& session) {
  LabeledDiGraph g = import_graph_file(args.input);
  if (args.valves_to_nodes) g = valve_edges_to_nodes(g);
  if (args.collapse) g = collapse_piping_chains(g);
  if (args.undirected) g = strip_directions(g);
  g = assign_short_ids(g);
  session.drain(g);
  write_text(args.output, plantgraph::export_json(g));
}

struct PipelineArgs {
  std::string pnid_xml;
  std::string pcf_dir;
  std::string outdir = "out";
};

nlohmann::ordered_json graph_summary(const LabeledDiGraph& g) {
  nlohmann::ordered_json j;
  j["nodes"] = g.nodes().size();
  j["edges"] = g.edges().size();
  j["components"] = plantgraph::count_undirected_components(g);
  j["warnings"] = g.metadata().warnings;
  return j;
}

void run_pipeline(const PipelineArgs& args, Session& session) {
  namespace fs = std::filesystem;
  double epsilon = default_epsilon();
  fs::create_directories(args.outdir);
  auto out_path = [&](const std::string& name) {
    return (fs::path(args.outdir) / name).string();
  };

  // 2D side.
  auto model = parse_proteus_file(args.pnid_xml);
  LabeledDiGraph pnid = proteus_to_graph(model, {});
  pnid.metadata().sources.push_back(args.pnid_xml);
  pnid = assign_short_ids(pnid);
  session.drain(pnid);
  write_text(out_path("pnid.json"), export_graph(pnid, ExportFormat::Json));
  write_text(out_path("pnid.dot"), export_graph(pnid, ExportFormat::Dot));

  // 3D side: every .pcf under pcf_dir, in name order.
  std::vector<std::string> pcf_files;
  if (!fs::is_directory(args.pcf_dir)) {
    throw std::runtime_error(args.pcf_dir + ": not a directory");
  }
  for (const auto& entry : fs::directory_iterator(args.pcf_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pcf") {
      pcf_files.push_back(entry.path().string());
    }
  }
  std::sort(pcf_files.begin(), pcf_files.end());

  std::vector<PcfPipeline> pipelines;
  nlohmann::ordered_json pipeline_reports = nlohmann::ordered_json::array();
  for (const auto& path : pcf_files) {
    pipelines.push_back(parse_pcf_file(path));
  }

  // Pipelines considered present in the P&ID when any of their equipment
  // end-connection tags appears as a node label there.
  std::set<std::string> pnid_labels;
  for (const auto& n : pnid.nodes()) {
    if (!n.label.empty()) pnid_labels.insert(n.label);
  }
  std::vector<std::string> unmatched;
  for (std::size_t i = 0; i < pipelines.size(); ++i) {
    const auto& p = pipelines[i];
    nlohmann::ordered_json entry;
    entry["name"] = p.name;
    entry["file"] = pcf_files[i];
    entry["components"] = p.components.size();
    entry["end_connections"] = p.end_connections.size();
    std::vector<std::string> tags;
    std::vector<std::string> matched;
    for (const auto& ec : p.end_connections) {
      if (ec.kind != plantgraph::EndConnectionKind::Equipment ||
          ec.tag.empty()) {
        continue;
      }
      tags.push_back(ec.tag);
      if (pnid_labels.count(ec.tag)) matched.push_back(ec.tag);
    }
    std::sort(tags.begin(), tags.end());
    std::sort(matched.begin(), matched.end());
    entry["equipment_tags"] = tags;
    entry["matched_tags"] = matched;
    entry["matched"] = !matched.empty();
    if (matched.empty()) unmatched.push_back(p.name);
    pipeline_reports.push_back(std::move(entry));
  }
  std::sort(unmatched.begin(), unmatched.end());

  nlohmann::ordered_json report;
  report["pnid"] = graph_summary(pnid);
  report["pnid"]["file"] = args.pnid_xml;
  report["pcf"]["directory"] = args.pcf_dir;
  report["pcf"]["files"] = pcf_files;
  report["pcf"]["pipelines"] = std::move(pipeline_reports);

  if (pipelines.empty()) {
    session.note("pipeline: no .pcf files in '" + args.pcf_dir + "'");
    report["pcf"]["merged"] = false;
  } else {
    bool units_agree = true;
    for (const auto& p : pipelines) {
      if (p.units.bore != pipelines.front().units.bore ||
          p.units.coords != pipelines.front().units.coords) {
        units_agree = false;
      }
    }
    if (units_agree) {
      LabeledDiGraph merged = merge_pipelines(pipelines, epsilon);
      for (const auto& path : pcf_files) {
        merged.metadata().sources.push_back(path);
      }
      merged = assign_short_ids(merged);
      session.drain(merged);
      write_text(out_path("pcf_raw.json"),
                 export_graph(merged, ExportFormat::Json));

      LabeledDiGraph simplified =
          collapse_piping_chains(valve_edges_to_nodes(merged));
      simplified = assign_short_ids(simplified);
      write_text(out_path("pcf.json"),
                 export_graph(simplified, ExportFormat::Json));
      write_text(out_path("pcf.dot"),
                 export_graph(simplified, ExportFormat::Dot));

      report["pcf"]["merged"] = true;
      report["pcf"]["raw"] = graph_summary(merged);
      report["pcf"]["simplified"] = graph_summary(simplified);
    } else {
      session.note("pipeline: PCF files disagree on units; emitting "
                   "per-pipeline graphs without merging");
      report["pcf"]["merged"] = false;
      std::map<std::string, int> used;
      for (std::size_t i = 0; i < pipelines.size(); ++i) {
        LabeledDiGraph g = pcf_to_graph(pipelines[i], epsilon);
        g.metadata().sources.push_back(pcf_files[i]);
        g = assign_short_ids(g);
        session.drain(g);
        std::string stem = safe_file_stem(pipelines[i].name);
        int n = ++used[stem];
        if (n > 1) stem += "_" + std::to_string(n);
        write_text(out_path("pcf_" + stem + ".json"),
                   export_graph(g, ExportFormat::Json));
      }
    }
  }

  report["unmatched_pipelines"] = unmatched;
  write_text(out_path("report.json"), report.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"2D/3D plant topology graph toolkit"};
  app.require_subcommand(1);
  Session session;

  ProteusArgs proteus_args;
  auto* proteus_cmd = app.add_subcommand(
      "proteus2graph", "Convert a Proteus P&ID XML file to a graph");
  proteus_cmd->add_option("input", proteus_args.input, "Proteus XML file")
      ->required();
  proteus_cmd->add_flag("--signals", proteus_args.signals,
                        "include instrument nodes and signal edges");
  proteus_cmd
      ->add_option("--format", proteus_args.format, "json, dot or graphml")
      ->check(CLI::IsMember({"json", "dot", "graphml"}));
  proteus_cmd->add_option("-o,--output", proteus_args.output,
                          "output file (default stdout)");
  proteus_cmd->add_flag("--strict", session.strict,
                        "exit 1 if warnings were produced");
  proteus_cmd->callback([&] { run_proteus2graph(proteus_args, session); });

  PcfArgs pcf_args;
  auto* pcf_cmd =
      app.add_subcommand("pcf2graph", "Convert PCF piping files to a graph");
  pcf_cmd->add_option("inputs", pcf_args.inputs, "PCF files")->required();
  auto* eps_opt = pcf_cmd->add_option(
      "--epsilon", pcf_args.epsilon,
      "coordinate tolerance (default $PLANTGRAPH_EPSILON or 1.0)");
  pcf_cmd->add_flag("--merge", pcf_args.merge,
                    "merge all inputs into a single graph");
  pcf_cmd->add_option("--format", pcf_args.format, "json, dot or graphml")
      ->check(CLI::IsMember({"json", "dot", "graphml"}));
  pcf_cmd->add_option("-o,--output", pcf_args.output,
                      "output file (default stdout)");
  pcf_cmd->add_flag("--strict", session.strict,
                    "exit 1 if warnings were produced");
  pcf_cmd->callback([&] {
    pcf_args.epsilon_set = eps_opt->count() > 0;
    run_pcf2graph(pcf_args, session);
  });

  OrientArgs orient_args;
  auto* orient_cmd = app.add_subcommand(
      "orient", "Re-point edges of a graph document away from a root");
  orient_cmd->add_option("input", orient_args.input, "graph JSON file")
      ->required();
  auto* strategy_group =
      orient_cmd->add_option_group("strategy", "root selection");
  strategy_group->add_option("--start-coords", orient_args.start_coords_pcf,
                             "PCF file whose START-CO-ORDS marks the root");
  strategy_group->add_option("--elevation-axis", orient_args.elevation_axis,
                             "up axis; highest end connection is the root");
  strategy_group->add_option("--root", orient_args.root_id,
                             "explicit root node id");
  strategy_group->add_option("--pump-map", orient_args.pump_map_path,
                             "key=value file mapping nozzle tags to "
                             "origin|terminus");
  strategy_group->require_option(1);
  orient_cmd->add_option("-o,--output", orient_args.output,
                         "output file (default stdout)");
  orient_cmd->add_flag("--strict", session.strict,
                       "exit 1 if warnings were produced");
  orient_cmd->callback([&] { run_orient(orient_args, session); });

  SimplifyArgs simplify_args;
  auto* simplify_cmd = app.add_subcommand(
      "simplify", "Apply abstraction-raising passes to a graph document");
  simplify_cmd->add_option("input", simplify_args.input, "graph JSON file")
      ->required();
  simplify_cmd->add_flag("--valves-to-nodes", simplify_args.valves_to_nodes,
                         "turn Valve edges into Valve nodes");
  simplify_cmd->add_flag("--collapse", simplify_args.collapse,
                         "collapse pipe/weld chains through coordinate "
                         "nodes");
  simplify_cmd->add_flag("--undirected", simplify_args.undirected,
                         "drop directions and mirrored duplicates");
  simplify_cmd->add_option("-o,--output", simplify_args.output,
                           "output file (default stdout)");
  simplify_cmd->add_flag("--strict", session.strict,
                         "exit 1 if warnings were produced");
  simplify_cmd->callback([&] { run_simplify(simplify_args, session); });

  PipelineArgs pipeline_args;
  auto* pipeline_cmd = app.add_subcommand(
      "pipeline", "Convert a P&ID plus a directory of PCF files and report");
  pipeline_cmd->add_option("pnid", pipeline_args.pnid_xml, "Proteus XML file")
      ->required();
  pipeline_cmd
      ->add_option("pcf-dir", pipeline_args.pcf_dir, "directory of .pcf files")
      ->required();
  pipeline_cmd->add_option("-o,--outdir", pipeline_args.outdir,
                           "output directory (default ./out)");
  pipeline_cmd->add_flag("--strict", session.strict,
                         "exit 1 if warnings were produced");
  pipeline_cmd->callback([&] { run_pipeline(pipeline_args, session); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  return session.strict && session.warning_count > 0 ? 1 : 0;
}
