// iotc - compile, map, link and simulate IoT application specs
#include <chrono>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "iotc/analyzer.hpp"
#include "iotc/parser.hpp"
#include "iotc/project.hpp"

using namespace iotc;
namespace fs = std::filesystem;

namespace
{

struct Common
{
  std::string dir;
  bool quiet = false;
  std::uint64_t seed = 0;
  std::string vocab = "vocab.spec";
  std::string arch = "arch.spec";
  std::string ui = "ui.spec";
  std::string deploy = "deploy.spec";

  ProjectConfig config() const
  {
    ProjectConfig cfg;
    cfg.dir = dir;
    cfg.vocab_file = vocab;
    cfg.arch_file = arch;
    cfg.ui_file = ui;
    cfg.deploy_file = deploy;
    cfg.seed = seed;
    if (const char * env = std::getenv("IOTC_SEED")) {
      try {
        cfg.seed = std::stoull(env);
      } catch (const std::exception &) {
        throw ProjectError(std::string("IOTC_SEED is not an unsigned integer: ") + env);
      }
    }
    return cfg;
  }
};

void add_project_options(CLI::App & cmd, Common & c, bool with_seed)
{
  cmd.add_option("project", c.dir, "project directory")->required();
  cmd.add_option("--vocab", c.vocab, "domain spec file name");
  cmd.add_option("--arch", c.arch, "architecture spec file name");
  cmd.add_option("--ui", c.ui, "user-interaction spec file name");
  cmd.add_option("--deploy", c.deploy, "deployment spec file name");
  if (with_seed) cmd.add_option("--seed", c.seed, "mapper seed (IOTC_SEED overrides)");
}

void print(const std::vector<Diagnostic> & diags, bool quiet)
{
  for (const auto & d : diags) {
    if (quiet && d.severity != Severity::Error) continue;
    std::cerr << d << '\n';
  }
}

template <typename T>
int finish(const Result<T> & r, bool quiet)
{
  print(r.diagnostics, quiet);
  return r ? 0 : 1;
}

MappingTable read_mapping(const std::string & path)
{
  try {
    return mapping_from_json(read_file(path));
  } catch (const ProjectError &) {
    throw;
  } catch (const std::runtime_error & e) {
    throw ProjectError(path + ": " + e.what());
  }
}

int cmd_check(const Common & c, const std::string & graph)
{
  auto vp = check_project(c.config());
  print(vp.diagnostics, c.quiet);
  if (!vp) return 1;
  if (graph == "dot") std::cout << to_dot(dataflow_graph(*vp));
  return 0;
}

int cmd_graph(const Common & c, const std::string & format)
{
  auto vp = check_project(c.config());
  print(vp.diagnostics, c.quiet);
  if (!vp) return 1;
  const auto g = dataflow_graph(*vp);
  if (format == "dot") {
    std::cout << to_dot(g);
  } else {
    for (const auto & e : g.edges) {
      std::cout << e.from << " -> " << e.to << " " << to_string(e.mode) << " " << e.label << '\n';
    }
  }
  return 0;
}

int cmd_map(const Common & c, const std::string & out)
{
  auto vp = check_project(c.config());
  if (!vp) return finish(vp, c.quiet);
  auto mt = map_services(*vp, c.config().seed);
  print(vp.diagnostics, c.quiet);
  print(mt.diagnostics, c.quiet);
  if (!mt) return 1;
  if (!out.empty()) write_file(out, mapping_to_json(*mt));
  if (!c.quiet || out.empty()) std::cout << format_mapping(*mt);
  return 0;
}

int emit_build(const Common & c, const Result<BuildOutput> & r, const std::string & out)
{
  print(r.diagnostics, c.quiet);
  if (!r) return 1;
  const fs::path dir = out.empty() ? c.config().output_dir() : fs::path(out);
  write_tree(dir, build_files(*r));
  if (!c.quiet) {
    std::cout << "wrote " << r->packages.size() << " package(s) and " << r->stubs.size() << " stub(s) to "
              << dir.string() << '\n';
  }
  return 0;
}

int cmd_link(const Common & c, const std::string & mapping, const std::string & out)
{
  return emit_build(c, build_project(c.config(), read_mapping(mapping)), out);
}

int cmd_build(const Common & c, const std::string & mapping, const std::string & out)
{
  std::optional<MappingTable> mt;
  if (!mapping.empty()) mt = read_mapping(mapping);
  return emit_build(c, build_project(c.config(), mt), out);
}

int cmd_fmt(const Common & c, bool check_only)
{
  const ProjectConfig cfg = c.config();
  auto model = load_project(cfg);
  print(model.diagnostics, c.quiet);
  if (!model) return 1;
  const std::pair<std::string, std::string> outputs[] = {
    {cfg.vocab_file, format(model->vocab)},
    {cfg.arch_file, format(model->arch)},
    {cfg.ui_file, format(model->ui)},
    {cfg.deploy_file, format(model->deploy)},
  };
  int changed = 0;
  for (const auto & [file, text] : outputs) {
    if (read_file(cfg.path_of(file)) == text) continue;
    ++changed;
    if (check_only) {
      std::cout << file << " is not canonically formatted\n";
    } else {
      write_file(cfg.path_of(file), text);
      if (!c.quiet) std::cout << "formatted " << file << '\n';
    }
  }
  return check_only && changed > 0 ? 1 : 0;
}

struct RunOptions
{
  std::string build;
  std::string traces, logic, storage, feedback, generators;
  double horizon_s = 600;
  std::int64_t horizon_ms = -1;
  std::uint64_t seed = 0;
  std::string log_json;
  std::string out;
  std::int64_t pace_ms = 0;
  bool quiet = false;
};

int cmd_run(const RunOptions & o)
{
  SimFiles files;
  if (!o.traces.empty()) files.traces_dir = o.traces;
  if (!o.logic.empty()) files.logic = o.logic;
  if (!o.storage.empty()) files.storage = o.storage;
  if (!o.feedback.empty()) files.feedback = o.feedback;
  if (!o.generators.empty()) files.generators = o.generators;
  auto packages = load_packages(o.build);
  try {
    StubRegistry registry = load_registry(files);
    SimInputs in = load_sim_inputs(std::move(packages), files);
    in.stubs = &registry;
    in.horizon_ms = o.horizon_ms >= 0 ? o.horizon_ms : static_cast<std::int64_t>(o.horizon_s * 1000.0);
    in.seed = o.seed;
    if (const char * env = std::getenv("IOTC_SEED")) in.seed = std::stoull(env);
    if (o.pace_ms > 0) {
      in.on_message = [&](const SimMessage &) { std::this_thread::sleep_for(std::chrono::milliseconds(o.pace_ms)); };
    }
    const SimTrace trace = run(in);
    const std::string text = format_trace(trace);
    if (o.out.empty()) {
      std::cout << text;
    } else {
      write_file(o.out, text);
    }
    if (!o.log_json.empty()) write_file(o.log_json, trace_json(trace));
    if (!o.quiet) {
      for (const auto & w : trace.warnings) std::cerr << "warning: " << w << '\n';
    }
    return 0;
  } catch (const SimError & e) {
    std::cerr << "error: " << e.what() << " [" << e.code() << "]\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"iotc - compiler and simulator for IoT application specs"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;
  app.add_flag("-q,--quiet", common.quiet, "print errors only");

  std::string graph_opt;
  auto * check = app.add_subcommand("check", "parse and validate a project");
  add_project_options(*check, common, false);
  check->add_option("--graph", graph_opt, "also print the dataflow graph")->check(CLI::IsMember({"dot"}));

  std::string graph_format = "dot";
  auto * graph = app.add_subcommand("graph", "print the dataflow graph");
  add_project_options(*graph, common, false);
  graph->add_option("--format", graph_format, "dot or text")->check(CLI::IsMember({"dot", "text"}));

  std::string map_out;
  auto * map = app.add_subcommand("map", "assign computational services to devices");
  add_project_options(*map, common, true);
  map->add_option("--out", map_out, "write the mapping as JSON");

  std::string link_mapping, link_out;
  auto * link_cmd = app.add_subcommand("link", "link packages from an existing mapping");
  add_project_options(*link_cmd, common, false);
  link_cmd->add_option("--mapping", link_mapping, "mapping.json from 'iotc map'")->required();
  link_cmd->add_option("--out", link_out, "build directory (default <project>/build)");

  std::string build_mapping, build_out;
  auto * build = app.add_subcommand("build", "check, map and link into a build directory");
  add_project_options(*build, common, true);
  build->add_option("--mapping", build_mapping, "reuse this mapping instead of mapping anew");
  build->add_option("--out", build_out, "build directory (default <project>/build)");

  bool fmt_check = false;
  auto * fmt = app.add_subcommand("fmt", "rewrite spec files in canonical form");
  add_project_options(*fmt, common, false);
  fmt->add_flag("--check", fmt_check, "only report files that would change");

  RunOptions ro;
  auto * runc = app.add_subcommand("run", "simulate a build directory");
  runc->add_option("build", ro.build, "build directory")->required();
  runc->add_option("--traces", ro.traces, "directory of <Sensor>.csv traces");
  runc->add_option("--logic", ro.logic, "logic config JSON");
  runc->add_option("--storage", ro.storage, "storage seed JSON");
  runc->add_option("--feedback", ro.feedback, "feedback model JSON");
  runc->add_option("--generators", ro.generators, "seeded sample generators JSON");
  runc->add_option("--horizon", ro.horizon_s, "virtual horizon in seconds (default 600)");
  runc->add_option("--horizon-ms", ro.horizon_ms, "virtual horizon in milliseconds");
  runc->add_option("--seed", ro.seed, "generator seed (IOTC_SEED overrides)");
  runc->add_option("--log-json", ro.log_json, "also write the trace as JSON");
  runc->add_option("--out", ro.out, "write the trace here instead of stdout");
  runc->add_option("--pace-ms", ro.pace_ms, "wall-clock delay per message; the trace is unaffected");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp & e) {
    return app.exit(e);
  } catch (const CLI::ParseError & e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*check) return cmd_check(common, graph_opt);
    if (*graph) return cmd_graph(common, graph_format);
    if (*map) return cmd_map(common, map_out);
    if (*link_cmd) return cmd_link(common, link_mapping, link_out);
    if (*build) return cmd_build(common, build_mapping, build_out);
    if (*fmt) return cmd_fmt(common, fmt_check);
    if (*runc) {
      ro.quiet = common.quiet;
      return cmd_run(ro);
    }
  } catch (const ProjectError & e) {
    std::cerr << "iotc: " << e.what() << '\n';
    return 2;
  } catch (const std::exception & e) {
    std::cerr << "iotc: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
