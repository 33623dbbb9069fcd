#include "iotc/project.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "iotc/parser.hpp"

namespace iotc
{

namespace fs = std::filesystem;

std::string read_file(const fs::path & p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ProjectError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path & p, const std::string & content)
{
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw ProjectError("cannot write " + p.string());
  out << content;
}

namespace
{

template <typename T>
void take(Result<T> & r, std::vector<Diagnostic> & diags, bool & ok)
{
  diags.insert(diags.end(), r.diagnostics.begin(), r.diagnostics.end());
  if (!r) ok = false;
}

}  // namespace

Result<ProgramModel> load_project(const ProjectConfig & cfg)
{
  if (!fs::is_directory(cfg.dir)) throw ProjectError("not a project directory: " + cfg.dir.string());
  const std::string vsrc = read_file(cfg.path_of(cfg.vocab_file));
  const std::string asrc = read_file(cfg.path_of(cfg.arch_file));
  const std::string usrc = read_file(cfg.path_of(cfg.ui_file));
  const std::string dsrc = read_file(cfg.path_of(cfg.deploy_file));

  Result<ProgramModel> result;
  bool ok = true;
  auto v = parse_vocab(vsrc, cfg.vocab_file);
  auto a = parse_arch(asrc, cfg.arch_file);
  auto u = parse_ui(usrc, cfg.ui_file);
  auto d = parse_deploy(dsrc, cfg.deploy_file, cfg.labels);
  take(v, result.diagnostics, ok);
  take(a, result.diagnostics, ok);
  take(u, result.diagnostics, ok);
  take(d, result.diagnostics, ok);
  sort_diagnostics(result.diagnostics);
  if (!ok) return result;
  result.value = ProgramModel{std::move(*v), std::move(*a), std::move(*u), std::move(*d)};
  return result;
}

namespace
{

// Analyzer spans fall back to the default file names; map them to the
// configured ones.
void rename_files(std::vector<Diagnostic> & diags, const ProjectConfig & cfg)
{
  const std::pair<const char *, const std::string *> names[] = {
    {"vocab.spec", &cfg.vocab_file},
    {"arch.spec", &cfg.arch_file},
    {"ui.spec", &cfg.ui_file},
    {"deploy.spec", &cfg.deploy_file},
  };
  for (auto & d : diags) {
    for (const auto & [def, actual] : names) {
      if (d.span.file == def) {
        d.span.file = *actual;
        break;
      }
    }
  }
}

}  // namespace

Result<ValidatedProgram> check_project(const ProjectConfig & cfg)
{
  Result<ValidatedProgram> result;
  auto model = load_project(cfg);
  result.diagnostics = model.diagnostics;
  if (!model) return result;
  auto vp = validate(*model);
  rename_files(vp.diagnostics, cfg);
  result.diagnostics.insert(result.diagnostics.end(), vp.diagnostics.begin(), vp.diagnostics.end());
  sort_diagnostics(result.diagnostics);
  result.value = std::move(vp.value);
  return result;
}

Result<BuildOutput> build_project(const ProjectConfig & cfg, const std::optional<MappingTable> & mapping)
{
  Result<BuildOutput> result;
  auto vp = check_project(cfg);
  result.diagnostics = vp.diagnostics;
  if (!vp) return result;

  BuildOutput out;
  if (mapping) {
    out.mapping = *mapping;
  } else {
    auto mt = map_services(*vp, cfg.seed);
    rename_files(mt.diagnostics, cfg);
    result.diagnostics.insert(result.diagnostics.end(), mt.diagnostics.begin(), mt.diagnostics.end());
    if (!mt) return result;
    out.mapping = std::move(*mt);
  }
  auto packages = link(*vp, out.mapping);
  rename_files(packages.diagnostics, cfg);
  result.diagnostics.insert(result.diagnostics.end(), packages.diagnostics.begin(), packages.diagnostics.end());
  if (!packages) return result;
  out.packages = std::move(*packages);
  out.stubs = generate_frameworks(*vp);
  result.value = std::move(out);
  return result;
}

std::map<std::string, std::string> build_files(const BuildOutput & out)
{
  std::map<std::string, std::string> files;
  files["mapping.json"] = mapping_to_json(out.mapping);
  for (const auto & p : out.packages) files[p.device + "/manifest.json"] = package_to_json(p);
  for (const auto & [id, stub] : out.stubs) files["stubs/" + id + ".stub"] = format_stub(stub);
  return files;
}

namespace
{

bool looks_like_build(const fs::path & dir)
{
  if (fs::exists(dir / "mapping.json")) return true;
  for (const auto & e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::exists(e.path() / "manifest.json")) return true;
  }
  return false;
}

}  // namespace

void write_tree(const fs::path & dir, const std::map<std::string, std::string> & files)
{
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) throw ProjectError(dir.string() + " is not a directory");
    if (!fs::is_empty(dir) && !looks_like_build(dir)) {
      throw ProjectError("refusing to overwrite " + dir.string() + ": not a build directory");
    }
    for (const auto & e : fs::directory_iterator(dir)) fs::remove_all(e.path());
  }
  fs::create_directories(dir);
  for (const auto & [rel, content] : files) write_file(dir / rel, content);
}

std::vector<DevicePackage> load_packages(const fs::path & dir)
{
  if (!fs::is_directory(dir)) throw ProjectError("not a build directory: " + dir.string());
  std::vector<DevicePackage> out;
  for (const auto & e : fs::directory_iterator(dir)) {
    const auto manifest = e.path() / "manifest.json";
    if (!e.is_directory() || !fs::exists(manifest)) continue;
    try {
      out.push_back(package_from_json(read_file(manifest)));
    } catch (const std::runtime_error & err) {
      throw ProjectError(manifest.string() + ": " + err.what());
    }
  }
  if (out.empty()) throw ProjectError("no manifests in " + dir.string());
  std::sort(out.begin(), out.end(), [](const DevicePackage & a, const DevicePackage & b) { return a.device < b.device; });
  return out;
}

StubRegistry load_registry(const SimFiles & files)
{
  if (!files.logic) return {};
  try {
    return registry_from_config(read_file(*files.logic));
  } catch (const ProjectError &) {
    throw;
  } catch (const std::runtime_error & e) {
    throw SimError(sim_error::InvalidInput, files.logic->string() + ": " + e.what());
  }
}

SimInputs load_sim_inputs(std::vector<DevicePackage> packages, const SimFiles & files)
{
  SimInputs in;
  in.packages = std::move(packages);
  if (files.traces_dir) {
    if (!fs::is_directory(*files.traces_dir)) throw ProjectError("no trace directory " + files.traces_dir->string());
    // struct of every sensing component, by component name
    std::map<std::string, const StructDecl *> sensors;
    for (const auto & p : in.packages) {
      for (const auto & b : p.hosted) {
        if (b.publications.empty() || is_service(b.kind)) continue;
        const auto & sname = p.measurements.at(b.publications.front());
        for (const auto & s : p.structs) {
          if (s.name == sname) sensors[b.name] = &s;
        }
      }
    }
    std::vector<fs::path> csvs;
    for (const auto & e : fs::directory_iterator(*files.traces_dir)) {
      if (e.is_regular_file() && e.path().extension() == ".csv") csvs.push_back(e.path());
    }
    std::sort(csvs.begin(), csvs.end());
    for (const auto & path : csvs) {
      const std::string name = path.stem().string();
      const std::string component = name.substr(0, name.find('@'));
      auto it = sensors.find(component);
      if (it == sensors.end()) {
        throw SimError(sim_error::InvalidTrace, path.string() + ": no hosted sensor or tag named " + component);
      }
      in.traces[name] = parse_trace_csv(name, read_file(path), *it->second);
    }
  }
  if (files.storage) in.storage = parse_storage_seed(read_file(*files.storage), in.packages);
  if (files.feedback) in.feedback = parse_feedback(read_file(*files.feedback));
  if (files.generators) in.generators = parse_generators(read_file(*files.generators));
  return in;
}

}  // namespace iotc
