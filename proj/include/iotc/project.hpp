// iotc/project.hpp - project directories and the check/map/link pipeline
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "iotc/analyzer.hpp"
#include "iotc/linker.hpp"
#include "iotc/mapper.hpp"
#include "iotc/model.hpp"
#include "iotc/sim.hpp"

namespace iotc
{

/// Missing files, unreadable paths, bad build directories. The CLI maps it
/// to exit code 2.
class ProjectError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

struct ProjectConfig
{
  std::filesystem::path dir;
  std::string vocab_file = "vocab.spec";
  std::string arch_file = "arch.spec";
  std::string ui_file = "ui.spec";
  std::string deploy_file = "deploy.spec";
  std::uint64_t seed = 0;
  std::filesystem::path build_dir;  // empty: <dir>/build
  LabelAllowList labels;

  std::filesystem::path path_of(const std::string & file) const { return dir / file; }
  std::filesystem::path output_dir() const { return build_dir.empty() ? dir / "build" : build_dir; }
};

std::string read_file(const std::filesystem::path & p);
void write_file(const std::filesystem::path & p, const std::string & content);

/// Parses the four spec files. Diagnostics carry the file names as given in
/// the config.
Result<ProgramModel> load_project(const ProjectConfig & cfg);

/// load_project + validate; diagnostics of both steps, sorted.
Result<ValidatedProgram> check_project(const ProjectConfig & cfg);

struct BuildOutput
{
  MappingTable mapping;
  std::vector<DevicePackage> packages;
  StubSet stubs;
};

/// check, map (unless `mapping` is given) and link.
Result<BuildOutput> build_project(const ProjectConfig & cfg, const std::optional<MappingTable> & mapping = {});

/// Relative path -> file content for a build tree: mapping.json,
/// <device>/manifest.json, stubs/<component>.stub.
std::map<std::string, std::string> build_files(const BuildOutput & out);

/// Replaces the contents of `dir` with `files`. Refuses to clear a non-empty
/// directory that does not look like a build tree (no mapping.json or
/// manifests).
void write_tree(const std::filesystem::path & dir, const std::map<std::string, std::string> & files);

/// Every <device>/manifest.json below `dir`, sorted by device.
std::vector<DevicePackage> load_packages(const std::filesystem::path & dir);

struct SimFiles
{
  std::optional<std::filesystem::path> traces_dir;  // <Sensor>.csv or <Sensor@Device>.csv
  std::optional<std::filesystem::path> logic;
  std::optional<std::filesystem::path> storage;
  std::optional<std::filesystem::path> feedback;
  std::optional<std::filesystem::path> generators;
};

/// Traces, storage seed, feedback and generators for `packages`. The
/// registry is returned separately because SimInputs only points at it.
SimInputs load_sim_inputs(std::vector<DevicePackage> packages, const SimFiles & files);
StubRegistry load_registry(const SimFiles & files);

}  // namespace iotc
