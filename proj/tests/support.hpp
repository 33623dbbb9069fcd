// shared helpers for the unit and acceptance tests
#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "iotc/analyzer.hpp"
#include "iotc/parser.hpp"
#include "iotc/project.hpp"

namespace testing
{

inline std::filesystem::path fixture(const std::string & name) { return std::filesystem::path(IOTC_FIXTURES) / name; }

inline std::string slurp(const std::filesystem::path & p)
{
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string replace_once(std::string text, const std::string & from, const std::string & to)
{
  auto pos = text.find(from);
  if (pos == std::string::npos) throw std::runtime_error("no '" + from + "' in source");
  return text.replace(pos, from.size(), to);
}

struct Sources
{
  std::string vocab, arch, ui, deploy;
};

/// Default deploy file: deploy.spec, else the first deploy-*.spec by name.
inline std::string default_deploy(const std::filesystem::path & dir)
{
  if (std::filesystem::exists(dir / "deploy.spec")) return "deploy.spec";
  std::string best;
  for (const auto & e : std::filesystem::directory_iterator(dir)) {
    auto n = e.path().filename().string();
    if (n.rfind("deploy-", 0) == 0 && (best.empty() || n < best)) best = n;
  }
  return best;
}

inline Sources load_sources(const std::string & name, std::string deploy_file = "")
{
  auto dir = fixture(name);
  if (deploy_file.empty()) deploy_file = default_deploy(dir);
  return {slurp(dir / "vocab.spec"), slurp(dir / "arch.spec"), slurp(dir / "ui.spec"), slurp(dir / deploy_file)};
}

/// Parses all four sources; diagnostics of every parser plus the analyzer.
inline iotc::Result<iotc::ValidatedProgram> compile(const Sources & s)
{
  iotc::Result<iotc::ValidatedProgram> out;
  auto v = iotc::parse_vocab(s.vocab);
  auto a = iotc::parse_arch(s.arch);
  auto u = iotc::parse_ui(s.ui);
  auto d = iotc::parse_deploy(s.deploy);
  for (const auto * diags : {&v.diagnostics, &a.diagnostics, &u.diagnostics, &d.diagnostics}) {
    out.diagnostics.insert(out.diagnostics.end(), diags->begin(), diags->end());
  }
  if (!v || !a || !u || !d) return out;
  iotc::ProgramModel m{*v, *a, *u, *d};
  auto r = iotc::validate(m);
  out.value = std::move(r.value);
  out.diagnostics.insert(out.diagnostics.end(), r.diagnostics.begin(), r.diagnostics.end());
  return out;
}

inline iotc::ValidatedProgram compile_ok(const Sources & s)
{
  auto r = compile(s);
  if (!r) {
    std::string msg;
    for (const auto & d : r.diagnostics) msg += iotc::to_string(d) + "\n";
    throw std::runtime_error("compile failed:\n" + msg);
  }
  return std::move(*r.value);
}

inline std::filesystem::path temp_dir(const std::string & tag)
{
  auto p = std::filesystem::temp_directory_path() / ("iotc-test-" + tag);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

/// Runs a shell command; returns the exit status, stdout+stderr in `out`.
inline int run_cli_raw(const std::string & command, std::string * out = nullptr)
{
  auto log = std::filesystem::temp_directory_path() / "iotc-test-cli.log";
  std::string cmd = command + " > \"" + log.string() + "\" 2>&1";
  int rc = std::system(cmd.c_str());
  if (out) *out = slurp(log);
  if (rc == -1) return -1;
  return WEXITSTATUS(rc);
}

inline int run_cli(const std::string & args, std::string * out = nullptr)
{
  return run_cli_raw(std::string("\"") + IOTC_BIN + "\" " + args, out);
}

}  // namespace testing
