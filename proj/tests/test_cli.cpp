#include "doctest.h"
#include "support.hpp"

namespace fs = std::filesystem;
using testing::run_cli;

namespace
{

fs::path copy_fixture(const std::string & name)
{
  auto dir = testing::temp_dir("cli-" + name);
  fs::copy(testing::fixture(name), dir, fs::copy_options::recursive);
  fs::remove_all(dir / "build");
  return dir;
}

std::string q(const fs::path & p) { return "\"" + p.string() + "\""; }

std::map<std::string, std::string> read_tree(const fs::path & dir)
{
  std::map<std::string, std::string> out;
  for (const auto & e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = testing::slurp(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("check: clean, dangling and missing")
{
  auto dir = copy_fixture("smart_home");
  std::string out;
  CHECK(run_cli("check " + q(dir), &out) == 0);
  testing::Sources s = testing::load_sources("smart_home");
  iotc::write_file(dir / "arch.spec", testing::replace_once(s.arch, "consume smokeMeasurement;", "consume windMeasurement;"));
  CHECK(run_cli("check " + q(dir), &out) == 1);
  CHECK(out.find("arch.spec:18:15: error:") != std::string::npos);
  CHECK(out.find("[UnresolvedMeasurement]") != std::string::npos);
  fs::remove(dir / "deploy.spec");
  CHECK(run_cli("check " + q(dir), &out) == 2);
}

TEST_CASE("usage errors exit 2")
{
  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("check") == 2);
  CHECK(run_cli("check /nonexistent/dir") == 2);
}

TEST_CASE("quiet hides warnings")
{
  auto dir = copy_fixture("hvac");
  std::string loud, quiet;
  auto s = testing::load_sources("hvac");
  iotc::write_file(dir / "deploy.spec", testing::replace_once(s.deploy, "    platform JavaSE;\n", "    platform JavaSE;\n    database MySQL;\n"));
  CHECK(run_cli("check " + q(dir), &loud) == 0);
  CHECK(loud.find("UnusedDatabase") != std::string::npos);
  CHECK(run_cli("-q check " + q(dir), &quiet) == 0);
  CHECK(quiet.find("UnusedDatabase") == std::string::npos);
}

TEST_CASE("graph and map output")
{
  std::string out;
  REQUIRE(run_cli("graph " + q(testing::fixture("hvac")), &out) == 0);
  CHECK(out.rfind("digraph dataflow {", 0) == 0);
  REQUIRE(run_cli("map " + q(testing::fixture("smart_home")) + " --seed 0", &out) == 0);
  CHECK(out ==
        "DisplayController -> Laptop-Device-8\n"
        "FireController -> FireMgmt-Device-4\n"
        "Proximity -> TemperatureMgmt-Device-1\n"
        "RoomAvgTemp -> TemperatureMgmt-Device-1\n"
        "RoomController -> Desktop-Device-7\n");
  std::string env;
  REQUIRE(run_cli("map " + q(testing::fixture("smart_home")) + " --seed 3", &out) == 0);
  setenv("IOTC_SEED", "3", 1);
  REQUIRE(run_cli("map " + q(testing::fixture("smart_home")) + " --seed 0", &env) == 0);
  unsetenv("IOTC_SEED");
  CHECK(env == out);
}

TEST_CASE("build writes one manifest per hosting device, reproducibly")
{
  auto dir = copy_fixture("smart_home");
  REQUIRE(run_cli("build " + q(dir)) == 0);
  auto first = read_tree(dir / "build");
  std::size_t manifests = 0;
  for (const auto & [k, v] : first) manifests += k.find("manifest.json") != std::string::npos;
  CHECK(manifests == 8);
  CHECK(first.count("mapping.json") == 1);
  CHECK(first.count("stubs/Proximity.stub") == 1);
  REQUIRE(run_cli("build " + q(dir)) == 0);
  CHECK(read_tree(dir / "build") == first);
}

TEST_CASE("build refuses to clear a directory that is not a build")
{
  auto dir = copy_fixture("hvac");
  auto other = testing::temp_dir("not-a-build");
  iotc::write_file(other / "precious.txt", "keep");
  CHECK(run_cli("build " + q(dir) + " --out " + q(other)) == 2);
  CHECK(fs::exists(other / "precious.txt"));
}

TEST_CASE("map then link equals build; stale mapping fails")
{
  auto dir = copy_fixture("smart_home");
  auto mapping = dir / "m.json";
  REQUIRE(run_cli("map " + q(dir) + " --seed 4 --out " + q(mapping)) == 0);
  REQUIRE(run_cli("link " + q(dir) + " --mapping " + q(mapping) + " --out " + q(dir / "linked")) == 0);
  REQUIRE(run_cli("build " + q(dir) + " --seed 4 --out " + q(dir / "built")) == 0);
  CHECK(read_tree(dir / "linked") == read_tree(dir / "built"));
  auto s = testing::load_sources("smart_home");
  iotc::write_file(dir / "arch.spec", testing::replace_once(s.arch, "window 5;", "window 4;"));
  std::string out;
  CHECK(run_cli("link " + q(dir) + " --mapping " + q(mapping) + " --out " + q(dir / "linked"), &out) == 1);
  CHECK(out.find("StaleMapping") != std::string::npos);
}

TEST_CASE("run: HVAC, horizon 0, missing stub")
{
  auto dir = copy_fixture("hvac");
  REQUIRE(run_cli("build " + q(dir)) == 0);
  const std::string common = " --traces " + q(dir / "traces") + " --feedback " + q(dir / "feedback.json");
  std::string out;
  REQUIRE(run_cli("run " + q(dir / "build") + common + " --logic " + q(dir / "logic.json") + " --horizon 600", &out) == 0);
  CHECK(out.find("Command RoomController Heater:SetTemp") != std::string::npos);
  REQUIRE(run_cli("run " + q(dir / "build") + common + " --logic " + q(dir / "logic.json") + " --horizon 0", &out) == 0);
  CHECK(out.empty());
  CHECK(run_cli("run " + q(dir / "build") + common + " --horizon 10", &out) == 1);
  CHECK(out.find("MissingLogic") != std::string::npos);
}

TEST_CASE("run: json log and trace file")
{
  auto dir = copy_fixture("hvac");
  REQUIRE(run_cli("build " + q(dir)) == 0);
  REQUIRE(run_cli("run " + q(dir / "build") + " --traces " + q(dir / "traces") + " --logic " + q(dir / "logic.json") +
                  " --horizon 30 --out " + q(dir / "trace.txt") + " --log-json " + q(dir / "trace.json")) == 0);
  auto txt = testing::slurp(dir / "trace.txt");
  auto json = testing::slurp(dir / "trace.json");
  CHECK(txt.find("1000 Publish TemperatureSensor tempMeasurement") == 0);
  CHECK(json.find("\"messages\"") != std::string::npos);
}

TEST_CASE("fmt rewrites to canonical form")
{
  auto dir = copy_fixture("hvac");
  auto s = testing::load_sources("hvac");
  iotc::write_file(dir / "arch.spec", "computationalServices:\n    Common:\n  RoomAvgTemp\n consume   tempMeasurement window 5;\n" +
                                          s.arch.substr(s.arch.find("      COMPUTE")));
  CHECK(run_cli("fmt --check " + q(dir)) == 1);
  CHECK(run_cli("fmt " + q(dir)) == 0);
  CHECK(run_cli("fmt --check " + q(dir)) == 0);
  auto again = testing::slurp(dir / "arch.spec");
  CHECK(run_cli("fmt " + q(dir)) == 0);
  CHECK(testing::slurp(dir / "arch.spec") == again);
  CHECK(run_cli("check " + q(dir)) == 0);
}
