#include <algorithm>
#include <set>

#include "doctest.h"
#include "iotc/linker.hpp"
#include "iotc/mapper.hpp"
#include "support.hpp"

using namespace iotc;
using testing::compile_ok;
using testing::load_sources;

namespace
{

// services A, B; compute devices D1..D3; sensor and actuator on an Android phone
testing::Sources two_by_three()
{
  return {
    "structs:\n  S\n    v : double;\nresources:\n  sensors:\n    periodicSensors:\n      P\n"
    "        generate m : S;\n        sample period 1 for 10;\n  actuators:\n    Act\n      action Go();\n",
    "computationalServices:\n  Custom:\n    B\n      consume m;\n      command Go() to Act;\n"
    "    A\n      consume m;\n      command Go() to Act;\n",
    "resources:\n  userInteractions:\n",
    "devices:\n  D3\n    location x;\n    platform JavaSE;\n    protocol MQTT;\n"
    "  D1\n    location x;\n    platform NodeJS;\n    protocol MQTT;\n"
    "  P1\n    location x;\n    platform Android;\n    resources P, Act;\n    protocol MQTT;\n"
    "  D2\n    location x;\n    platform JavaSE;\n    protocol MQTT;\n",
  };
}

}  // namespace

TEST_CASE("LCG sequence from seed 0")
{
  // frozen from tests/oracles/lcg_oracle.py
  Lcg g(0);
  CHECK(g.next() == 0x14057b7ef767814fULL);
  CHECK(g.next() == 0x1a08ee1184ba6d32ULL);
  CHECK(g.next() == 0x9af678222e728119ULL);
}

TEST_CASE("2 services on 3 devices match the oracle")
{
  auto vp = compile_ok(two_by_three());
  CHECK(eligible_devices(vp, "A") == std::vector<std::string>{"D1", "D2", "D3"});
  // frozen from tests/oracles/lcg_oracle.py
  const std::map<std::uint64_t, std::map<std::string, std::string>> oracle{
    {0, {{"A", "D2"}, {"B", "D2"}}},
    {1, {{"A", "D2"}, {"B", "D2"}}},
    {2, {{"A", "D1"}, {"B", "D2"}}},
    {42, {{"A", "D1"}, {"B", "D3"}}},
  };
  for (const auto & [seed, expected] : oracle) {
    CAPTURE(seed);
    auto mt = map_services(vp, seed);
    REQUIRE(mt);
    CHECK(mt->assigned == expected);
    CHECK(mt->seed == seed);
  }
  CHECK(map_services(vp, 0)->assigned != map_services(vp, 42)->assigned);
}

TEST_CASE("a single eligible device is forced")
{
  auto src = two_by_three();
  src.vocab = "structs:\n  S\n    v : double;\nresources:\n  sensors:\n    periodicSensors:\n      P\n"
              "        generate m : S;\n        sample period 1 for 10;\n  actuators:\n    Act\n      action Go();\n";
  src.arch = "computationalServices:\n  Custom:\n    A\n      consume m;\n      command Go() to Act;\n";
  src.deploy = "devices:\n  Only\n    location x;\n    platform JavaSE;\n    protocol MQTT;\n"
               "  P1\n    location x;\n    platform Android;\n    resources P, Act;\n    protocol MQTT;\n";
  auto vp = compile_ok(src);
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL, ~0ULL}) CHECK(map_services(vp, seed)->assigned.at("A") == "Only");
}

TEST_CASE("no compute device is NoEligibleDevice")
{
  auto src = two_by_three();
  src.deploy = "devices:\n  P1\n    location x;\n    platform Android;\n    resources P, Act;\n    protocol MQTT;\n";
  auto vp = compile_ok(src);
  auto mt = map_services(vp, 0);
  CHECK_FALSE(mt);
  CHECK(count_code(mt.diagnostics, diag::NoEligibleDevice) == 2);
}

TEST_CASE("pins are respected, random only for the rest")
{
  auto vp = compile_ok(load_sources("smart_home"));
  std::set<std::string> compute;
  for (const auto & d : vp.model().deploy.devices) {
    if (d.platform == "JavaSE" || d.platform == "NodeJS") compute.insert(d.name);
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto mt = map_services(vp, seed);
    REQUIRE(mt);
    CHECK(mt->assigned.size() == vp.model().arch.services.size());
    CHECK(mt->assigned.at("RoomController") == "Desktop-Device-7");
    for (const auto & [svc, dev] : mt->assigned) CHECK(compute.count(dev) == 1);
  }
  auto mt = map_services(vp, 0);
  CHECK(mt->fixed.at("TemperatureSensor") == std::vector<std::string>{"TemperatureMgmt-Device-1"});
  CHECK(mt->program_hash == vp.hash());
}

TEST_CASE("mapping is stable across runs and declaration order")
{
  auto src = two_by_three();
  auto first = map_services(compile_ok(src), 7);
  for (int i = 0; i < 20; ++i) CHECK(map_services(compile_ok(src), 7)->assigned == first->assigned);
  CHECK(format_mapping(*first).find("A -> ") == 0);
}

TEST_CASE("mapping JSON round trip")
{
  auto vp = compile_ok(load_sources("smart_home"));
  auto mt = *map_services(vp, 3);
  auto text = mapping_to_json(mt);
  CHECK(mapping_from_json(text) == mt);
  CHECK(mapping_to_json(mapping_from_json(text)) == text);
  CHECK_THROWS(mapping_from_json("{\"seed\": 1}"));
}

TEST_CASE("frameworks: stubs for Custom services and UI")
{
  auto vp = compile_ok(load_sources("smart_home"));
  auto stubs = generate_frameworks(vp);
  CHECK(stubs.size() == 6);
  CHECK(stubs.count("RoomAvgTemp") == 0);
  const auto & prox = stubs.at("Proximity").operations;
  auto has = [](const std::vector<StubOperation> & ops, const std::string & n, const std::string & a) {
    return std::find(ops.begin(), ops.end(), StubOperation{n, a}) != ops.end();
  };
  CHECK(has(prox, "onConsume", "badgeDetected"));
  CHECK(has(prox, "onResponse", "ProfileDB"));
  CHECK(has(prox, "publish", "proximityMeasurement"));
  const auto & disp = stubs.at("DisplayController").operations;
  CHECK(std::count_if(disp.begin(), disp.end(), [](auto & o) { return o.name == "onConsume"; }) == 3);
  const auto & rc = stubs.at("RoomController").operations;
  CHECK(has(rc, "sendCommand", "Heater.SetTemp"));
  const auto & app = stubs.at("EndUserApp");
  CHECK(app.kind == ComponentKind::UserInteraction);
  CHECK(has(app.operations, "notifyReceived", "fireNotify"));
  CHECK(has(app.operations, "sendCommand", "Heater.Off"));
  auto text = format_stub(stubs.at("Proximity"));
  CHECK(text.rfind("stub Proximity\nkind customService\n", 0) == 0);
}

TEST_CASE("frameworks: only Common services means no stubs")
{
  auto src = load_sources("hvac");
  src.arch = "computationalServices:\n  Common:\n    RoomAvgTemp\n      consume tempMeasurement window 5;\n"
             "      COMPUTE AVG_BY_SAMPLE(tempValue);\n      generate roomAvgTempMeasurement : TempStruct;\n";
  auto r = testing::compile(src);
  REQUIRE(r);
  CHECK(generate_frameworks(*r).empty());
}

TEST_CASE("link: smart home packages")
{
  auto vp = compile_ok(load_sources("smart_home"));
  auto pk = link(vp, *map_services(vp, 0));
  REQUIRE(pk);
  CHECK(pk->size() == 8);
  const auto & dev1 = pk->at(std::size_t(std::find_if(pk->begin(), pk->end(), [](auto & p) {
                                          return p.device == "TemperatureMgmt-Device-1";
                                        }) - pk->begin()));
  auto find = [&](const std::string & n) {
    return std::find_if(dev1.hosted.begin(), dev1.hosted.end(), [&](auto & b) { return b.name == n; });
  };
  REQUIRE(find("TemperatureSensor") != dev1.hosted.end());
  CHECK(find("TemperatureSensor")->publications == std::vector<std::string>{"tempMeasurement"});
  REQUIRE(find("Heater") != dev1.hosted.end());
  std::vector<std::string> actions;
  for (const auto & a : find("Heater")->settings.actions) actions.push_back(a.name);
  CHECK(actions == std::vector<std::string>{"Off", "SetTemp"});
  CHECK(dev1.program_hash == vp.hash());
  CHECK(dev1.manifest_version == 1);
}

TEST_CASE("link: lossless partition and referential closure")
{
  auto vp = compile_ok(load_sources("smart_home"));
  auto pk = *link(vp, *map_services(vp, 5));
  std::multiset<std::string> hosted;
  std::set<std::string> published;
  std::set<std::string> hosts;
  std::size_t pubs = 0;
  for (const auto & p : pk) {
    for (const auto & b : p.hosted) {
      hosted.insert(b.name);
      hosts.insert(b.name);
      for (const auto & m : b.publications) published.insert(m);
      pubs += b.publications.size();
    }
  }
  std::multiset<std::string> components;
  for (const auto & [n, k] : vp.components()) components.insert(n);
  CHECK(hosted == components);
  for (const auto & p : pk) {
    for (const auto & b : p.hosted) {
      for (const auto & s : b.subscriptions) CHECK(published.count(s.measurement) == 1);
      for (const auto & c : b.commands_out) CHECK(hosts.count(c.target) == 1);
    }
  }
  // one publication per producer edge source in the graph
  auto g = dataflow_graph(vp);
  std::set<std::pair<std::string, std::string>> producer_topics;
  for (const auto & [m, t] : vp.topics()) {
    for (const auto & p : t.producers) producer_topics.insert({p, m});
  }
  CHECK(pubs == producer_topics.size());
}

TEST_CASE("link: stale mappings")
{
  auto vp = compile_ok(load_sources("smart_home"));
  auto mt = *map_services(vp, 0);
  SUBCASE("hash")
  {
    mt.program_hash = "0000000000000000";
    auto r = link(vp, mt);
    CHECK_FALSE(r);
    CHECK(count_code(r.diagnostics, diag::StaleMapping) >= 1);
  }
  SUBCASE("missing service")
  {
    mt.assigned.erase("Proximity");
    CHECK(count_code(link(vp, mt).diagnostics, diag::StaleMapping) == 1);
  }
  SUBCASE("unknown device")
  {
    mt.assigned["Proximity"] = "Nowhere";
    CHECK_FALSE(link(vp, mt));
  }
}

TEST_CASE("link: empty device gets a warning, no package")
{
  auto vp = compile_ok(load_sources("hvac"));
  auto mt = *map_services(vp, 0);
  mt.assigned["RoomAvgTemp"] = "TemperatureMgmt-Device-1";
  mt.assigned["RoomController"] = "TemperatureMgmt-Device-1";
  auto r = link(vp, mt);
  REQUIRE(r);
  CHECK(r->size() == 1);
  CHECK(count_code(r.diagnostics, diag::EmptyDevice) == 1);
}

TEST_CASE("manifest JSON round trip")
{
  for (const char * name : {"smart_home", "hvac", "personalized_hvac", "fire_management"}) {
    CAPTURE(name);
    auto vp = compile_ok(load_sources(name));
    auto pk = link(vp, *map_services(vp, 0));
    REQUIRE(pk);
    for (const auto & p : *pk) {
      auto text = package_to_json(p);
      CHECK(package_from_json(text) == p);
      CHECK(package_to_json(package_from_json(text)) == text);
    }
  }
  CHECK_THROWS(package_from_json("[]"));
}
