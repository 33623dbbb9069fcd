#include <algorithm>
#include <cmath>
#include <thread>

#include "doctest.h"
#include "iotc/sim.hpp"
#include "support.hpp"

using namespace iotc;
using testing::compile_ok;
using testing::load_sources;
using testing::replace_once;

namespace
{

struct Setup
{
  std::optional<ValidatedProgram> vp;
  StubRegistry registry;
  SimInputs in;

  void trace(const std::string & sensor, const std::string & csv)
  {
    const auto * gen = vp->generated_by(sensor);
    REQUIRE(gen != nullptr);
    in.traces[sensor] = parse_trace_csv(sensor, csv, *vp->find_struct(gen->struct_name));
  }
};

Setup setup(const testing::Sources & src, const std::string & logic_json = "{\"components\": {}}")
{
  Setup s;
  s.vp = compile_ok(src);
  auto pk = link(*s.vp, *map_services(*s.vp, 0));
  REQUIRE(pk);
  s.in.packages = *pk;
  s.registry = registry_from_config(logic_json);
  s.in.stubs = &s.registry;
  return s;
}

std::size_t count(const SimTrace & t, MessageKind k, const std::string & topic)
{
  return std::size_t(std::count_if(t.messages.begin(), t.messages.end(),
                                   [&](const SimMessage & m) { return m.kind == k && m.topic == topic; }));
}

// a single sensor on one device, no services
testing::Sources lone_periodic(int period, int duration)
{
  return {"structs:\n  TempStruct\n    tempValue : double;\nresources:\n  sensors:\n    periodicSensors:\n"
          "      TemperatureSensor\n        generate tempMeasurement : TempStruct;\n        sample period " +
            std::to_string(period) + " for " + std::to_string(duration) + ";\n",
          "computationalServices:\n", "resources:\n  userInteractions:\n",
          "devices:\n  D\n    location x;\n    platform NodeJS;\n    resources TemperatureSensor;\n    protocol MQTT;\n"};
}

testing::Sources lone_smoke()
{
  return {"structs:\n  SmokeStruct\n    smokeValue : double;\nresources:\n  sensors:\n    eventDrivenSensors:\n"
          "      SmokeDetector\n        generate smokeMeasurement : SmokeStruct;\n        onCondition smokeValue > 650;\n",
          "computationalServices:\n", "resources:\n  userInteractions:\n",
          "devices:\n  D\n    location x;\n    platform NodeJS;\n    resources SmokeDetector;\n    protocol MQTT;\n"};
}

std::string hvac_logic() { return testing::slurp(testing::fixture("hvac") / "logic.json"); }

}  // namespace

TEST_CASE("compute_common operators")
{
  StructDecl s{"TempStruct", {{"tempValue", PrimitiveType::Double}, {"unit", PrimitiveType::String}}};
  std::vector<Record> w;
  for (double v : {30.0, 32.0, 34.0, 28.0, 26.0}) w.push_back(Record{{{"tempValue", v}, {"unit", std::string("C")}}});
  auto avg = compute_common(ComputeOp::AvgBySample, w, "tempValue");
  CHECK(std::get<double>(*avg.get("tempValue")) == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(std::get<std::string>(*avg.get("unit")) == "C");
  CHECK(*as_number(*compute_common(ComputeOp::CountBySample, w, "tempValue").get("tempValue")) == 5.0);
  CHECK(*as_number(*compute_common(ComputeOp::SumBySample, w, "tempValue").get("tempValue")) == 150.0);
  CHECK(*as_number(*compute_common(ComputeOp::MaxBySample, w, "tempValue").get("tempValue")) == 34.0);
  CHECK(*as_number(*compute_common(ComputeOp::MinBySample, w, "tempValue").get("tempValue")) == 26.0);
  try {
    compute_common(ComputeOp::AvgBySample, w, "unit");
    FAIL("expected NonNumericField");
  } catch (const SimError & e) {
    CHECK(e.code() == sim_error::NonNumericField);
  }
}

TEST_CASE("periodic sensor samples every d seconds")
{
  for (auto [d, expected] : {std::pair{1, 10}, std::pair{2, 5}, std::pair{3, 3}}) {
    CAPTURE(d);
    auto s = setup(lone_periodic(d, 360));
    s.trace("TemperatureSensor", "t_ms,tempValue\n0,20\n");
    s.in.horizon_ms = 10000;
    auto t = run(s.in);
    REQUIRE(count(t, MessageKind::Publish, "tempMeasurement") == std::size_t(expected));
    for (std::size_t k = 0; k < t.messages.size(); ++k) CHECK(t.messages[k].t_ms == std::int64_t(d * 1000 * (k + 1)));
    CHECK(t.warnings.size() == std::size_t(expected));  // nobody listens
  }
}

TEST_CASE("periodic sensor stops after k seconds")
{
  auto s = setup(lone_periodic(1, 4));
  s.trace("TemperatureSensor", "t_ms,tempValue\n0,20\n");
  s.in.horizon_ms = 10000;
  CHECK(count(run(s.in), MessageKind::Publish, "tempMeasurement") == 4);
}

TEST_CASE("event-driven sensor fires on the condition")
{
  SUBCASE("600, 700")
  {
    auto s = setup(lone_smoke());
    s.trace("SmokeDetector", "t_ms,smokeValue\n1000,600\n2000,700\n");
    s.in.horizon_ms = 5000;
    auto t = run(s.in);
    REQUIRE(count(t, MessageKind::Publish, "smokeMeasurement") == 1);
    CHECK(t.messages[0].t_ms == 2000);
  }
  SUBCASE("600, 700, 640, 651")
  {
    auto s = setup(lone_smoke());
    s.trace("SmokeDetector", "t_ms,smokeValue\n1000,600\n2000,700\n3000,640\n4000,651\n");
    s.in.horizon_ms = 5000;
    CHECK(count(run(s.in), MessageKind::Publish, "smokeMeasurement") == 2);
  }
}

TEST_CASE("tumbling window: 12 inputs, window 5, 2 outputs")
{
  auto s = setup(load_sources("hvac"), hvac_logic());
  std::string csv = "t_ms,tempValue,unitOfMeasurement\n";
  const std::vector<double> values{31, 27.5, 33, 29.25, 30.1, 26, 34.5, 28, 32.75, 35, 27, 30};
  for (std::size_t i = 0; i < values.size(); ++i) csv += std::to_string((i + 1) * 1000) + "," + std::to_string(values[i]) + ",C\n";
  s.trace("TemperatureSensor", csv);
  s.in.horizon_ms = 12000;
  auto t = run(s.in);
  CHECK(count(t, MessageKind::Publish, "tempMeasurement") == 12);
  std::vector<double> outs;
  for (const auto & m : t.messages) {
    if (m.kind == MessageKind::Publish && m.topic == "roomAvgTempMeasurement") outs.push_back(*as_number(*m.payload->get("tempValue")));
  }
  REQUIRE(outs.size() == 2);
  CHECK(std::abs(outs[0] - (31 + 27.5 + 33 + 29.25 + 30.1) / 5) < 1e-9);
  CHECK(std::abs(outs[1] - (26 + 34.5 + 28 + 32.75 + 35) / 5) < 1e-9);
}

TEST_CASE("window law over many lengths")
{
  for (int n : {0, 4, 5, 9, 10, 23}) {
    CAPTURE(n);
    auto s = setup(load_sources("hvac"), hvac_logic());
    s.trace("TemperatureSensor", "t_ms,tempValue,unitOfMeasurement\n0,30,C\n");
    s.in.horizon_ms = n * 1000;
    auto t = run(s.in);
    CHECK(count(t, MessageKind::Publish, "roomAvgTempMeasurement") == std::size_t(n / 5));
  }
}

TEST_CASE("commands carry their arguments")
{
  auto s = setup(load_sources("hvac"), hvac_logic());
  s.trace("TemperatureSensor", "t_ms,tempValue,unitOfMeasurement\n0,20,C\n");
  s.in.horizon_ms = 5000;
  auto t = run(s.in);
  REQUIRE(count(t, MessageKind::Command, "SetTemp") == 1);
  auto it = std::find_if(t.messages.begin(), t.messages.end(), [](auto & m) { return m.kind == MessageKind::Command; });
  CHECK(it->receiver == "Heater");
  CHECK(it->args == std::vector<Value>{30.0});
  CHECK(it->t_ms == 5000);
  CHECK(format_message(*it) == "5000 Command RoomController Heater:SetTemp {\"settemp\":30.0}");
}

TEST_CASE("request is answered 1 ms later from the storage")
{
  auto src = load_sources("personalized_hvac");
  auto s = setup(src, testing::slurp(testing::fixture("personalized_hvac") / "logic.json"));
  s.in.storage = parse_storage_seed(testing::slurp(testing::fixture("personalized_hvac") / "storage.json"), s.in.packages);
  s.trace("BadgeReader", "t_ms,badgeID,timeStamp\n3000,u1,3\n");
  s.in.horizon_ms = 5000;
  auto t = run(s.in);
  REQUIRE(count(t, MessageKind::Request, "badgeID") == 1);
  REQUIRE(std::count_if(t.messages.begin(), t.messages.end(), [](auto & m) { return m.kind == MessageKind::Response; }) == 1);
  auto req = std::find_if(t.messages.begin(), t.messages.end(), [](auto & m) { return m.kind == MessageKind::Request; });
  auto resp = std::find_if(t.messages.begin(), t.messages.end(), [](auto & m) { return m.kind == MessageKind::Response; });
  CHECK(resp->t_ms == req->t_ms + 1);
  REQUIRE(resp->payload);
  CHECK(*as_number(*resp->payload->get("preferredTemp")) == 24.0);
}

TEST_CASE("request for an unknown key gets an empty response")
{
  auto s = setup(load_sources("personalized_hvac"), testing::slurp(testing::fixture("personalized_hvac") / "logic.json"));
  s.trace("BadgeReader", "t_ms,badgeID,timeStamp\n3000,nobody,3\n");
  s.in.horizon_ms = 5000;
  auto t = run(s.in);
  auto resp = std::find_if(t.messages.begin(), t.messages.end(), [](auto & m) { return m.kind == MessageKind::Response; });
  REQUIRE(resp != t.messages.end());
  CHECK_FALSE(resp->payload);
  CHECK(count(t, MessageKind::Command, "SetTemp") == 0);
}

TEST_CASE("fire notify reaches the app with a FireStateStruct")
{
  auto dir = testing::fixture("fire_management");
  auto s = setup(load_sources("fire_management"), testing::slurp(dir / "logic.json"));
  s.trace("SmokeDetector", testing::slurp(dir / "traces" / "SmokeDetector.csv"));
  s.trace("TemperatureSensor", testing::slurp(dir / "traces" / "TemperatureSensor.csv"));
  s.in.horizon_ms = 3000;
  auto t = run(s.in);
  auto n = std::find_if(t.messages.begin(), t.messages.end(), [](auto & m) { return m.kind == MessageKind::Notify; });
  REQUIRE(n != t.messages.end());
  CHECK(n->receiver == "EndUserApp");
  CHECK(conform(*n->payload, *s.vp->find_struct("FireStateStruct")) == *n->payload);
  bool activated = std::any_of(t.activations.begin(), t.activations.end(), [](auto & a) {
    return a.instance == "EndUserApp" && a.kind == MessageKind::Notify && a.topic == "fireNotify";
  });
  CHECK(activated);
}

TEST_CASE("conservation and type safety on the smart home")
{
  ProjectConfig cfg;
  cfg.dir = testing::fixture("smart_home");
  auto b = build_project(cfg);
  REQUIRE(b);
  SimFiles files;
  files.traces_dir = cfg.dir / "traces";
  files.logic = cfg.dir / "logic.json";
  files.storage = cfg.dir / "storage.json";
  files.feedback = cfg.dir / "feedback.json";
  auto registry = load_registry(files);
  auto in = load_sim_inputs(b->packages, files);
  in.stubs = &registry;
  in.horizon_ms = 120000;
  auto t = run(in);
  auto vp = compile_ok(load_sources("smart_home"));
  for (const auto & [topic, entry] : vp.topics()) {
    CAPTURE(topic);
    std::size_t pubs = count(t, MessageKind::Publish, topic);
    std::size_t acts = std::size_t(std::count_if(t.activations.begin(), t.activations.end(), [&](auto & a) {
      return a.kind == MessageKind::Publish && a.topic == topic;
    }));
    CHECK(pubs * entry.consumers.size() == acts);
  }
  std::map<std::string, std::string> meas;
  for (const auto & p : b->packages) meas.insert(p.measurements.begin(), p.measurements.end());
  for (const auto & m : t.messages) {
    if (!m.payload || m.kind == MessageKind::Command || m.kind == MessageKind::Request) continue;
    const auto * st = vp.find_struct(meas.at(m.topic));
    REQUIRE(st != nullptr);
    CHECK(conform(*m.payload, *st) == *m.payload);
  }
  CHECK(count(t, MessageKind::Command, "On") >= 1);
}

TEST_CASE("runs are deterministic and independent")
{
  auto s = setup(load_sources("hvac"), hvac_logic());
  s.trace("TemperatureSensor", testing::slurp(testing::fixture("hvac") / "traces" / "TemperatureSensor.csv"));
  s.in.feedback = {reference_hvac_feedback()};
  s.in.horizon_ms = 600000;
  const auto ref = format_trace(run(s.in));
  CHECK(format_trace(run(s.in)) == ref);
  std::vector<std::string> outs(4);
  std::vector<std::thread> pool;
  for (auto & o : outs) pool.emplace_back([&s, &o] { o = format_trace(run(s.in)); });
  for (auto & th : pool) th.join();
  for (const auto & o : outs) CHECK(o == ref);
}

TEST_CASE("generators stand in for traces")
{
  auto s = setup(lone_periodic(1, 360));
  s.in.generators = parse_generators(R"({"TemperatureSensor": {"fields": {"tempValue": {"min": 18, "max": 22}}}})");
  s.in.horizon_ms = 20000;
  s.in.seed = 9;
  auto a = run(s.in);
  CHECK(a.messages.size() == 20);
  for (const auto & m : a.messages) {
    double v = *as_number(*m.payload->get("tempValue"));
    CHECK(v >= 18);
    CHECK(v <= 22);
  }
  CHECK(run(s.in) == a);
  s.in.seed = 10;
  CHECK_FALSE(run(s.in) == a);
}

TEST_CASE("horizon 0 is an empty trace")
{
  auto s = setup(lone_periodic(1, 360));
  s.trace("TemperatureSensor", "t_ms,tempValue\n0,20\n");
  s.in.horizon_ms = 0;
  CHECK(run(s.in).messages.empty());
}

TEST_CASE("simulation errors")
{
  auto expect = [](const SimInputs & in, const char * code) {
    try {
      run(in);
      FAIL("expected " << code);
    } catch (const SimError & e) {
      CHECK(e.code() == code);
    }
  };
  SUBCASE("missing logic")
  {
    auto s = setup(load_sources("hvac"));
    s.trace("TemperatureSensor", "t_ms,tempValue,unitOfMeasurement\n0,20,C\n");
    s.in.horizon_ms = 1000;
    expect(s.in, sim_error::MissingLogic);
  }
  SUBCASE("missing trace")
  {
    auto s = setup(load_sources("hvac"), hvac_logic());
    s.in.horizon_ms = 1000;
    expect(s.in, sim_error::MissingTrace);
  }
  SUBCASE("payload not matching the struct")
  {
    auto s = setup(load_sources("personalized_hvac"),
                   R"({"components": {
                         "Proximity": {"rules": [{"on": "consume", "measurement": "badgeDetected",
                            "do": [{"publish": "proximityMeasurement", "payload": {"badgeID": "$badgeID", "bogus": 1}}]}]},
                         "TempController": {"builtin": "recorder"}}})");
    s.trace("BadgeReader", "t_ms,badgeID,timeStamp\n3000,u1,3\n");
    s.in.horizon_ms = 5000;
    expect(s.in, sim_error::PayloadTypeError);
  }
  SUBCASE("undeclared route")
  {
    auto s = setup(load_sources("personalized_hvac"),
                   R"({"components": {
                         "Proximity": {"rules": [{"on": "consume", "measurement": "badgeDetected",
                            "do": [{"command": "Heater", "action": "Off", "args": []}]}]},
                         "TempController": {"builtin": "recorder"}}})");
    s.trace("BadgeReader", "t_ms,badgeID,timeStamp\n3000,u1,3\n");
    s.in.horizon_ms = 5000;
    expect(s.in, sim_error::UndeclaredRoute);
  }
}

TEST_CASE("trace CSV validation")
{
  StructDecl st{"TempStruct", {{"tempValue", PrimitiveType::Double}}};
  CHECK(parse_trace_csv("T", "t_ms,tempValue\n0,1\n5,2\n", st).samples.size() == 2);
  for (const char * bad : {"tempValue\n1\n", "t_ms,other\n0,1\n", "t_ms,tempValue\n5,1\n5,2\n", "t_ms,tempValue\n0,abc\n"}) {
    CAPTURE(bad);
    try {
      parse_trace_csv("T", bad, st);
      FAIL("accepted");
    } catch (const SimError & e) {
      CHECK(e.code() == sim_error::InvalidTrace);
    }
  }
}

TEST_CASE("feedback rates are bounded")
{
  auto s = setup(load_sources("hvac"), hvac_logic());
  s.trace("TemperatureSensor", "t_ms,tempValue,unitOfMeasurement\n0,20,C\n");
  s.in.feedback = parse_feedback(R"({"feedback": [{"sensor": "TemperatureSensor", "field": "tempValue", "maxRate": 1,
                                     "responses": [{"actuator": "Heater", "action": "Off", "rate": 5}]}]})");
  s.in.horizon_ms = 1000;
  try {
    run(s.in);
    FAIL("accepted");
  } catch (const SimError & e) {
    CHECK(e.code() == sim_error::InvalidFeedback);
  }
  auto fb = parse_feedback(testing::slurp(testing::fixture("hvac") / "feedback.json"));
  REQUIRE(fb.size() == 1);
  CHECK(fb[0].responses.size() == 2);
}
