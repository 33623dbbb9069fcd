#include "iotc/linker.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace iotc
{

using nlohmann::ordered_json;

namespace
{

void push_op(StubDescriptor & s, const char * name, std::string arg)
{
  StubOperation op{name, std::move(arg)};
  if (std::find(s.operations.begin(), s.operations.end(), op) == s.operations.end()) {
    s.operations.push_back(std::move(op));
  }
}

}  // namespace

StubSet generate_frameworks(const ValidatedProgram & vp)
{
  StubSet out;
  for (const auto & d : vp.model().arch.services) {
    if (d.kind != ServiceKind::Custom) continue;
    StubDescriptor s{d.name, ComponentKind::CustomService, {}};
    for (const auto & c : d.consumes) push_op(s, "onConsume", c.measurement);
    for (const auto & r : d.requests) push_op(s, "onResponse", r.target);
    if (d.generates) push_op(s, "publish", d.generates->measurement);
    for (const auto & c : d.commands) push_op(s, "sendCommand", c.target + "." + c.action);
    for (const auto & r : d.requests) push_op(s, "sendRequest", r.target);
    out.emplace(d.name, std::move(s));
  }
  for (const auto & d : vp.model().ui.interactions) {
    StubDescriptor s{d.name, ComponentKind::UserInteraction, {}};
    for (const auto & n : d.notifies) push_op(s, "notifyReceived", n.measurement);
    for (const auto & r : d.requests) push_op(s, "onResponse", r.target);
    for (const auto & c : d.commands) push_op(s, "sendCommand", c.target + "." + c.action);
    for (const auto & r : d.requests) push_op(s, "sendRequest", r.target);
    out.emplace(d.name, std::move(s));
  }
  return out;
}

std::string format_stub(const StubDescriptor & stub)
{
  std::string out = "stub " + stub.id + "\nkind " + std::string(to_string(stub.kind)) + "\n";
  for (const auto & op : stub.operations) out += op.name + "(" + op.argument + ")\n";
  return out;
}

ComponentBinding make_binding(const ValidatedProgram & vp, const std::string & component)
{
  ComponentBinding b;
  b.name = component;
  b.kind = vp.kind_of(component).value();
  auto & st = b.settings;
  auto request_route = [&](const RequestDecl & r) {
    RequestRoute route{r.target, r.param, {}};
    if (const auto * m = vp.generated_by(r.target)) route.response = *m;
    return route;
  };
  auto command_route = [](const CommandDecl & c) { return CommandRoute{c.target, c.action, c.args}; };

  if (const auto * d = vp.find_periodic(component)) {
    b.publications.push_back(d->generates.measurement);
    st.sample_period_s = d->sample_period_s;
    st.duration_s = d->duration_s;
  } else if (const auto * d = vp.find_event(component)) {
    b.publications.push_back(d->generates.measurement);
    st.condition = d->condition;
  } else if (const auto * d = vp.find_tag(component)) {
    b.publications.push_back(d->generates.measurement);
  } else if (const auto * d = vp.find_request_sensor(component)) {
    b.serves = d->generates;
    st.access_param = d->access_param;
  } else if (const auto * d = vp.find_storage(component)) {
    b.serves = d->generates;
    st.access_param = d->accessed_by;
    st.actions.push_back(d->insert_action);
  } else if (const auto * d = vp.find_actuator(component)) {
    st.actions = d->actions;
  } else if (const auto * d = vp.find_service(component)) {
    for (const auto & c : d->consumes) b.subscriptions.push_back({c.measurement, c.window});
    if (d->generates) b.publications.push_back(d->generates->measurement);
    for (const auto & c : d->commands) b.commands_out.push_back(command_route(c));
    for (const auto & r : d->requests) b.request_routes.push_back(request_route(r));
    if (d->kind == ServiceKind::Custom) {
      b.logic_stub = d->name;
    } else {
      st.compute_op = d->compute_op;
      st.compute_field = vp.compute_field(*d);
    }
  } else if (const auto * d = vp.find_interaction(component)) {
    for (const auto & n : d->notifies) b.notifications.push_back(n.measurement);
    for (const auto & c : d->commands) b.commands_out.push_back(command_route(c));
    for (const auto & r : d->requests) b.request_routes.push_back(request_route(r));
    b.logic_stub = d->name;
  }
  return b;
}

Result<std::vector<DevicePackage>> link(const ValidatedProgram & vp, const MappingTable & mt)
{
  Result<std::vector<DevicePackage>> result;
  auto stale = [&](std::string message) {
    SourceSpan span;
    span.file = "mapping.json";
    result.diagnostics.push_back({Severity::Error, diag::StaleMapping, std::move(message), span});
  };
  if (mt.program_hash != vp.hash()) {
    stale("mapping was built for program " + mt.program_hash + ", current program is " + vp.hash() +
          "; re-run map");
    return result;
  }
  std::map<std::string, std::vector<std::string>> hosted;  // device -> components
  for (const auto & [name, kind] : vp.components()) {
    if (is_service(kind)) {
      auto it = mt.assigned.find(name);
      if (it == mt.assigned.end()) {
        stale("mapping does not assign service '" + name + "'");
        continue;
      }
      if (vp.find_device(it->second) == nullptr) {
        stale("mapping assigns '" + name + "' to unknown device '" + it->second + "'");
        continue;
      }
      hosted[it->second].push_back(name);
    } else {
      for (const auto & dev : vp.placements().at(name)) hosted[dev].push_back(name);
    }
  }
  if (has_errors(result.diagnostics)) return result;

  std::vector<DevicePackage> packages;
  for (const auto & dev : vp.model().deploy.devices) {
    auto it = hosted.find(dev.name);
    if (it == hosted.end()) {
      result.diagnostics.push_back({Severity::Warning, diag::EmptyDevice,
                                    "device '" + dev.name + "' hosts nothing; no package emitted",
                                    vp.model().span_of(span_key::decl("device", dev.name), "deploy.spec")});
      continue;
    }
    DevicePackage p;
    p.program_hash = vp.hash();
    p.device = dev.name;
    p.location = dev.location;
    p.platform = dev.platform;
    p.protocol = dev.protocol;
    p.database = dev.database;
    auto names = it->second;
    std::sort(names.begin(), names.end());
    for (const auto & n : names) p.hosted.push_back(make_binding(vp, n));

    auto note = [&](const std::string & measurement, const std::string & struct_name) {
      p.measurements.emplace(measurement, struct_name);
    };
    auto topic_struct = [&](const std::string & m) { return vp.topics().at(m).struct_name; };
    for (const auto & b : p.hosted) {
      for (const auto & s : b.subscriptions) note(s.measurement, topic_struct(s.measurement));
      for (const auto & m : b.notifications) note(m, topic_struct(m));
      for (const auto & m : b.publications) note(m, topic_struct(m));
      for (const auto & r : b.request_routes) note(r.response.measurement, r.response.struct_name);
      if (b.serves) note(b.serves->measurement, b.serves->struct_name);
    }
    std::set<std::string> struct_names;
    for (const auto & [_, s] : p.measurements) struct_names.insert(s);
    for (const auto & s : struct_names) {
      if (const auto * decl = vp.find_struct(s)) p.structs.push_back(*decl);
    }
    packages.push_back(std::move(p));
  }
  std::sort(packages.begin(), packages.end(),
            [](const DevicePackage & a, const DevicePackage & b) { return a.device < b.device; });
  sort_diagnostics(result.diagnostics);
  result.value = std::move(packages);
  return result;
}

// Manifest JSON. Optional members are omitted when absent; lists are always
// present.

namespace
{

ordered_json param_json(const Param & p)
{
  return ordered_json{{"name", p.name}, {"type", std::string(to_string(p.type))}};
}

Param param_from(const nlohmann::json & j)
{
  Param p;
  p.name = j.at("name").get<std::string>();
  auto t = parse_primitive(j.at("type").get<std::string>());
  if (!t) throw std::runtime_error("unknown type " + j.at("type").dump());
  p.type = *t;
  return p;
}

ordered_json measurement_json(const MeasurementRef & m)
{
  return ordered_json{{"measurement", m.measurement}, {"struct", m.struct_name}};
}

MeasurementRef measurement_from(const nlohmann::json & j)
{
  return {j.at("measurement").get<std::string>(), j.at("struct").get<std::string>()};
}

ordered_json action_json(const ActionDecl & a)
{
  ordered_json params = ordered_json::array();
  for (const auto & p : a.params) params.push_back(param_json(p));
  return ordered_json{{"name", a.name}, {"params", params}};
}

ActionDecl action_from(const nlohmann::json & j)
{
  ActionDecl a;
  a.name = j.at("name").get<std::string>();
  for (const auto & p : j.at("params")) a.params.push_back(param_from(p));
  return a;
}

ordered_json binding_json(const ComponentBinding & b)
{
  ordered_json j;
  j["name"] = b.name;
  j["kind"] = std::string(to_string(b.kind));
  ordered_json subs = ordered_json::array();
  for (const auto & s : b.subscriptions) subs.push_back({{"measurement", s.measurement}, {"window", s.window}});
  j["subscriptions"] = subs;
  j["notifications"] = b.notifications;
  j["publications"] = b.publications;
  ordered_json cmds = ordered_json::array();
  for (const auto & c : b.commands_out) {
    cmds.push_back({{"target", c.target}, {"action", c.action}, {"args", c.args}});
  }
  j["commandsOut"] = cmds;
  ordered_json reqs = ordered_json::array();
  for (const auto & r : b.request_routes) {
    reqs.push_back({{"target", r.target}, {"param", param_json(r.param)}, {"response", measurement_json(r.response)}});
  }
  j["requestRoutes"] = reqs;
  if (b.logic_stub) j["logicStub"] = *b.logic_stub;
  if (b.serves) j["serves"] = measurement_json(*b.serves);

  const auto & s = b.settings;
  ordered_json settings = ordered_json::object();
  if (s.sample_period_s) settings["samplePeriodSeconds"] = *s.sample_period_s;
  if (s.duration_s) settings["durationSeconds"] = *s.duration_s;
  if (s.condition) {
    settings["condition"] = {{"field", s.condition->field},
                             {"op", std::string(to_string(s.condition->op))},
                             {"literal", s.condition->literal}};
  }
  if (s.access_param) settings["accessParam"] = param_json(*s.access_param);
  if (!s.actions.empty()) {
    ordered_json actions = ordered_json::array();
    for (const auto & a : s.actions) actions.push_back(action_json(a));
    settings["actions"] = actions;
  }
  if (s.compute_op) settings["computeOp"] = std::string(to_string(*s.compute_op));
  if (s.compute_field) settings["computeField"] = *s.compute_field;
  j["settings"] = settings;
  return j;
}

ComponentBinding binding_from(const nlohmann::json & j)
{
  ComponentBinding b;
  b.name = j.at("name").get<std::string>();
  auto kind = parse_component_kind(j.at("kind").get<std::string>());
  if (!kind) throw std::runtime_error("unknown component kind " + j.at("kind").dump());
  b.kind = *kind;
  for (const auto & s : j.at("subscriptions")) {
    b.subscriptions.push_back({s.at("measurement").get<std::string>(), s.at("window").get<std::uint32_t>()});
  }
  b.notifications = j.at("notifications").get<std::vector<std::string>>();
  b.publications = j.at("publications").get<std::vector<std::string>>();
  for (const auto & c : j.at("commandsOut")) {
    b.commands_out.push_back({c.at("target").get<std::string>(), c.at("action").get<std::string>(),
                              c.at("args").get<std::vector<std::string>>()});
  }
  for (const auto & r : j.at("requestRoutes")) {
    b.request_routes.push_back({r.at("target").get<std::string>(), param_from(r.at("param")),
                                measurement_from(r.at("response"))});
  }
  if (j.contains("logicStub")) b.logic_stub = j.at("logicStub").get<std::string>();
  if (j.contains("serves")) b.serves = measurement_from(j.at("serves"));

  const auto & s = j.at("settings");
  auto & st = b.settings;
  if (s.contains("samplePeriodSeconds")) st.sample_period_s = s.at("samplePeriodSeconds").get<std::uint32_t>();
  if (s.contains("durationSeconds")) st.duration_s = s.at("durationSeconds").get<std::uint32_t>();
  if (s.contains("condition")) {
    const auto & c = s.at("condition");
    auto op = parse_comparator(c.at("op").get<std::string>());
    if (!op) throw std::runtime_error("unknown comparator " + c.at("op").dump());
    st.condition = Condition{c.at("field").get<std::string>(), *op, c.at("literal").get<double>()};
  }
  if (s.contains("accessParam")) st.access_param = param_from(s.at("accessParam"));
  if (s.contains("actions")) {
    for (const auto & a : s.at("actions")) st.actions.push_back(action_from(a));
  }
  if (s.contains("computeOp")) {
    auto op = parse_compute_op(s.at("computeOp").get<std::string>());
    if (!op) throw std::runtime_error("unknown compute op " + s.at("computeOp").dump());
    st.compute_op = *op;
  }
  if (s.contains("computeField")) st.compute_field = s.at("computeField").get<std::string>();
  return b;
}

}  // namespace

std::string package_to_json(const DevicePackage & p)
{
  ordered_json j;
  j["manifestVersion"] = p.manifest_version;
  j["programHash"] = p.program_hash;
  j["device"] = p.device;
  j["location"] = p.location;
  j["platform"] = p.platform;
  j["protocol"] = p.protocol;
  if (p.database) j["database"] = *p.database;
  ordered_json components = ordered_json::array();
  for (const auto & b : p.hosted) components.push_back(binding_json(b));
  j["components"] = components;
  ordered_json structs = ordered_json::array();
  for (const auto & s : p.structs) {
    ordered_json fields = ordered_json::array();
    for (const auto & f : s.fields) fields.push_back({{"name", f.name}, {"type", std::string(to_string(f.type))}});
    structs.push_back({{"name", s.name}, {"fields", fields}});
  }
  j["structs"] = structs;
  j["measurements"] = p.measurements;
  return j.dump(2) + "\n";
}

DevicePackage package_from_json(const std::string & text)
{
  try {
    const auto j = nlohmann::json::parse(text);
    DevicePackage p;
    p.manifest_version = j.at("manifestVersion").get<int>();
    if (p.manifest_version != 1) {
      throw std::runtime_error("unsupported manifestVersion " + std::to_string(p.manifest_version));
    }
    p.program_hash = j.at("programHash").get<std::string>();
    p.device = j.at("device").get<std::string>();
    p.location = j.at("location").get<std::string>();
    p.platform = j.at("platform").get<std::string>();
    p.protocol = j.at("protocol").get<std::string>();
    if (j.contains("database")) p.database = j.at("database").get<std::string>();
    for (const auto & b : j.at("components")) p.hosted.push_back(binding_from(b));
    for (const auto & s : j.at("structs")) {
      StructDecl decl;
      decl.name = s.at("name").get<std::string>();
      for (const auto & f : s.at("fields")) {
        Param fp = param_from(f);
        decl.fields.push_back({fp.name, fp.type});
      }
      p.structs.push_back(std::move(decl));
    }
    p.measurements = j.at("measurements").get<std::map<std::string, std::string>>();
    return p;
  } catch (const nlohmann::json::exception & e) {
    throw std::runtime_error(std::string("malformed manifest: ") + e.what());
  }
}

}  // namespace iotc
