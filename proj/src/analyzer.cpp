#include "iotc/analyzer.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <tuple>

#include "iotc/parser.hpp"

namespace iotc
{

namespace
{

constexpr std::string_view kVocabFile = "vocab.spec";
constexpr std::string_view kArchFile = "arch.spec";
constexpr std::string_view kUiFile = "ui.spec";
constexpr std::string_view kDeployFile = "deploy.spec";

SourceSpan span_in(const SpanTable & table, const std::string & key, std::string_view file)
{
  if (auto it = table.find(key); it != table.end()) return it->second;
  SourceSpan s;
  s.file = std::string(file);
  return s;
}

std::string quote(std::string_view s) { return "'" + std::string(s) + "'"; }

void push_unique(std::vector<std::string> & v, const std::string & s)
{
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

std::uint64_t fnv1a(std::string_view text)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Checker
{
public:
  explicit Checker(const ProgramModel & m) : m_(m) {}

  std::vector<Diagnostic> diags;
  std::map<std::string, ComponentKind> components;
  std::map<std::string, TopicEntry> topics;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> commands;
  std::map<std::string, std::vector<std::string>> requests;
  std::map<std::string, std::vector<std::string>> placements;
  std::map<std::string, std::vector<std::string>> pins;

  void run()
  {
    register_structs();
    register_components();
    register_producers();
    check_service_outputs();
    check_consumes();
    check_commands_and_requests();
    check_notifies();
    check_unused_outputs();
    check_devices();
    check_cycles();
  }

private:
  void error(const SourceSpan & span, const char * code, std::string message)
  {
    diags.push_back({Severity::Error, code, std::move(message), span});
  }
  void warning(const SourceSpan & span, const char * code, std::string message)
  {
    diags.push_back({Severity::Warning, code, std::move(message), span});
  }

  // Span of a component declaration, looked up in the section that owns it.
  SourceSpan component_span(const std::string & name) const
  {
    const std::string key = span_key::decl("component", name);
    auto kind = components.find(name);
    if (kind != components.end()) {
      if (is_service(kind->second)) return span_in(m_.arch.spans, key, kArchFile);
      if (kind->second == ComponentKind::UserInteraction) return span_in(m_.ui.spans, key, kUiFile);
    }
    return span_in(m_.vocab.spans, key, kVocabFile);
  }
  SourceSpan member_span(const std::string & component, std::string_view member, std::size_t index) const
  {
    const std::string key = span_key::member("component", component, member, index);
    auto kind = components.find(component);
    std::string_view file = kVocabFile;
    const SpanTable * table = &m_.vocab.spans;
    if (kind != components.end() && is_service(kind->second)) {
      table = &m_.arch.spans;
      file = kArchFile;
    } else if (kind != components.end() && kind->second == ComponentKind::UserInteraction) {
      table = &m_.ui.spans;
      file = kUiFile;
    }
    if (table->count(key) == 0) return component_span(component);
    return span_in(*table, key, file);
  }

  void register_structs()
  {
    std::set<std::string> vocab_names;
    for (const auto & s : m_.vocab.structs) vocab_names.insert(s.name);
    for (const auto & s : m_.ui.structs) {
      if (vocab_names.count(s.name) != 0) {
        error(span_in(m_.ui.spans, span_key::decl("struct", s.name), kUiFile), diag::DuplicateName,
              "struct " + quote(s.name) + " is already declared in the domain spec");
      }
    }
  }

  void add_component(const std::string & name, ComponentKind kind, const SpanTable & table,
                     std::string_view file)
  {
    auto [it, inserted] = components.emplace(name, kind);
    if (!inserted) {
      error(span_in(table, span_key::decl("component", name), file), diag::DuplicateName,
            "component " + quote(name) + " is already declared as " +
              std::string(to_string(it->second)));
    }
  }

  void register_components()
  {
    const auto & v = m_.vocab;
    for (const auto & d : v.periodic_sensors) add_component(d.name, ComponentKind::PeriodicSensor, v.spans, kVocabFile);
    for (const auto & d : v.event_sensors) add_component(d.name, ComponentKind::EventDrivenSensor, v.spans, kVocabFile);
    for (const auto & d : v.request_sensors) add_component(d.name, ComponentKind::RequestBasedSensor, v.spans, kVocabFile);
    for (const auto & d : v.tags) add_component(d.name, ComponentKind::Tag, v.spans, kVocabFile);
    for (const auto & d : v.actuators) add_component(d.name, ComponentKind::Actuator, v.spans, kVocabFile);
    for (const auto & d : v.storages) add_component(d.name, ComponentKind::Storage, v.spans, kVocabFile);
    for (const auto & d : m_.arch.services) {
      add_component(d.name,
                    d.kind == ServiceKind::Common ? ComponentKind::CommonService
                                                  : ComponentKind::CustomService,
                    m_.arch.spans, kArchFile);
    }
    for (const auto & d : m_.ui.interactions) {
      add_component(d.name, ComponentKind::UserInteraction, m_.ui.spans, kUiFile);
    }
  }

  void add_producer(const std::string & component, const MeasurementRef & m)
  {
    auto & entry = topics[m.measurement];
    if (entry.producers.empty()) {
      entry.struct_name = m.struct_name;
    } else if (entry.struct_name != m.struct_name) {
      error(member_span(component, "generate", 0), diag::TypeMismatch,
            "measurement " + quote(m.measurement) + " generated as " + quote(m.struct_name) +
              " but elsewhere as " + quote(entry.struct_name));
    }
    push_unique(entry.producers, component);
  }

  void register_producers()
  {
    for (const auto & d : m_.vocab.periodic_sensors) add_producer(d.name, d.generates);
    for (const auto & d : m_.vocab.event_sensors) add_producer(d.name, d.generates);
    for (const auto & d : m_.vocab.tags) add_producer(d.name, d.generates);
    for (const auto & d : m_.arch.services) {
      if (d.generates) add_producer(d.name, *d.generates);
    }
    for (auto & [name, entry] : topics) {
      std::sort(entry.producers.begin(), entry.producers.end());
      if (entry.producers.size() > 1) {
        std::string list;
        for (const auto & p : entry.producers) list += (list.empty() ? "" : ", ") + p;
        warning(member_span(entry.producers[1], "generate", 0), diag::MultipleProducers,
                "measurement " + quote(name) + " has several producers: " + list);
      }
    }
  }

  void check_service_outputs()
  {
    for (const auto & d : m_.arch.services) {
      if (d.generates && m_.find_struct(d.generates->struct_name) == nullptr) {
        error(member_span(d.name, "generateStruct", 0), diag::UnresolvedStruct,
              "unknown struct " + quote(d.generates->struct_name));
      }
    }
  }

  // Measurements only reachable by request (storages, request-based sensors)
  // are not topics; consuming one gets a hint.
  std::string request_only_hint(const std::string & measurement) const
  {
    for (const auto & s : m_.vocab.storages) {
      if (s.generates.measurement == measurement) {
        return " (" + quote(measurement) + " is served by storage " + quote(s.name) +
               "; use 'request')";
      }
    }
    for (const auto & s : m_.vocab.request_sensors) {
      if (s.generates.measurement == measurement) {
        return " (" + quote(measurement) + " is served by request-based sensor " + quote(s.name) +
               "; use 'request')";
      }
    }
    return {};
  }

  void check_consumes()
  {
    for (const auto & d : m_.arch.services) {
      for (std::size_t i = 0; i < d.consumes.size(); ++i) {
        const auto & c = d.consumes[i];
        auto it = topics.find(c.measurement);
        if (it == topics.end() || it->second.producers.empty()) {
          error(member_span(d.name, "consume", i), diag::UnresolvedMeasurement,
                "no component generates measurement " + quote(c.measurement) +
                  request_only_hint(c.measurement));
          continue;
        }
        push_unique(it->second.consumers, d.name);
      }
      if (d.kind == ServiceKind::Common && d.consumes.size() == 1 && d.generates) {
        check_common_compute(d);
      }
    }
    for (auto & [_, entry] : topics) std::sort(entry.consumers.begin(), entry.consumers.end());
  }

  void check_common_compute(const ComputationalServiceDecl & d)
  {
    auto it = topics.find(d.consumes.front().measurement);
    if (it == topics.end()) return;
    const StructDecl * in = m_.find_struct(it->second.struct_name);
    const StructDecl * out = m_.find_struct(d.generates->struct_name);
    if (in == nullptr || out == nullptr) return;
    std::string field;
    if (d.compute_field) {
      field = *d.compute_field;
    } else {
      for (const auto & f : in->fields) {
        if (is_numeric(f.type)) {
          field = f.name;
          break;
        }
      }
    }
    const SourceSpan span = member_span(d.name, "compute", 0);
    const FieldDecl * fin = field.empty() ? nullptr : in->find(field);
    if (fin == nullptr || !is_numeric(fin->type)) {
      error(span, diag::TypeMismatch,
            field.empty() ? "input struct " + quote(in->name) + " has no numeric field to aggregate"
                          : "field " + quote(field) + " is not a numeric field of " + quote(in->name));
      return;
    }
    const FieldDecl * fout = out->find(field);
    if (fout == nullptr || !is_numeric(fout->type)) {
      error(span, diag::TypeMismatch,
            "output struct " + quote(out->name) + " needs numeric field " + quote(field));
    }
  }

  // Resolves the action signature a command names; nullptr when unknown.
  const ActionDecl * resolve_action(const CommandDecl & c, const SourceSpan & span)
  {
    auto kind = components.find(c.target);
    if (kind == components.end()) {
      error(span, diag::UnknownAction, "command target " + quote(c.target) + " is not declared");
      return nullptr;
    }
    if (kind->second == ComponentKind::Actuator) {
      for (const auto & a : m_.vocab.actuators) {
        if (a.name != c.target) continue;
        if (const auto * act = a.find_action(c.action)) return act;
        error(span, diag::UnknownAction,
              "actuator " + quote(c.target) + " has no action " + quote(c.action));
        return nullptr;
      }
    }
    if (kind->second == ComponentKind::Storage) {
      for (const auto & s : m_.vocab.storages) {
        if (s.name != c.target) continue;
        if (s.insert_action.name == c.action) return &s.insert_action;
        error(span, diag::UnknownAction,
              "storage " + quote(c.target) + " has no action " + quote(c.action));
        return nullptr;
      }
    }
    error(span, diag::UnknownAction,
          "command target " + quote(c.target) + " is a " + std::string(to_string(kind->second)) +
            ", not an actuator or storage");
    return nullptr;
  }

  void check_command(const std::string & issuer, const CommandDecl & c, std::size_t index)
  {
    const SourceSpan span = member_span(issuer, "command", index);
    const ActionDecl * action = resolve_action(c, span);
    if (action == nullptr) return;
    if (action->params.size() != c.args.size()) {
      error(span, diag::ArityMismatch,
            "action " + quote(c.target + "." + c.action) + " takes " +
              std::to_string(action->params.size()) + " argument(s), " +
              std::to_string(c.args.size()) + " given");
      return;
    }
    push_unique(commands[{c.target, c.action}], issuer);
  }

  void check_request(const std::string & issuer, const RequestDecl & r, std::size_t index)
  {
    const SourceSpan span = member_span(issuer, "request", index);
    const Param * key = nullptr;
    for (const auto & s : m_.vocab.storages) {
      if (s.name == r.target) key = &s.accessed_by;
    }
    for (const auto & s : m_.vocab.request_sensors) {
      if (s.name == r.target) key = &s.access_param;
    }
    if (key == nullptr) {
      error(span, diag::UnknownRequestTarget,
            "request target " + quote(r.target) + " is not a storage or request-based sensor");
      return;
    }
    if (key->type != r.param.type) {
      error(span, diag::TypeMismatch,
            "request to " + quote(r.target) + " passes " + std::string(to_string(r.param.type)) +
              " but it is accessed by " + key->name + " : " + std::string(to_string(key->type)));
      return;
    }
    push_unique(requests[r.target], issuer);
  }

  void check_commands_and_requests()
  {
    for (const auto & d : m_.arch.services) {
      for (std::size_t i = 0; i < d.commands.size(); ++i) check_command(d.name, d.commands[i], i);
      for (std::size_t i = 0; i < d.requests.size(); ++i) check_request(d.name, d.requests[i], i);
    }
    for (const auto & d : m_.ui.interactions) {
      for (std::size_t i = 0; i < d.commands.size(); ++i) check_command(d.name, d.commands[i], i);
      for (std::size_t i = 0; i < d.requests.size(); ++i) check_request(d.name, d.requests[i], i);
    }
    for (auto & [_, v] : commands) std::sort(v.begin(), v.end());
    for (auto & [_, v] : requests) std::sort(v.begin(), v.end());
  }

  void check_notifies()
  {
    for (const auto & d : m_.ui.interactions) {
      for (std::size_t i = 0; i < d.notifies.size(); ++i) {
        const auto & n = d.notifies[i];
        if (m_.find_struct(n.struct_name) == nullptr) {
          error(span_in(m_.ui.spans, span_key::member("component", d.name, "notifyStruct", i), kUiFile),
                diag::UnresolvedStruct, "unknown struct " + quote(n.struct_name));
          continue;
        }
        auto it = topics.find(n.measurement);
        if (it == topics.end() || it->second.producers.empty()) {
          error(member_span(d.name, "notify", i), diag::UnresolvedMeasurement,
                "no component generates measurement " + quote(n.measurement));
          continue;
        }
        if (it->second.struct_name != n.struct_name) {
          error(member_span(d.name, "notify", i), diag::TypeMismatch,
                "measurement " + quote(n.measurement) + " carries " + quote(it->second.struct_name) +
                  ", not " + quote(n.struct_name));
          continue;
        }
        push_unique(it->second.notified, d.name);
      }
    }
    for (auto & [_, entry] : topics) std::sort(entry.notified.begin(), entry.notified.end());
  }

  void check_unused_outputs()
  {
    for (const auto & [name, entry] : topics) {
      if (!entry.consumers.empty() || !entry.notified.empty()) continue;
      for (const auto & p : entry.producers) {
        warning(member_span(p, "generate", 0), diag::UnusedMeasurement,
                "measurement " + quote(name) + " generated by " + quote(p) + " is never consumed");
      }
    }
  }

  void check_devices()
  {
    for (const auto & dev : m_.deploy.devices) {
      bool hosts_storage = false;
      for (std::size_t i = 0; i < dev.resources.size(); ++i) {
        const auto & r = dev.resources[i];
        auto kind = components.find(r);
        if (kind == components.end()) {
          error(span_in(m_.deploy.spans, span_key::member("device", dev.name, "resource", i), kDeployFile),
                diag::UnknownDeviceResource,
                "device " + quote(dev.name) + " hosts undeclared component " + quote(r));
          continue;
        }
        if (kind->second == ComponentKind::Storage) hosts_storage = true;
        if (is_service(kind->second)) {
          pins[r].push_back(dev.name);
        } else {
          placements[r].push_back(dev.name);
        }
      }
      const SourceSpan dev_span = span_in(m_.deploy.spans, span_key::decl("device", dev.name), kDeployFile);
      if (hosts_storage && !dev.database) {
        error(dev_span, diag::MissingDatabase,
              "device " + quote(dev.name) + " hosts a storage but declares no database");
      }
      if (!hosts_storage && dev.database) {
        warning(span_in(m_.deploy.spans, span_key::member("device", dev.name, "database", 0), kDeployFile),
                diag::UnusedDatabase, "database label unused on device " + quote(dev.name));
      }
    }
    for (auto & [_, v] : placements) std::sort(v.begin(), v.end());
    for (auto & [_, v] : pins) std::sort(v.begin(), v.end());
    for (const auto & [name, kind] : components) {
      if (is_service(kind)) continue;
      if (placements.count(name) == 0) {
        error(component_span(name), diag::UnplacedResource,
              std::string(to_string(kind)) + " " + quote(name) + " is not placed on any device");
      }
    }
  }

  // Consume/generate cycles among services. Feedback through the physical
  // world is expected, so these are only warnings.
  void check_cycles()
  {
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto & [_, entry] : topics) {
      for (const auto & p : entry.producers) {
        for (const auto & c : entry.consumers) push_unique(succ[p], c);
      }
    }
    for (auto & [_, v] : succ) std::sort(v.begin(), v.end());
    enum class Mark { None, Active, Done };
    std::map<std::string, Mark> mark;
    std::vector<std::string> stack;
    std::set<std::string> reported;
    std::function<void(const std::string &)> visit = [&](const std::string & n) {
      mark[n] = Mark::Active;
      stack.push_back(n);
      for (const auto & s : succ[n]) {
        if (mark[s] == Mark::Active) {
          auto start = std::find(stack.begin(), stack.end(), s);
          std::vector<std::string> cycle(start, stack.end());
          auto lowest = std::min_element(cycle.begin(), cycle.end());
          std::rotate(cycle.begin(), lowest, cycle.end());
          std::string text;
          for (const auto & c : cycle) text += c + " -> ";
          text += cycle.front();
          if (reported.insert(text).second) {
            warning(component_span(cycle.front()), diag::CycleWarning, "dataflow cycle: " + text);
          }
        } else if (mark[s] == Mark::None) {
          visit(s);
        }
      }
      stack.pop_back();
      mark[n] = Mark::Done;
    };
    for (const auto & [name, _] : components) {
      if (mark[name] == Mark::None) visit(name);
    }
  }

  const ProgramModel & m_;
};

template <typename T>
const T * find_named(const std::vector<T> & v, std::string_view name)
{
  for (const auto & x : v) {
    if (x.name == name) return &x;
  }
  return nullptr;
}

}  // namespace

std::string program_hash(const ProgramModel & model)
{
  const ProgramModel canon = canonicalize(model);
  std::string text;
  text += format(canon.vocab);
  text += "\n--\n";
  text += format(canon.arch);
  text += "\n--\n";
  text += format(canon.ui);
  text += "\n--\n";
  text += format(canon.deploy);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

Result<ValidatedProgram> validate(const ProgramModel & model)
{
  Result<ValidatedProgram> result;
  const ProgramModel canon = canonicalize(model);
  Checker checker(canon);
  checker.run();
  sort_diagnostics(checker.diags);
  result.diagnostics = std::move(checker.diags);
  if (has_errors(result.diagnostics)) return result;

  ValidatedProgram vp;
  vp.model_ = canon;
  vp.hash_ = program_hash(canon);
  vp.components_ = std::move(checker.components);
  vp.topics_ = std::move(checker.topics);
  vp.commands_ = std::move(checker.commands);
  vp.requests_ = std::move(checker.requests);
  vp.placements_ = std::move(checker.placements);
  vp.pins_ = std::move(checker.pins);
  result.value = std::move(vp);
  return result;
}

std::optional<ComponentKind> ValidatedProgram::kind_of(std::string_view component) const
{
  auto it = components_.find(std::string(component));
  if (it == components_.end()) return std::nullopt;
  return it->second;
}

const ComputationalServiceDecl * ValidatedProgram::find_service(std::string_view name) const
{
  return find_named(model_.arch.services, name);
}
const UserInteractionDecl * ValidatedProgram::find_interaction(std::string_view name) const
{
  return find_named(model_.ui.interactions, name);
}
const ActuatorDecl * ValidatedProgram::find_actuator(std::string_view name) const
{
  return find_named(model_.vocab.actuators, name);
}
const StorageDecl * ValidatedProgram::find_storage(std::string_view name) const
{
  return find_named(model_.vocab.storages, name);
}
const RequestBasedSensorDecl * ValidatedProgram::find_request_sensor(std::string_view name) const
{
  return find_named(model_.vocab.request_sensors, name);
}
const PeriodicSensorDecl * ValidatedProgram::find_periodic(std::string_view name) const
{
  return find_named(model_.vocab.periodic_sensors, name);
}
const EventDrivenSensorDecl * ValidatedProgram::find_event(std::string_view name) const
{
  return find_named(model_.vocab.event_sensors, name);
}
const TagDecl * ValidatedProgram::find_tag(std::string_view name) const
{
  return find_named(model_.vocab.tags, name);
}
const DeviceDecl * ValidatedProgram::find_device(std::string_view name) const
{
  return find_named(model_.deploy.devices, name);
}

const MeasurementRef * ValidatedProgram::generated_by(std::string_view component) const
{
  if (const auto * d = find_periodic(component)) return &d->generates;
  if (const auto * d = find_event(component)) return &d->generates;
  if (const auto * d = find_tag(component)) return &d->generates;
  if (const auto * d = find_request_sensor(component)) return &d->generates;
  if (const auto * d = find_storage(component)) return &d->generates;
  if (const auto * d = find_service(component)) return d->generates ? &*d->generates : nullptr;
  return nullptr;
}

std::string ValidatedProgram::compute_field(const ComputationalServiceDecl & service) const
{
  if (service.compute_field) return *service.compute_field;
  if (service.consumes.empty()) return {};
  auto it = topics_.find(service.consumes.front().measurement);
  if (it == topics_.end()) return {};
  if (const auto * s = find_struct(it->second.struct_name)) {
    for (const auto & f : s->fields) {
      if (is_numeric(f.type)) return f.name;
    }
  }
  return {};
}

std::string_view to_string(InteractionMode m)
{
  switch (m) {
    case InteractionMode::Periodic:
      return "periodic";
    case InteractionMode::EventDriven:
      return "event-driven";
    case InteractionMode::RequestResponse:
      return "request-response";
    case InteractionMode::Command:
      return "command";
    case InteractionMode::Notify:
      return "notify";
  }
  return "?";
}

DataflowGraph dataflow_graph(const ValidatedProgram & vp)
{
  // One edge per (from, to, mode); several measurements or actions on the
  // same link share it with a comma-joined label.
  std::map<std::tuple<std::string, std::string, InteractionMode>, std::set<std::string>> links;
  for (const auto & [measurement, entry] : vp.topics()) {
    for (const auto & p : entry.producers) {
      const auto mode = vp.kind_of(p) == ComponentKind::PeriodicSensor ? InteractionMode::Periodic
                                                                       : InteractionMode::EventDriven;
      for (const auto & c : entry.consumers) links[{p, c, mode}].insert(measurement);
      for (const auto & u : entry.notified) links[{p, u, InteractionMode::Notify}].insert(measurement);
    }
  }
  for (const auto & [key, issuers] : vp.command_index()) {
    for (const auto & i : issuers) links[{i, key.first, InteractionMode::Command}].insert(key.second);
  }
  for (const auto & [target, requesters] : vp.request_index()) {
    for (const auto & r : requesters) {
      const auto * m = vp.generated_by(target);
      links[{r, target, InteractionMode::RequestResponse}].insert(m != nullptr ? m->measurement : target);
    }
  }
  DataflowGraph g;
  for (const auto & [name, _] : vp.components()) g.nodes.push_back(name);
  for (const auto & [key, labels] : links) {
    std::string label;
    for (const auto & l : labels) label += (label.empty() ? "" : ",") + l;
    g.edges.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), label});
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

std::string to_dot(const DataflowGraph & g)
{
  std::ostringstream os;
  os << "digraph dataflow {\n";
  for (const auto & n : g.nodes) os << "  \"" << n << "\";\n";
  for (const auto & e : g.edges) {
    os << "  \"" << e.from << "\" -> \"" << e.to << "\" [label=\"" << to_string(e.mode) << ' '
       << e.label << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace iotc
