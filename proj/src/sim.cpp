#include "iotc/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <queue>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "json_values.hpp"

namespace iotc
{

std::string_view to_string(MessageKind k)
{
  switch (k) {
    case MessageKind::Publish:
      return "Publish";
    case MessageKind::Request:
      return "Request";
    case MessageKind::Response:
      return "Response";
    case MessageKind::Command:
      return "Command";
    case MessageKind::Notify:
      return "Notify";
  }
  return "?";
}

std::string format_message(const SimMessage & m)
{
  std::string out = std::to_string(m.t_ms) + " " + std::string(to_string(m.kind)) + " " + m.sender + " ";
  if (!m.receiver.empty()) out += m.receiver + ":";
  out += m.topic + " ";
  out += m.payload ? record_json(*m.payload) : "null";
  return out;
}

std::string format_trace(const SimTrace & t)
{
  std::string out;
  for (const auto & m : t.messages) out += format_message(m) + "\n";
  return out;
}

std::string trace_json(const SimTrace & t)
{
  using nlohmann::ordered_json;
  ordered_json messages = ordered_json::array();
  for (const auto & m : t.messages) {
    ordered_json j;
    j["t_ms"] = m.t_ms;
    j["kind"] = std::string(to_string(m.kind));
    j["sender"] = m.sender;
    if (!m.receiver.empty()) j["receiver"] = m.receiver;
    j["topic"] = m.topic;
    j["payload"] = m.payload ? ordered_json::parse(record_json(*m.payload)) : ordered_json();
    if (m.kind == MessageKind::Command) j["args"] = ordered_json::parse(values_json(m.args));
    messages.push_back(std::move(j));
  }
  ordered_json doc;
  doc["messages"] = messages;
  doc["warnings"] = t.warnings;
  return doc.dump(2) + "\n";
}

Record compute_common(ComputeOp op, std::span<const Record> window, const std::string & field)
{
  if (window.empty()) throw SimError(sim_error::InvalidInput, "compute over an empty window");
  double acc = 0.0;
  for (std::size_t i = 0; i < window.size(); ++i) {
    const Value * v = window[i].get(field);
    auto n = v != nullptr ? as_number(*v) : std::nullopt;
    if (!n) throw SimError(sim_error::NonNumericField, "field '" + field + "' is missing or not numeric");
    switch (op) {
      case ComputeOp::AvgBySample:
      case ComputeOp::SumBySample:
        acc += *n;
        break;
      case ComputeOp::MaxBySample:
        acc = i == 0 ? *n : std::max(acc, *n);
        break;
      case ComputeOp::MinBySample:
        acc = i == 0 ? *n : std::min(acc, *n);
        break;
      case ComputeOp::CountBySample:
        break;
    }
  }
  if (op == ComputeOp::AvgBySample) acc /= static_cast<double>(window.size());
  if (op == ComputeOp::CountBySample) acc = static_cast<double>(window.size());
  Record out = window.back();
  out.set(field, acc);
  return out;
}

namespace
{

std::string trim(std::string_view s)
{
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv(const std::string & line)
{
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<Value> parse_cell(const std::string & text, PrimitiveType type)
{
  if (type == PrimitiveType::String) return Value{text};
  if (type == PrimitiveType::Long) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) return std::nullopt;
    return Value{v};
  }
  double v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) return std::nullopt;
  return Value{v};
}

std::uint64_t name_hash(std::string_view s)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SensorTrace parse_trace_csv(const std::string & sensor, const std::string & text, const StructDecl & s)
{
  SensorTrace trace;
  trace.sensor = sensor;
  std::istringstream is(text);
  std::string line;
  std::vector<std::string> header;
  std::size_t line_no = 0;
  auto fail = [&](const std::string & why) {
    throw SimError(sim_error::InvalidTrace,
                   "trace for " + sensor + ", line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    if (header.empty()) {
      header = cells;
      if (header.empty() || header[0] != "t_ms") fail("header must start with t_ms");
      for (const auto & f : s.fields) {
        if (std::find(header.begin() + 1, header.end(), f.name) == header.end()) {
          fail("header lacks field '" + f.name + "' of " + s.name);
        }
      }
      for (std::size_t i = 1; i < header.size(); ++i) {
        if (s.find(header[i]) == nullptr) fail("'" + header[i] + "' is not a field of " + s.name);
      }
      continue;
    }
    if (cells.size() != header.size()) fail("expected " + std::to_string(header.size()) + " cells");
    std::int64_t t = 0;
    auto [p, ec] = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), t);
    if (ec != std::errc{} || p != cells[0].data() + cells[0].size()) fail("bad t_ms '" + cells[0] + "'");
    if (!trace.samples.empty() && t <= trace.samples.back().first) fail("timestamps must increase");
    Record r;
    for (const auto & f : s.fields) {
      auto idx = static_cast<std::size_t>(std::find(header.begin(), header.end(), f.name) - header.begin());
      auto v = parse_cell(cells[idx], f.type);
      if (!v) fail("bad " + std::string(to_string(f.type)) + " value '" + cells[idx] + "'");
      r.fields.emplace_back(f.name, std::move(*v));
    }
    trace.samples.emplace_back(t, std::move(r));
  }
  if (header.empty()) fail("empty trace");
  return trace;
}

StorageSeed parse_storage_seed(const std::string & json_text, const std::vector<DevicePackage> & packages)
{
  std::map<std::string, const StructDecl *> served;
  for (const auto & p : packages) {
    for (const auto & b : p.hosted) {
      if (!b.serves) continue;
      for (const auto & s : p.structs) {
        if (s.name == b.serves->struct_name) served[b.name] = &s;
      }
    }
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception & e) {
    throw SimError(sim_error::InvalidInput, std::string("malformed storage seed: ") + e.what());
  }
  StorageSeed out;
  for (const auto & [component, rows] : doc.items()) {
    auto it = served.find(component);
    if (it == served.end()) {
      throw SimError(sim_error::InvalidInput, "storage seed names '" + component +
                                                "', which is not a hosted storage or request sensor");
    }
    for (const auto & [key, row] : rows.items()) {
      auto r = detail::record_from_json(row);
      std::optional<Record> c = r ? conform(*r, *it->second) : std::nullopt;
      if (!c) {
        throw SimError(sim_error::PayloadTypeError,
                       "seed row '" + key + "' of " + component + " does not match " + it->second->name);
      }
      out[component][key] = std::move(*c);
    }
  }
  return out;
}

std::vector<FeedbackModel> parse_feedback(const std::string & json_text)
{
  std::vector<FeedbackModel> out;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    for (const auto & m : doc.at("feedback")) {
      FeedbackModel fm;
      fm.sensor = m.at("sensor").get<std::string>();
      fm.field = m.at("field").get<std::string>();
      fm.max_rate = m.value("maxRate", fm.max_rate);
      for (const auto & r : m.at("responses")) {
        FeedbackResponse fr;
        fr.actuator = r.at("actuator").get<std::string>();
        fr.action = r.at("action").get<std::string>();
        fr.rate_per_s = r.at("rate").get<double>();
        if (r.contains("targetArg")) fr.target_arg = r.at("targetArg").get<std::size_t>();
        fm.responses.push_back(std::move(fr));
      }
      out.push_back(std::move(fm));
    }
  } catch (const nlohmann::json::exception & e) {
    throw SimError(sim_error::InvalidFeedback, std::string("malformed feedback config: ") + e.what());
  }
  return out;
}

std::map<std::string, GeneratorSpec> parse_generators(const std::string & json_text)
{
  std::map<std::string, GeneratorSpec> out;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    for (const auto & [name, g] : doc.items()) {
      GeneratorSpec spec;
      spec.period_ms = g.value("periodMs", spec.period_ms);
      for (const auto & [field, f] : g.at("fields").items()) {
        GeneratorSpec::Field gf;
        if (f.contains("text")) {
          gf.text = f.at("text").get<std::string>();
        } else {
          gf.min = f.at("min").get<double>();
          gf.max = f.at("max").get<double>();
        }
        spec.fields[field] = gf;
      }
      if (spec.period_ms <= 0) throw SimError(sim_error::InvalidInput, "generator periodMs must be positive");
      out[name] = std::move(spec);
    }
  } catch (const nlohmann::json::exception & e) {
    throw SimError(sim_error::InvalidInput, std::string("malformed generator config: ") + e.what());
  }
  return out;
}

FeedbackModel reference_hvac_feedback(const std::string & sensor, const std::string & field,
                                      const std::string & actuator)
{
  FeedbackModel fm;
  fm.sensor = sensor;
  fm.field = field;
  fm.max_rate = 1.0;
  fm.responses.push_back({actuator, "SetTemp", 0.5, 0});
  fm.responses.push_back({actuator, "Off", -0.2, std::nullopt});
  return fm;
}

namespace
{

struct FeedbackState
{
  const FeedbackModel * model = nullptr;
  double offset = 0.0;
  double rate = 0.0;
  std::optional<double> target;
  std::int64_t last_t = 0;
  std::optional<double> last_base;

  // Integrates the drift up to t; with a target the value stops there.
  void advance(std::int64_t t, std::optional<double> base)
  {
    if (base) last_base = base;
    const double dt = static_cast<double>(t - last_t) / 1000.0;
    last_t = t;
    if (dt <= 0 || rate == 0.0) return;
    double delta = rate * dt;
    if (target && last_base) {
      const double gap = *target - (*last_base + offset);
      if (rate > 0) delta = std::min(delta, std::max(0.0, gap));
      if (rate < 0) delta = std::max(delta, std::min(0.0, gap));
    }
    offset += delta;
  }
};

struct Instance
{
  std::string name;
  const DevicePackage * package = nullptr;
  const ComponentBinding * binding = nullptr;
  std::unique_ptr<ComponentLogic> logic;
  std::map<std::string, std::vector<Record>> buffers;
  const SensorTrace * trace = nullptr;
  const GeneratorSpec * generator = nullptr;
  std::mt19937_64 rng;
  std::map<std::string, Record> rows;
};

enum class EventType { Sample, Deliver };

struct Event
{
  std::int64_t t;
  int phase;  // 0 sensor activity, 1 message delivery
  std::string sender;
  std::uint64_t seq;
  EventType type;
  std::size_t instance;
  std::size_t step;  // sample number (periodic) or row index (event, tag)
  SimMessage message;
};

struct EventAfter
{
  bool operator()(const Event & a, const Event & b) const
  {
    return std::tie(a.t, a.phase, a.sender, a.seq) > std::tie(b.t, b.phase, b.sender, b.seq);
  }
};

class Simulator;

class Context : public LogicContext
{
public:
  Context(Simulator & sim, std::size_t inst) : sim_(sim), inst_(inst) {}
  std::int64_t now_ms() const override;
  const std::string & self() const override;
  void publish(const std::string & measurement, Record payload) override;
  void send_command(const std::string & target, const std::string & action, std::vector<Value> args) override;
  void send_request(const std::string & target, Value key) override;

private:
  Simulator & sim_;
  std::size_t inst_;
};

class Simulator
{
public:
  explicit Simulator(const SimInputs & in) : in_(in) {}

  SimTrace run()
  {
    load();
    if (in_.horizon_ms > 0) {
      for (std::size_t i = 0; i < instances_.size(); ++i) schedule_sensor(i, 0);
    }
    while (!queue_.empty()) {
      Event e = queue_.top();
      queue_.pop();
      now_ = e.t;
      if (e.type == EventType::Sample) {
        sample(e.instance, e.step);
      } else {
        deliver(e.message);
      }
    }
    return std::move(trace_);
  }

  std::int64_t now() const { return now_; }
  const std::string & name_of(std::size_t i) const { return instances_[i].name; }

  void publish_from(std::size_t i, const std::string & measurement, Record payload)
  {
    const auto & b = *instances_[i].binding;
    if (std::find(b.publications.begin(), b.publications.end(), measurement) == b.publications.end()) {
      throw SimError(sim_error::UndeclaredRoute, b.name + " does not generate '" + measurement + "'");
    }
    emit_publish(i, measurement, std::move(payload));
  }

  void command_from(std::size_t i, const std::string & target, const std::string & action,
                    std::vector<Value> args)
  {
    const auto & b = *instances_[i].binding;
    const bool declared = std::any_of(b.commands_out.begin(), b.commands_out.end(), [&](const CommandRoute & c) {
      return c.target == target && c.action == action;
    });
    if (!declared) {
      throw SimError(sim_error::UndeclaredRoute,
                     b.name + " has no command route " + target + "." + action);
    }
    auto receivers = by_component_.find(target);
    if (receivers == by_component_.end()) {
      throw SimError(sim_error::InvalidInput, "command target '" + target + "' is not in any package");
    }
    const ActionDecl * decl = nullptr;
    for (const auto & a : instances_[receivers->second.front()].binding->settings.actions) {
      if (a.name == action) decl = &a;
    }
    if (decl == nullptr) throw SimError(sim_error::UndeclaredRoute, target + " has no action " + action);
    if (decl->params.size() != args.size()) {
      throw SimError(sim_error::PayloadTypeError,
                     b.name + " sent " + target + "." + action + " with " + std::to_string(args.size()) +
                       " argument(s), expected " + std::to_string(decl->params.size()));
    }
    Record payload;
    std::vector<Value> coerced;
    for (std::size_t k = 0; k < args.size(); ++k) {
      auto c = coerce(args[k], decl->params[k].type);
      if (!c) {
        throw SimError(sim_error::PayloadTypeError, b.name + " sent " + target + "." + action +
                                                      " with a bad '" + decl->params[k].name + "'");
      }
      payload.fields.emplace_back(decl->params[k].name, *c);
      coerced.push_back(std::move(*c));
    }
    for (std::size_t r : receivers->second) {
      SimMessage m;
      m.t_ms = now_;
      m.kind = MessageKind::Command;
      m.sender = instances_[i].name;
      m.receiver = instances_[r].name;
      m.topic = action;
      m.payload = payload;
      m.args = coerced;
      emit(std::move(m), 0);
    }
  }

  void request_from(std::size_t i, const std::string & target, Value key)
  {
    const auto & b = *instances_[i].binding;
    const RequestRoute * route = nullptr;
    for (const auto & r : b.request_routes) {
      if (r.target == target) route = &r;
    }
    if (route == nullptr) throw SimError(sim_error::UndeclaredRoute, b.name + " has no request route to " + target);
    auto responders = by_component_.find(target);
    if (responders == by_component_.end()) {
      throw SimError(sim_error::InvalidInput, "request target '" + target + "' is not in any package");
    }
    if (responders->second.size() > 1) {
      throw SimError(sim_error::AmbiguousResponder,
                     target + " is placed on " + std::to_string(responders->second.size()) +
                       " devices; requests need a unique responder");
    }
    auto c = coerce(key, route->param.type);
    if (!c) throw SimError(sim_error::PayloadTypeError, b.name + " sent a bad key to " + target);
    SimMessage m;
    m.t_ms = now_;
    m.kind = MessageKind::Request;
    m.sender = instances_[i].name;
    m.receiver = instances_[responders->second.front()].name;
    m.topic = route->param.name;
    m.payload = Record{{{route->param.name, *c}}};
    emit(std::move(m), 0);
  }

private:
  // Setup

  void load()
  {
    if (in_.stubs == nullptr) throw SimError(sim_error::InvalidInput, "no stub registry");
    if (in_.horizon_ms < 0) throw SimError(sim_error::InvalidInput, "horizon must not be negative");
    std::set<std::string> hashes;
    std::map<std::string, std::size_t> placements;
    for (const auto & p : in_.packages) {
      hashes.insert(p.program_hash);
      for (const auto & b : p.hosted) ++placements[b.name];
      for (const auto & s : p.structs) structs_.emplace(s.name, s);
      for (const auto & [m, s] : p.measurements) measurements_.emplace(m, s);
    }
    if (hashes.size() > 1) {
      throw SimError(sim_error::InvalidInput, "packages come from different program builds");
    }
    for (const auto & p : in_.packages) {
      for (const auto & b : p.hosted) {
        Instance inst;
        inst.name = placements[b.name] > 1 ? b.name + "@" + p.device : b.name;
        inst.package = &p;
        inst.binding = &b;
        instances_.push_back(std::move(inst));
      }
    }
    std::sort(instances_.begin(), instances_.end(),
              [](const Instance & a, const Instance & b) { return a.name < b.name; });
    for (std::size_t i = 0; i < instances_.size(); ++i) {
      auto & inst = instances_[i];
      const auto & b = *inst.binding;
      component_of_[inst.name] = b.name;
      by_component_[b.name].push_back(i);
      contexts_.push_back(std::make_unique<Context>(*this, i));
      for (const auto & s : b.subscriptions) subscribers_[s.measurement].push_back(i);
      for (const auto & m : b.notifications) notified_[m].push_back(i);
      if (b.logic_stub) {
        if (!in_.stubs->has(*b.logic_stub)) {
          throw SimError(sim_error::MissingLogic, "no logic registered for stub '" + *b.logic_stub + "'");
        }
        inst.logic = in_.stubs->create(*b.logic_stub);
      }
      if (is_sensing(b.kind)) attach_source(inst);
      if (b.serves) {
        if (auto it = in_.storage.find(b.name); it != in_.storage.end()) inst.rows = it->second;
      }
    }
    for (const auto & fm : in_.feedback) {
      for (const auto & r : fm.responses) {
        if (std::fabs(r.rate_per_s) > fm.max_rate) {
          throw SimError(sim_error::InvalidFeedback, "feedback rate " + std::to_string(r.rate_per_s) +
                                                       " exceeds max " + std::to_string(fm.max_rate));
        }
      }
      FeedbackState st;
      st.model = &fm;
      feedback_.push_back(st);
    }
  }

  static bool is_sensing(ComponentKind k)
  {
    return k == ComponentKind::PeriodicSensor || k == ComponentKind::EventDrivenSensor || k == ComponentKind::Tag;
  }

  const StructDecl & struct_of(const std::string & measurement) const
  {
    auto m = measurements_.find(measurement);
    if (m != measurements_.end()) {
      auto s = structs_.find(m->second);
      if (s != structs_.end()) return s->second;
    }
    throw SimError(sim_error::InvalidInput, "no struct for measurement '" + measurement + "'");
  }

  void attach_source(Instance & inst)
  {
    const auto & b = *inst.binding;
    if (auto t = in_.traces.find(inst.name); t != in_.traces.end()) {
      inst.trace = &t->second;
    } else if (auto t2 = in_.traces.find(b.name); t2 != in_.traces.end()) {
      inst.trace = &t2->second;
    } else if (auto g = in_.generators.find(inst.name); g != in_.generators.end()) {
      inst.generator = &g->second;
    } else if (auto g2 = in_.generators.find(b.name); g2 != in_.generators.end()) {
      inst.generator = &g2->second;
    } else {
      throw SimError(sim_error::MissingTrace, "no trace or generator for sensor '" + inst.name + "'");
    }
    if (inst.generator != nullptr) {
      inst.rng.seed(in_.seed ^ name_hash(inst.name));
      for (const auto & f : struct_of(b.publications.front()).fields) {
        if (inst.generator->fields.count(f.name) == 0) {
          throw SimError(sim_error::InvalidInput, "generator for " + inst.name + " lacks field '" + f.name + "'");
        }
      }
    }
  }

  // Scheduling

  void push(Event e)
  {
    e.seq = seq_++;
    queue_.push(std::move(e));
  }

  // Schedules sample `step` of a sensing instance if it falls in (0, horizon].
  void schedule_sensor(std::size_t i, std::size_t step)
  {
    const auto & inst = instances_[i];
    const auto & b = *inst.binding;
    if (!is_sensing(b.kind)) return;
    std::int64_t t = 0;
    if (b.kind == ComponentKind::PeriodicSensor) {
      const std::int64_t d = static_cast<std::int64_t>(b.settings.sample_period_s.value_or(1)) * 1000;
      const std::int64_t k = static_cast<std::int64_t>(b.settings.duration_s.value_or(1)) * 1000;
      t = d * static_cast<std::int64_t>(step + 1);
      if (t > k) return;
    } else if (inst.trace != nullptr) {
      // skip rows at or before time zero
      while (step < inst.trace->samples.size() && inst.trace->samples[step].first <= 0) ++step;
      if (step >= inst.trace->samples.size()) return;
      t = inst.trace->samples[step].first;
    } else {
      t = inst.generator->period_ms * static_cast<std::int64_t>(step + 1);
    }
    if (t > in_.horizon_ms) return;
    push(Event{t, 0, inst.name, 0, EventType::Sample, i, step, {}});
  }

  void emit(SimMessage m, std::int64_t delay)
  {
    const std::int64_t t = now_ + delay;
    if (t > in_.horizon_ms) return;
    m.t_ms = t;
    std::string sender = m.sender;
    push(Event{t, 1, std::move(sender), 0, EventType::Deliver, 0, 0, std::move(m)});
  }

  void emit_publish(std::size_t i, const std::string & measurement, Record payload)
  {
    const StructDecl & s = struct_of(measurement);
    auto c = conform(payload, s);
    if (!c) {
      throw SimError(sim_error::PayloadTypeError, instances_[i].name + " published " + record_json(payload) +
                                                    " as '" + measurement + "', which needs " + s.name);
    }
    SimMessage m;
    m.kind = MessageKind::Publish;
    m.sender = instances_[i].name;
    m.topic = measurement;
    m.payload = std::move(*c);
    emit(std::move(m), 0);
  }

  // Sensing

  Record trace_value(Instance & inst, std::size_t step)
  {
    const auto & samples = inst.trace->samples;
    if (inst.binding->kind != ComponentKind::PeriodicSensor) return samples[step].second;
    // step-hold: latest row at or before now, the first row before that
    const Record * r = &samples.front().second;
    for (const auto & [t, rec] : samples) {
      if (t > now_) break;
      r = &rec;
    }
    return *r;
  }

  Record generated_value(Instance & inst)
  {
    const StructDecl & s = struct_of(inst.binding->publications.front());
    Record r;
    for (const auto & f : s.fields) {
      const auto & g = inst.generator->fields.at(f.name);
      if (f.type == PrimitiveType::String) {
        r.fields.emplace_back(f.name, g.text.value_or(""));
        continue;
      }
      const double u = static_cast<double>(inst.rng() >> 11) * 0x1.0p-53;
      const double v = g.min + (g.max - g.min) * u;
      if (f.type == PrimitiveType::Long) {
        r.fields.emplace_back(f.name, static_cast<std::int64_t>(std::llround(v)));
      } else {
        r.fields.emplace_back(f.name, v);
      }
    }
    return r;
  }

  void apply_feedback(const std::string & sensor, Record & r)
  {
    for (auto & fb : feedback_) {
      if (fb.model->sensor != sensor) continue;
      const Value * v = r.get(fb.model->field);
      auto base = v != nullptr ? as_number(*v) : std::nullopt;
      if (!base) continue;
      fb.advance(now_, base);
      if (std::holds_alternative<std::int64_t>(*v)) {
        r.set(fb.model->field, static_cast<std::int64_t>(std::llround(*base + fb.offset)));
      } else {
        r.set(fb.model->field, *base + fb.offset);
      }
    }
  }

  void sample(std::size_t i, std::size_t step)
  {
    auto & inst = instances_[i];
    const auto & b = *inst.binding;
    Record r = inst.trace != nullptr ? trace_value(inst, step) : generated_value(inst);
    apply_feedback(b.name, r);
    bool fire = true;
    if (b.kind == ComponentKind::EventDrivenSensor && b.settings.condition) {
      const auto & c = *b.settings.condition;
      const Value * v = r.get(c.field);
      auto n = v != nullptr ? as_number(*v) : std::nullopt;
      fire = n && compare(c.op, *n, c.literal);
    }
    if (fire) emit_publish(i, b.publications.front(), std::move(r));
    schedule_sensor(i, step + 1);
  }

  // Delivery

  void activate(std::size_t i, MessageKind kind, const std::string & topic)
  {
    trace_.activations.push_back({now_, instances_[i].name, kind, topic});
  }

  template <typename F>
  void call_logic(std::size_t i, F && f)
  {
    auto & inst = instances_[i];
    if (!inst.logic) return;
    try {
      f(*inst.logic, *contexts_[i]);
    } catch (const SimError &) {
      throw;
    } catch (const std::exception & e) {
      throw SimError(sim_error::LogicError, inst.name + ": " + e.what());
    }
  }

  void deliver(const SimMessage & m)
  {
    trace_.messages.push_back(m);
    if (in_.on_message) in_.on_message(m);
    switch (m.kind) {
      case MessageKind::Publish:
        deliver_publish(m);
        break;
      case MessageKind::Notify: {
        const std::size_t r = index_of(m.receiver);
        activate(r, m.kind, m.topic);
        call_logic(r, [&](ComponentLogic & l, LogicContext & c) { l.on_notify(c, m.topic, *m.payload); });
        break;
      }
      case MessageKind::Command:
        deliver_command(m);
        break;
      case MessageKind::Request:
        deliver_request(m);
        break;
      case MessageKind::Response: {
        const std::size_t r = index_of(m.receiver);
        activate(r, m.kind, m.topic);
        const std::string & target = component_of_.at(m.sender);
        call_logic(r, [&](ComponentLogic & l, LogicContext & c) { l.on_response(c, target, m.payload); });
        break;
      }
    }
  }

  std::size_t index_of(const std::string & instance) const
  {
    auto it = std::lower_bound(instances_.begin(), instances_.end(), instance,
                               [](const Instance & a, const std::string & n) { return a.name < n; });
    return static_cast<std::size_t>(it - instances_.begin());
  }

  void deliver_publish(const SimMessage & m)
  {
    auto subs = subscribers_.find(m.topic);
    auto ui = notified_.find(m.topic);
    if (subs == subscribers_.end() && ui == notified_.end()) {
      trace_.warnings.push_back(std::to_string(now_) + " NoSubscriber " + m.topic + " from " + m.sender);
      return;
    }
    if (subs != subscribers_.end()) {
      for (std::size_t i : subs->second) consume(i, m);
    }
    if (ui != notified_.end()) {
      for (std::size_t i : ui->second) {
        SimMessage n = m;
        n.kind = MessageKind::Notify;
        n.receiver = instances_[i].name;
        emit(std::move(n), 0);
      }
    }
  }

  void consume(std::size_t i, const SimMessage & m)
  {
    auto & inst = instances_[i];
    const auto & b = *inst.binding;
    activate(i, MessageKind::Publish, m.topic);
    std::uint32_t window = 1;
    for (const auto & s : b.subscriptions) {
      if (s.measurement == m.topic) window = s.window;
    }
    auto & buf = inst.buffers[m.topic];
    buf.push_back(*m.payload);
    if (buf.size() < window) return;
    std::vector<Record> full;
    full.swap(buf);
    if (b.kind == ComponentKind::CommonService) {
      const Record result = compute_common(b.settings.compute_op.value_or(ComputeOp::AvgBySample), full,
                                           b.settings.compute_field.value_or(""));
      const std::string & out = b.publications.front();
      const StructDecl & os = struct_of(out);
      Record shaped = default_record(os);
      for (const auto & f : os.fields) {
        if (const Value * v = result.get(f.name)) {
          if (auto c = coerce(*v, f.type)) shaped.set(f.name, *c);
        }
      }
      emit_publish(i, out, std::move(shaped));
    } else {
      call_logic(i, [&](ComponentLogic & l, LogicContext & c) {
        l.on_consume(c, m.topic, std::span<const Record>(full));
      });
    }
  }

  void deliver_command(const SimMessage & m)
  {
    const std::size_t r = index_of(m.receiver);
    auto & inst = instances_[r];
    activate(r, MessageKind::Command, m.topic);
    const auto & b = *inst.binding;
    if (b.kind == ComponentKind::Storage && b.settings.access_param && m.payload) {
      const Value * key = m.payload->get(b.settings.access_param->name);
      if (key != nullptr) {
        const StructDecl & s = struct_of(b.serves->measurement);
        Record row = default_record(s);
        for (const auto & f : s.fields) {
          if (const Value * v = m.payload->get(f.name)) {
            if (auto c = coerce(*v, f.type)) row.set(f.name, *c);
          }
        }
        inst.rows[value_text(*key)] = std::move(row);
      }
      return;
    }
    // Every instance of the actuator receives the command; the feedback
    // model reacts once per issued command.
    if (by_component_.at(b.name).front() != r) return;
    for (auto & fb : feedback_) {
      for (const auto & resp : fb.model->responses) {
        if (resp.actuator != b.name || resp.action != m.topic) continue;
        fb.advance(now_, std::nullopt);
        fb.rate = resp.rate_per_s;
        fb.target.reset();
        if (resp.target_arg && *resp.target_arg < m.args.size()) fb.target = as_number(m.args[*resp.target_arg]);
      }
    }
  }

  void deliver_request(const SimMessage & m)
  {
    const std::size_t r = index_of(m.receiver);
    auto & inst = instances_[r];
    activate(r, MessageKind::Request, m.topic);
    SimMessage resp;
    resp.kind = MessageKind::Response;
    resp.sender = inst.name;
    resp.receiver = m.sender;
    resp.topic = inst.binding->serves ? inst.binding->serves->measurement : m.topic;
    if (m.payload && !m.payload->fields.empty()) {
      auto it = inst.rows.find(value_text(m.payload->fields.front().second));
      if (it != inst.rows.end()) resp.payload = it->second;
    }
    emit(std::move(resp), 1);
  }

  const SimInputs & in_;
  std::vector<Instance> instances_;
  std::vector<std::unique_ptr<Context>> contexts_;
  std::map<std::string, std::string> component_of_;
  std::map<std::string, std::vector<std::size_t>> by_component_;
  std::map<std::string, std::vector<std::size_t>> subscribers_;
  std::map<std::string, std::vector<std::size_t>> notified_;
  std::map<std::string, StructDecl> structs_;
  std::map<std::string, std::string> measurements_;
  std::vector<FeedbackState> feedback_;
  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t seq_ = 0;
  std::int64_t now_ = 0;
  SimTrace trace_;
};

std::int64_t Context::now_ms() const { return sim_.now(); }
const std::string & Context::self() const { return sim_.name_of(inst_); }
void Context::publish(const std::string & measurement, Record payload)
{
  sim_.publish_from(inst_, measurement, std::move(payload));
}
void Context::send_command(const std::string & target, const std::string & action, std::vector<Value> args)
{
  sim_.command_from(inst_, target, action, std::move(args));
}
void Context::send_request(const std::string & target, Value key)
{
  sim_.request_from(inst_, target, std::move(key));
}

}  // namespace

SimTrace run(const SimInputs & in)
{
  Simulator sim(in);
  return sim.run();
}

}  // namespace iotc
