#include "iotc/logic.hpp"

#include <stdexcept>

#include "iotc/model.hpp"
#include "json.hpp"
#include "json_values.hpp"

namespace iotc
{

void StubRegistry::add(const std::string & stub_id, LogicFactory factory)
{
  factories_[stub_id] = std::move(factory);
}

std::unique_ptr<ComponentLogic> StubRegistry::create(const std::string & stub_id) const
{
  auto it = factories_.find(stub_id);
  if (it == factories_.end()) return nullptr;
  return it->second();
}

std::vector<std::string> StubRegistry::ids() const
{
  std::vector<std::string> out;
  for (const auto & [id, _] : factories_) out.push_back(id);
  return out;
}

namespace
{

std::optional<double> field_number(const Record & r, const std::string & field)
{
  if (field.empty()) {
    for (const auto & [_, v] : r.fields) {
      if (auto n = as_number(v)) return n;
    }
    return std::nullopt;
  }
  const Value * v = r.get(field);
  return v != nullptr ? as_number(*v) : std::nullopt;
}

class ReferenceHvac : public ComponentLogic
{
public:
  explicit ReferenceHvac(ReferenceHvacParams p) : p_(std::move(p)) {}

  void on_consume(LogicContext & ctx, const std::string &, std::span<const Record> window) override
  {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto & r : window) {
      if (auto v = field_number(r, p_.field)) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) return;
    const double avg = sum / static_cast<double>(n);
    if (avg < p_.low) {
      ctx.send_command(p_.target, "SetTemp", {p_.set_point});
    } else if (avg > p_.high) {
      ctx.send_command(p_.target, "Off", {});
    }
  }

private:
  ReferenceHvacParams p_;
};

class Recorder : public ComponentLogic
{
};

// Rule-driven logic from the config file.

struct Trigger
{
  std::span<const Record> window;
  const Record * record = nullptr;
};

class RuleLogic : public ComponentLogic
{
public:
  explicit RuleLogic(nlohmann::json rules) : rules_(std::move(rules)) {}

  void on_consume(LogicContext & ctx, const std::string & measurement,
                  std::span<const Record> window) override
  {
    if (window.empty()) return;
    fire(ctx, "consume", "measurement", measurement, {window, &window.back()});
  }
  void on_response(LogicContext & ctx, const std::string & target,
                   const std::optional<Record> & response) override
  {
    if (!response) return;
    fire(ctx, "response", "target", target, {std::span<const Record>(&*response, 1), &*response});
  }
  void on_notify(LogicContext & ctx, const std::string & measurement, const Record & payload) override
  {
    fire(ctx, "notify", "measurement", measurement, {std::span<const Record>(&payload, 1), &payload});
  }

private:
  static double aggregate(const std::string & op, const std::string & field, std::span<const Record> w)
  {
    if (op == "count") return static_cast<double>(w.size());
    double acc = 0.0;
    bool first = true;
    for (const auto & r : w) {
      auto v = field_number(r, field);
      if (!v) throw std::runtime_error("rule logic: non-numeric field '" + field + "'");
      if (op == "avg" || op == "sum") {
        acc += *v;
      } else if (op == "min") {
        acc = first ? *v : std::min(acc, *v);
      } else if (op == "max") {
        acc = first ? *v : std::max(acc, *v);
      } else {
        throw std::runtime_error("rule logic: unknown aggregate '" + op + "'");
      }
      first = false;
    }
    if (op == "avg" && !w.empty()) acc /= static_cast<double>(w.size());
    return acc;
  }

  // "$field" reads the triggering record, "$avg:field" (sum, min, max,
  // count) aggregates the window, "$now" is the virtual time; anything else
  // is a literal.
  static Value expand(const nlohmann::json & j, const Trigger & t, const LogicContext & ctx)
  {
    if (j.is_string()) {
      const auto s = j.get<std::string>();
      if (s.size() > 1 && s[0] == '$') {
        const std::string ref = s.substr(1);
        if (ref == "now") return Value{static_cast<std::int64_t>(ctx.now_ms())};
        if (auto colon = ref.find(':'); colon != std::string::npos) {
          return Value{aggregate(ref.substr(0, colon), ref.substr(colon + 1), t.window)};
        }
        if (ref == "count") return Value{static_cast<double>(t.window.size())};
        if (const Value * v = t.record->get(ref)) return *v;
        throw std::runtime_error("rule logic: trigger has no field '" + ref + "'");
      }
    }
    auto v = detail::value_from_json(j);
    if (!v) throw std::runtime_error("rule logic: unsupported value " + j.dump());
    return *v;
  }

  static bool holds(const nlohmann::json & when, const Trigger & t, const LogicContext & ctx)
  {
    const auto op = parse_comparator(when.value("op", std::string("==")));
    if (!op) throw std::runtime_error("rule logic: unknown comparator in " + when.dump());
    const Value lhs = expand(nlohmann::json("$" + when.at("field").get<std::string>()), t, ctx);
    const Value rhs = expand(when.at("value"), t, ctx);
    auto a = as_number(lhs);
    auto b = as_number(rhs);
    if (a && b) return compare(*op, *a, *b);
    if (*op != Comparator::Equal) return false;
    return lhs == rhs;
  }

  void fire(LogicContext & ctx, const char * on, const char * key, const std::string & subject,
            const Trigger & t)
  {
    for (const auto & rule : rules_) {
      if (rule.value("on", std::string()) != on) continue;
      if (rule.contains(key) && rule.at(key).get<std::string>() != subject) continue;
      if (rule.contains("when") && !holds(rule.at("when"), t, ctx)) continue;
      for (const auto & step : rule.value("do", nlohmann::json::array())) run_step(ctx, step, t);
    }
  }

  static void run_step(LogicContext & ctx, const nlohmann::json & step, const Trigger & t)
  {
    if (step.contains("command")) {
      std::vector<Value> args;
      for (const auto & a : step.value("args", nlohmann::json::array())) args.push_back(expand(a, t, ctx));
      ctx.send_command(step.at("command").get<std::string>(), step.at("action").get<std::string>(),
                       std::move(args));
    } else if (step.contains("publish")) {
      Record payload;
      for (auto it = step.at("payload").begin(); it != step.at("payload").end(); ++it) {
        payload.set(it.key(), expand(it.value(), t, ctx));
      }
      ctx.publish(step.at("publish").get<std::string>(), std::move(payload));
    } else if (step.contains("request")) {
      ctx.send_request(step.at("request").get<std::string>(), expand(step.at("key"), t, ctx));
    } else {
      throw std::runtime_error("rule logic: unknown step " + step.dump());
    }
  }

  nlohmann::json rules_;
};

}  // namespace

std::unique_ptr<ComponentLogic> make_reference_hvac(ReferenceHvacParams params)
{
  return std::make_unique<ReferenceHvac>(std::move(params));
}

std::unique_ptr<ComponentLogic> make_recorder() { return std::make_unique<Recorder>(); }

StubRegistry registry_from_config(const std::string & json_text)
{
  StubRegistry reg;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception & e) {
    throw std::runtime_error(std::string("malformed logic config: ") + e.what());
  }
  if (!doc.contains("components") || !doc.at("components").is_object()) {
    throw std::runtime_error("logic config needs a \"components\" object");
  }
  for (const auto & [id, entry] : doc.at("components").items()) {
    if (entry.contains("builtin")) {
      const auto builtin = entry.at("builtin").get<std::string>();
      if (builtin == "reference-hvac") {
        ReferenceHvacParams p;
        const auto params = entry.value("params", nlohmann::json::object());
        p.low = params.value("low", p.low);
        p.high = params.value("high", p.high);
        p.set_point = params.value("setPoint", p.set_point);
        p.target = params.value("target", p.target);
        p.field = params.value("field", p.field);
        reg.add(id, [p] { return make_reference_hvac(p); });
      } else if (builtin == "recorder") {
        reg.add(id, [] { return make_recorder(); });
      } else {
        throw std::runtime_error("unknown builtin logic '" + builtin + "' for " + id);
      }
    } else if (entry.contains("rules") && entry.at("rules").is_array()) {
      const auto rules = entry.at("rules");
      reg.add(id, [rules] { return std::make_unique<RuleLogic>(rules); });
    } else {
      throw std::runtime_error("logic entry '" + id + "' needs \"builtin\" or \"rules\"");
    }
  }
  return reg;
}

}  // namespace iotc
