#include "iotc/model.hpp"

#include <algorithm>
#include <set>

namespace iotc
{

std::string_view to_string(PrimitiveType t)
{
  switch (t) {
    case PrimitiveType::Double:
      return "double";
    case PrimitiveType::Long:
      return "long";
    case PrimitiveType::String:
      return "String";
  }
  return "?";
}

std::optional<PrimitiveType> parse_primitive(std::string_view text)
{
  if (text == "double") return PrimitiveType::Double;
  if (text == "long") return PrimitiveType::Long;
  if (text == "String") return PrimitiveType::String;
  return std::nullopt;
}

const FieldDecl * StructDecl::find(std::string_view field) const
{
  for (const auto & f : fields) {
    if (f.name == field) return &f;
  }
  return nullptr;
}

std::string_view to_string(Comparator c)
{
  switch (c) {
    case Comparator::Less:
      return "<";
    case Comparator::LessEqual:
      return "<=";
    case Comparator::Greater:
      return ">";
    case Comparator::GreaterEqual:
      return ">=";
    case Comparator::Equal:
      return "==";
  }
  return "?";
}

std::optional<Comparator> parse_comparator(std::string_view text)
{
  if (text == "<") return Comparator::Less;
  if (text == "<=") return Comparator::LessEqual;
  if (text == ">") return Comparator::Greater;
  if (text == ">=") return Comparator::GreaterEqual;
  if (text == "==") return Comparator::Equal;
  return std::nullopt;
}

bool compare(Comparator c, double lhs, double rhs)
{
  switch (c) {
    case Comparator::Less:
      return lhs < rhs;
    case Comparator::LessEqual:
      return lhs <= rhs;
    case Comparator::Greater:
      return lhs > rhs;
    case Comparator::GreaterEqual:
      return lhs >= rhs;
    case Comparator::Equal:
      return lhs == rhs;
  }
  return false;
}

const ActionDecl * ActuatorDecl::find_action(std::string_view action) const
{
  for (const auto & a : actions) {
    if (a.name == action) return &a;
  }
  return nullptr;
}

std::string_view to_string(ComputeOp op)
{
  switch (op) {
    case ComputeOp::AvgBySample:
      return "AVG_BY_SAMPLE";
    case ComputeOp::SumBySample:
      return "SUM_BY_SAMPLE";
    case ComputeOp::CountBySample:
      return "COUNT_BY_SAMPLE";
    case ComputeOp::MaxBySample:
      return "MAX_BY_SAMPLE";
    case ComputeOp::MinBySample:
      return "MIN_BY_SAMPLE";
  }
  return "?";
}

std::optional<ComputeOp> parse_compute_op(std::string_view text)
{
  for (auto op : {ComputeOp::AvgBySample, ComputeOp::SumBySample, ComputeOp::CountBySample,
                  ComputeOp::MaxBySample, ComputeOp::MinBySample}) {
    if (to_string(op) == text) return op;
  }
  return std::nullopt;
}

namespace span_key
{
std::string decl(std::string_view category, std::string_view name)
{
  std::string key(category);
  key += ':';
  key += name;
  return key;
}

std::string member(std::string_view category, std::string_view name, std::string_view member,
                   std::size_t index)
{
  std::string key = decl(category, name);
  key += '/';
  key += member;
  key += '#';
  key += std::to_string(index);
  return key;
}
}  // namespace span_key

const StructDecl * VocabSection::find_struct(std::string_view name) const
{
  for (const auto & s : structs) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

bool VocabSection::operator==(const VocabSection & o) const
{
  return structs == o.structs && periodic_sensors == o.periodic_sensors &&
         event_sensors == o.event_sensors && request_sensors == o.request_sensors &&
         tags == o.tags && actuators == o.actuators && storages == o.storages;
}

SourceSpan ProgramModel::span_of(const std::string & key, std::string_view fallback_file) const
{
  for (const SpanTable * table : {&vocab.spans, &arch.spans, &ui.spans, &deploy.spans}) {
    if (auto it = table->find(key); it != table->end()) return it->second;
  }
  SourceSpan span;
  span.file = std::string(fallback_file);
  return span;
}

const StructDecl * ProgramModel::find_struct(std::string_view name) const
{
  if (const auto * s = vocab.find_struct(name)) return s;
  for (const auto & s : ui.structs) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

namespace
{
template <typename T>
void sort_by_name(std::vector<T> & v)
{
  std::stable_sort(v.begin(), v.end(), [](const T & a, const T & b) { return a.name < b.name; });
}
}  // namespace

ProgramModel canonicalize(ProgramModel model)
{
  sort_by_name(model.vocab.structs);
  sort_by_name(model.vocab.periodic_sensors);
  sort_by_name(model.vocab.event_sensors);
  sort_by_name(model.vocab.request_sensors);
  sort_by_name(model.vocab.tags);
  sort_by_name(model.vocab.actuators);
  sort_by_name(model.vocab.storages);
  sort_by_name(model.arch.services);
  sort_by_name(model.ui.structs);
  sort_by_name(model.ui.interactions);
  sort_by_name(model.deploy.devices);
  return model;
}

std::string_view to_string(ComponentKind k)
{
  switch (k) {
    case ComponentKind::PeriodicSensor:
      return "periodicSensor";
    case ComponentKind::EventDrivenSensor:
      return "eventDrivenSensor";
    case ComponentKind::RequestBasedSensor:
      return "requestBasedSensor";
    case ComponentKind::Tag:
      return "tag";
    case ComponentKind::Actuator:
      return "actuator";
    case ComponentKind::Storage:
      return "storage";
    case ComponentKind::CommonService:
      return "commonService";
    case ComponentKind::CustomService:
      return "customService";
    case ComponentKind::UserInteraction:
      return "userInteraction";
  }
  return "?";
}

std::optional<ComponentKind> parse_component_kind(std::string_view text)
{
  for (auto k : {ComponentKind::PeriodicSensor, ComponentKind::EventDrivenSensor,
                 ComponentKind::RequestBasedSensor, ComponentKind::Tag, ComponentKind::Actuator,
                 ComponentKind::Storage, ComponentKind::CommonService,
                 ComponentKind::CustomService, ComponentKind::UserInteraction}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Invariants

namespace
{
void check_unique_params(const std::vector<Param> & params, const std::string & where,
                         std::vector<InvariantViolation> & out)
{
  std::set<std::string> seen;
  for (const auto & p : params) {
    if (!seen.insert(p.name).second) {
      out.push_back({where, "duplicate parameter '" + p.name + "'"});
    }
  }
}
}  // namespace

std::vector<InvariantViolation> check_invariants(const StructDecl & d)
{
  std::vector<InvariantViolation> out;
  if (d.fields.empty()) {
    out.push_back({"fields", "struct '" + d.name + "' must declare at least one field"});
  }
  std::set<std::string> seen;
  for (const auto & f : d.fields) {
    if (!seen.insert(f.name).second) {
      out.push_back({"fields", "duplicate field '" + f.name + "' in struct '" + d.name + "'"});
    }
  }
  return out;
}

std::vector<InvariantViolation> check_invariants(const PeriodicSensorDecl & d)
{
  std::vector<InvariantViolation> out;
  if (d.sample_period_s < 1) {
    out.push_back({"samplePeriod", "sample period of '" + d.name + "' must be at least 1 second"});
  }
  if (d.duration_s < d.sample_period_s) {
    out.push_back({"duration", "duration of '" + d.name + "' must not be shorter than its sample period"});
  }
  return out;
}

std::vector<InvariantViolation> check_invariants(const EventDrivenSensorDecl & d,
                                                 const StructDecl * generated)
{
  std::vector<InvariantViolation> out;
  if (generated == nullptr) return out;
  const FieldDecl * f = generated->find(d.condition.field);
  if (f == nullptr) {
    out.push_back({"condition", "condition field '" + d.condition.field + "' is not a field of '" +
                                    generated->name + "'"});
  } else if (!is_numeric(f->type)) {
    out.push_back({"condition", "condition field '" + d.condition.field + "' must be numeric"});
  }
  return out;
}

std::vector<InvariantViolation> check_invariants(const ActuatorDecl & d)
{
  std::vector<InvariantViolation> out;
  if (d.actions.empty()) {
    out.push_back({"actions", "actuator '" + d.name + "' must declare at least one action"});
  }
  std::set<std::string> seen;
  for (const auto & a : d.actions) {
    if (!seen.insert(a.name).second) {
      out.push_back({"actions", "duplicate action '" + a.name + "' in actuator '" + d.name + "'"});
    }
    check_unique_params(a.params, "actions", out);
  }
  return out;
}

std::vector<InvariantViolation> check_invariants(const StorageDecl & d)
{
  std::vector<InvariantViolation> out;
  if (d.insert_action.name.empty()) {
    out.push_back({"insertAction", "storage '" + d.name + "' must declare an insert action"});
    return out;
  }
  check_unique_params(d.insert_action.params, "insertAction", out);
  bool has_key = false;
  for (const auto & p : d.insert_action.params) {
    if (p.name == d.accessed_by.name && p.type == d.accessed_by.type) has_key = true;
  }
  if (!has_key) {
    out.push_back({"insertAction", "insert action of '" + d.name + "' must take the key parameter '" +
                                       d.accessed_by.name + " : " +
                                       std::string(to_string(d.accessed_by.type)) + "'"});
  }
  return out;
}

std::vector<InvariantViolation> check_invariants(const ComputationalServiceDecl & d)
{
  std::vector<InvariantViolation> out;
  for (const auto & c : d.consumes) {
    if (c.window < 1) out.push_back({"consume", "window size must be at least 1"});
  }
  if (d.kind == ServiceKind::Common) {
    if (d.consumes.size() != 1) {
      out.push_back({"consume", "Common service takes exactly one input"});
    }
    if (!d.generates) out.push_back({"generate", "Common service must generate exactly one output"});
    if (!d.compute_op) out.push_back({"COMPUTE", "Common service requires a COMPUTE operation"});
    if (!d.requests.empty()) out.push_back({"request", "Common service cannot issue requests"});
    if (!d.commands.empty()) out.push_back({"command", "Common service cannot issue commands"});
  } else {
    if (d.consumes.empty() && d.requests.empty()) {
      out.push_back({"consume", "Custom service '" + d.name + "' needs at least one consume or request"});
    }
    if (!d.generates && d.commands.empty()) {
      out.push_back({"generate", "Custom service '" + d.name + "' needs at least one generate or command"});
    }
    if (d.compute_op) out.push_back({"COMPUTE", "COMPUTE is only allowed in Common services"});
  }
  std::set<std::string> seen;
  for (const auto & c : d.consumes) {
    if (!seen.insert(c.measurement).second) {
      out.push_back({"consume", "measurement '" + c.measurement + "' consumed twice"});
    }
  }
  return out;
}

std::vector<InvariantViolation> check_invariants(const UserInteractionDecl & d)
{
  std::vector<InvariantViolation> out;
  if (d.commands.empty() && d.notifies.empty() && d.requests.empty()) {
    out.push_back({"interactors", "interaction '" + d.name + "' must declare at least one interactor"});
  }
  return out;
}

std::vector<InvariantViolation> check_invariants(const DeviceDecl & d)
{
  std::vector<InvariantViolation> out;
  std::set<std::string> seen;
  for (const auto & r : d.resources) {
    if (!seen.insert(r).second) {
      out.push_back({"resources", "resource '" + r + "' listed twice on device '" + d.name + "'"});
    }
  }
  if (d.platform.empty()) out.push_back({"platform", "device '" + d.name + "' needs a platform"});
  if (d.protocol.empty()) out.push_back({"protocol", "device '" + d.name + "' needs a protocol"});
  return out;
}

}  // namespace iotc
