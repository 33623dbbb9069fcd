// iotc/model.hpp - typed syntax model for the four modeling languages
//
// Domain (vocab), architecture (arch), user-interaction (ui) and deployment
// (deploy) sections, plus the merged ProgramModel. Pure data: the parsers
// build these and every later stage only reads them.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "iotc/diagnostics.hpp"

namespace iotc
{

enum class PrimitiveType { Double, Long, String };

std::string_view to_string(PrimitiveType t);
std::optional<PrimitiveType> parse_primitive(std::string_view text);
inline bool is_numeric(PrimitiveType t) { return t != PrimitiveType::String; }

struct FieldDecl
{
  std::string name;
  PrimitiveType type = PrimitiveType::Double;
  bool operator==(const FieldDecl &) const = default;
};

struct StructDecl
{
  std::string name;
  std::vector<FieldDecl> fields;

  const FieldDecl * find(std::string_view field) const;
  bool operator==(const StructDecl &) const = default;
};

/// `generate <measurement> : <Struct>`
struct MeasurementRef
{
  std::string measurement;
  std::string struct_name;
  bool operator==(const MeasurementRef &) const = default;
};

/// Typed parameter, e.g. `badgeID : String`.
struct Param
{
  std::string name;
  PrimitiveType type = PrimitiveType::String;
  bool operator==(const Param &) const = default;
};

enum class Comparator { Less, LessEqual, Greater, GreaterEqual, Equal };

std::string_view to_string(Comparator c);
std::optional<Comparator> parse_comparator(std::string_view text);
bool compare(Comparator c, double lhs, double rhs);

/// Single-field predicate against a numeric literal: `smokeValue > 650`.
struct Condition
{
  std::string field;
  Comparator op = Comparator::Greater;
  double literal = 0.0;
  bool operator==(const Condition &) const = default;
};

struct PeriodicSensorDecl
{
  std::string name;
  MeasurementRef generates;
  std::uint32_t sample_period_s = 1;
  std::uint32_t duration_s = 1;
  bool operator==(const PeriodicSensorDecl &) const = default;
};

struct EventDrivenSensorDecl
{
  std::string name;
  MeasurementRef generates;
  Condition condition;
  bool operator==(const EventDrivenSensorDecl &) const = default;
};

struct RequestBasedSensorDecl
{
  std::string name;
  MeasurementRef generates;
  Param access_param;
  bool operator==(const RequestBasedSensorDecl &) const = default;
};

struct TagDecl
{
  std::string name;
  MeasurementRef generates;
  bool operator==(const TagDecl &) const = default;
};

struct ActionDecl
{
  std::string name;
  std::vector<Param> params;
  bool operator==(const ActionDecl &) const = default;
};

struct ActuatorDecl
{
  std::string name;
  std::vector<ActionDecl> actions;

  const ActionDecl * find_action(std::string_view action) const;
  bool operator==(const ActuatorDecl &) const = default;
};

struct StorageDecl
{
  std::string name;
  MeasurementRef generates;
  Param accessed_by;
  ActionDecl insert_action;
  bool operator==(const StorageDecl &) const = default;
};

enum class ServiceKind { Common, Custom };

enum class ComputeOp { AvgBySample, SumBySample, CountBySample, MaxBySample, MinBySample };

std::string_view to_string(ComputeOp op);
std::optional<ComputeOp> parse_compute_op(std::string_view text);

/// `consume <measurement> [window <n>]`
struct ConsumeDecl
{
  std::string measurement;
  std::uint32_t window = 1;
  bool operator==(const ConsumeDecl &) const = default;
};

/// `request <Target>(<param> : <type>)`
struct RequestDecl
{
  std::string target;
  Param param;
  bool operator==(const RequestDecl &) const = default;
};

/// `command <Action>(<arg>, ...) to <Target>`
struct CommandDecl
{
  std::string action;
  std::vector<std::string> args;
  std::string target;
  bool operator==(const CommandDecl &) const = default;
};

struct ComputationalServiceDecl
{
  std::string name;
  ServiceKind kind = ServiceKind::Custom;
  std::vector<ConsumeDecl> consumes;
  std::optional<MeasurementRef> generates;
  std::vector<RequestDecl> requests;
  std::vector<CommandDecl> commands;
  std::optional<ComputeOp> compute_op;
  /// Field the common operator aggregates; defaults to the first numeric
  /// field of the consumed struct.
  std::optional<std::string> compute_field;
  bool operator==(const ComputationalServiceDecl &) const = default;
};

/// `notify <measurement> from <Struct>`
struct NotifyDecl
{
  std::string measurement;
  std::string struct_name;
  bool operator==(const NotifyDecl &) const = default;
};

struct UserInteractionDecl
{
  std::string name;
  std::vector<CommandDecl> commands;
  std::vector<NotifyDecl> notifies;
  std::vector<RequestDecl> requests;
  bool operator==(const UserInteractionDecl &) const = default;
};

struct DeviceDecl
{
  std::string name;
  std::string location;
  std::vector<std::string> resources;
  std::string platform;
  std::string protocol;
  std::optional<std::string> database;
  bool operator==(const DeviceDecl &) const = default;
};

/// Spans keyed by declaration path, e.g. "sensor:TemperatureSensor" or
/// "service:RoomAvgTemp/consume#0". See span_key below.
using SpanTable = std::map<std::string, SourceSpan>;

namespace span_key
{
std::string decl(std::string_view category, std::string_view name);
std::string member(std::string_view category, std::string_view name, std::string_view member,
                   std::size_t index);
}  // namespace span_key

// Section equality compares declarations only; spans are metadata.

struct VocabSection
{
  std::vector<StructDecl> structs;
  std::vector<PeriodicSensorDecl> periodic_sensors;
  std::vector<EventDrivenSensorDecl> event_sensors;
  std::vector<RequestBasedSensorDecl> request_sensors;
  std::vector<TagDecl> tags;
  std::vector<ActuatorDecl> actuators;
  std::vector<StorageDecl> storages;
  SpanTable spans;

  const StructDecl * find_struct(std::string_view name) const;
  bool operator==(const VocabSection & o) const;
};

struct ArchSection
{
  std::vector<ComputationalServiceDecl> services;
  SpanTable spans;

  bool operator==(const ArchSection & o) const { return services == o.services; }
};

struct UiSection
{
  std::vector<StructDecl> structs;
  std::vector<UserInteractionDecl> interactions;
  SpanTable spans;

  bool operator==(const UiSection & o) const
  {
    return structs == o.structs && interactions == o.interactions;
  }
};

struct DeploySection
{
  std::vector<DeviceDecl> devices;
  SpanTable spans;

  bool operator==(const DeploySection & o) const { return devices == o.devices; }
};

struct ProgramModel
{
  VocabSection vocab;
  ArchSection arch;
  UiSection ui;
  DeploySection deploy;

  /// Looks a span up across all four sections; falls back to an empty span
  /// in `fallback_file` when the key is unknown.
  SourceSpan span_of(const std::string & key, std::string_view fallback_file = {}) const;
  const StructDecl * find_struct(std::string_view name) const;

  bool operator==(const ProgramModel &) const = default;
};

/// Copy of the model with every top-level declaration list sorted by name.
/// Member order inside a declaration is preserved.
ProgramModel canonicalize(ProgramModel model);

enum class ComponentKind {
  PeriodicSensor,
  EventDrivenSensor,
  RequestBasedSensor,
  Tag,
  Actuator,
  Storage,
  CommonService,
  CustomService,
  UserInteraction,
};

std::string_view to_string(ComponentKind k);
std::optional<ComponentKind> parse_component_kind(std::string_view text);
inline bool is_service(ComponentKind k)
{
  return k == ComponentKind::CommonService || k == ComponentKind::CustomService;
}

// Invariant checks. Each returns the violated constraints with the name of
// the offending field; an empty list means the declaration is well formed.

struct InvariantViolation
{
  std::string field;
  std::string message;
};

std::vector<InvariantViolation> check_invariants(const StructDecl & d);
std::vector<InvariantViolation> check_invariants(const PeriodicSensorDecl & d);
/// `generated` is the struct named by `d.generates`, when it is known.
std::vector<InvariantViolation> check_invariants(const EventDrivenSensorDecl & d,
                                                 const StructDecl * generated);
std::vector<InvariantViolation> check_invariants(const ActuatorDecl & d);
std::vector<InvariantViolation> check_invariants(const StorageDecl & d);
std::vector<InvariantViolation> check_invariants(const ComputationalServiceDecl & d);
std::vector<InvariantViolation> check_invariants(const UserInteractionDecl & d);
std::vector<InvariantViolation> check_invariants(const DeviceDecl & d);

/// Allowed platform/protocol/database labels for deploy specs.
struct LabelAllowList
{
  std::vector<std::string> platforms{"NodeJS", "Android", "JavaSE"};
  std::vector<std::string> protocols{"MQTT", "HTTP", "WebSocket"};
  std::vector<std::string> databases{"MySQL", "AzureDB", "MongoDB"};
};

}  // namespace iotc
