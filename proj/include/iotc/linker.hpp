// iotc/linker.hpp - logic stub frameworks and per-device packages
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iotc/analyzer.hpp"
#include "iotc/diagnostics.hpp"
#include "iotc/mapper.hpp"

namespace iotc
{

/// One abstract or helper operation of a stub, printed as `name(argument)`.
struct StubOperation
{
  std::string name;      // onConsume, onResponse, notifyReceived, publish, sendCommand, sendRequest
  std::string argument;  // measurement, request target, or Target.Action
  bool operator==(const StubOperation &) const = default;
};

struct StubDescriptor
{
  std::string id;  // same as the component name
  ComponentKind kind = ComponentKind::CustomService;
  std::vector<StubOperation> operations;
  bool operator==(const StubDescriptor &) const = default;
};

using StubSet = std::map<std::string, StubDescriptor>;

/// Stubs for every Custom service and user-interaction component. Common
/// services compute with a built-in operator and get none.
StubSet generate_frameworks(const ValidatedProgram & vp);

std::string format_stub(const StubDescriptor & stub);

struct Subscription
{
  std::string measurement;
  std::uint32_t window = 1;
  bool operator==(const Subscription &) const = default;
};

struct CommandRoute
{
  std::string target;
  std::string action;
  std::vector<std::string> args;  // argument names as written in arch/ui
  bool operator==(const CommandRoute &) const = default;
};

struct RequestRoute
{
  std::string target;
  Param param;
  MeasurementRef response;  // what the target answers with
  bool operator==(const RequestRoute &) const = default;
};

/// Component-specific settings the runtime needs; only the ones relevant to
/// the component kind are set.
struct ComponentSettings
{
  std::optional<std::uint32_t> sample_period_s;
  std::optional<std::uint32_t> duration_s;
  std::optional<Condition> condition;
  std::optional<Param> access_param;    // request sensors and storages
  std::vector<ActionDecl> actions;      // actuator actions, storage insert action
  std::optional<ComputeOp> compute_op;
  std::optional<std::string> compute_field;
  bool operator==(const ComponentSettings &) const = default;
};

struct ComponentBinding
{
  std::string name;
  ComponentKind kind = ComponentKind::CustomService;
  std::vector<Subscription> subscriptions;     // consumed topics
  std::vector<std::string> notifications;      // notify topics (UI)
  std::vector<std::string> publications;       // generated topics
  std::vector<CommandRoute> commands_out;
  std::vector<RequestRoute> request_routes;
  std::optional<std::string> logic_stub;       // Custom services and UI only
  std::optional<MeasurementRef> serves;        // storages and request sensors
  ComponentSettings settings;
  bool operator==(const ComponentBinding &) const = default;
};

struct DevicePackage
{
  int manifest_version = 1;
  std::string program_hash;
  std::string device;
  std::string location;
  std::string platform;
  std::string protocol;
  std::optional<std::string> database;
  std::vector<ComponentBinding> hosted;            // sorted by name
  std::vector<StructDecl> structs;                 // every struct the bindings mention
  std::map<std::string, std::string> measurements; // measurement -> struct, same scope
  bool operator==(const DevicePackage &) const = default;
};

ComponentBinding make_binding(const ValidatedProgram & vp, const std::string & component);

/// One package per device hosting at least one component (sorted by device
/// name). Fails with StaleMapping when the mapping was built from another
/// program or does not cover it; empty devices produce EmptyDevice warnings.
Result<std::vector<DevicePackage>> link(const ValidatedProgram & vp, const MappingTable & mt);

std::string package_to_json(const DevicePackage & p);
/// Throws std::runtime_error on malformed manifests.
DevicePackage package_from_json(const std::string & text);

}  // namespace iotc
