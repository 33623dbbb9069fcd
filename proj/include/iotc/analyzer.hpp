// iotc/analyzer.hpp - cross-spec semantic validation and the dataflow graph
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "iotc/diagnostics.hpp"
#include "iotc/model.hpp"

namespace iotc
{

struct TopicEntry
{
  std::string struct_name;
  std::vector<std::string> producers;  // sensors, tags, services
  std::vector<std::string> consumers;  // services
  std::vector<std::string> notified;   // user-interaction components
  bool operator==(const TopicEntry &) const = default;
};

/// A model that passed validate(). Only validate() can build one.
class ValidatedProgram
{
public:
  /// Canonicalized model: declaration lists sorted by name.
  const ProgramModel & model() const { return model_; }
  /// Content hash of the canonical formatting; see program_hash().
  const std::string & hash() const { return hash_; }

  const std::map<std::string, ComponentKind> & components() const { return components_; }
  const std::map<std::string, TopicEntry> & topics() const { return topics_; }
  /// (target, action) -> issuers (services and user interactions).
  const std::map<std::pair<std::string, std::string>, std::vector<std::string>> & command_index() const
  {
    return commands_;
  }
  /// storage or request-based sensor -> requesters.
  const std::map<std::string, std::vector<std::string>> & request_index() const { return requests_; }
  /// Non-service component -> devices it is placed on (sorted).
  const std::map<std::string, std::vector<std::string>> & placements() const { return placements_; }
  /// Service -> devices that list it in `resources` (sorted).
  const std::map<std::string, std::vector<std::string>> & pins() const { return pins_; }

  std::optional<ComponentKind> kind_of(std::string_view component) const;
  const ComputationalServiceDecl * find_service(std::string_view name) const;
  const UserInteractionDecl * find_interaction(std::string_view name) const;
  const ActuatorDecl * find_actuator(std::string_view name) const;
  const StorageDecl * find_storage(std::string_view name) const;
  const RequestBasedSensorDecl * find_request_sensor(std::string_view name) const;
  const PeriodicSensorDecl * find_periodic(std::string_view name) const;
  const EventDrivenSensorDecl * find_event(std::string_view name) const;
  const TagDecl * find_tag(std::string_view name) const;
  const DeviceDecl * find_device(std::string_view name) const;
  const StructDecl * find_struct(std::string_view name) const { return model_.find_struct(name); }
  /// Struct of the measurement `component` generates, if it generates one.
  const MeasurementRef * generated_by(std::string_view component) const;
  /// Field a Common service aggregates (explicit, or the first numeric
  /// field of its input struct).
  std::string compute_field(const ComputationalServiceDecl & service) const;

  bool operator==(const ValidatedProgram & o) const
  {
    return model_ == o.model_ && hash_ == o.hash_ && components_ == o.components_ &&
           topics_ == o.topics_ && commands_ == o.commands_ && requests_ == o.requests_ &&
           placements_ == o.placements_ && pins_ == o.pins_;
  }

private:
  ValidatedProgram() = default;
  friend Result<ValidatedProgram> validate(const ProgramModel & model);

  ProgramModel model_;
  std::string hash_;
  std::map<std::string, ComponentKind> components_;
  std::map<std::string, TopicEntry> topics_;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> commands_;
  std::map<std::string, std::vector<std::string>> requests_;
  std::map<std::string, std::vector<std::string>> placements_;
  std::map<std::string, std::vector<std::string>> pins_;
};

/// Cross-reference checks across the four sections. Errors make the result
/// empty; warnings (multiple producers, unused outputs, cycles, unused
/// database labels) accompany a successful result.
Result<ValidatedProgram> validate(const ProgramModel & model);

/// FNV-1a 64-bit hash (16 hex digits) of the canonical formatting of the
/// canonicalized model. Insensitive to declaration order and whitespace.
std::string program_hash(const ProgramModel & model);

/// Interaction modes labelling dataflow edges.
enum class InteractionMode { Periodic, EventDriven, RequestResponse, Command, Notify };

std::string_view to_string(InteractionMode m);

struct DataflowEdge
{
  std::string from;
  std::string to;
  InteractionMode mode = InteractionMode::EventDriven;
  /// Measurements for pub/sub, notify and request edges, actions for
  /// commands; comma-joined and sorted when a link carries several.
  std::string label;
  bool operator==(const DataflowEdge &) const = default;
  auto operator<=>(const DataflowEdge &) const = default;
};

struct DataflowGraph
{
  std::vector<std::string> nodes;  // sorted
  std::vector<DataflowEdge> edges;  // sorted by (from, to, mode, label)
  bool operator==(const DataflowGraph &) const = default;
};

DataflowGraph dataflow_graph(const ValidatedProgram & vp);

/// Graphviz `digraph` text; deterministic.
std::string to_dot(const DataflowGraph & g);

}  // namespace iotc
