// iotc/sim.hpp - deterministic discrete-event runtime for linked packages
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "iotc/linker.hpp"
#include "iotc/logic.hpp"
#include "iotc/values.hpp"

namespace iotc
{

class SimError : public std::runtime_error
{
public:
  SimError(std::string code, const std::string & message)
    : std::runtime_error(message), code_(std::move(code))
  {
  }
  const std::string & code() const { return code_; }

private:
  std::string code_;
};

namespace sim_error
{
inline constexpr const char * MissingLogic = "MissingLogic";
inline constexpr const char * MissingTrace = "MissingTrace";
inline constexpr const char * PayloadTypeError = "PayloadTypeError";
inline constexpr const char * NonNumericField = "NonNumericField";
inline constexpr const char * AmbiguousResponder = "AmbiguousResponder";
inline constexpr const char * UndeclaredRoute = "UndeclaredRoute";
inline constexpr const char * InvalidTrace = "InvalidTrace";
inline constexpr const char * InvalidFeedback = "InvalidFeedback";
inline constexpr const char * InvalidInput = "InvalidInput";
inline constexpr const char * LogicError = "LogicError";
}  // namespace sim_error

enum class MessageKind { Publish, Request, Response, Command, Notify };

std::string_view to_string(MessageKind k);

struct SimMessage
{
  std::int64_t t_ms = 0;
  MessageKind kind = MessageKind::Publish;
  std::string sender;    // instance name
  std::string receiver;  // empty for Publish
  /// Measurement for Publish/Notify/Response, action for Command, access
  /// parameter for Request.
  std::string topic;
  std::optional<Record> payload;  // empty for a Response to an unknown key
  std::vector<Value> args;        // Command arguments in declaration order

  bool operator==(const SimMessage &) const = default;
};

/// A component instance reacting to a delivered message.
struct Activation
{
  std::int64_t t_ms = 0;
  std::string instance;
  MessageKind kind = MessageKind::Publish;
  std::string topic;
  bool operator==(const Activation &) const = default;
};

struct SimTrace
{
  std::vector<SimMessage> messages;
  std::vector<Activation> activations;
  std::vector<std::string> warnings;  // NoSubscriber and similar
  bool operator==(const SimTrace &) const = default;
};

/// `t_ms kind sender topic payload`; directed messages write the topic as
/// `receiver:topic`.
std::string format_message(const SimMessage & m);
std::string format_trace(const SimTrace & t);
std::string trace_json(const SimTrace & t);

struct SensorTrace
{
  std::string sensor;
  std::vector<std::pair<std::int64_t, Record>> samples;  // strictly increasing time
};

/// CSV with a `t_ms,<field>,...` header naming every field of `s`.
SensorTrace parse_trace_csv(const std::string & sensor, const std::string & text, const StructDecl & s);

/// Seeded sample source standing in for a missing trace.
struct GeneratorSpec
{
  std::int64_t period_ms = 1000;  // sample spacing for event sensors and tags
  struct Field
  {
    double min = 0.0;
    double max = 0.0;
    std::optional<std::string> text;  // constant for String fields
  };
  std::map<std::string, Field> fields;
};

struct FeedbackResponse
{
  std::string actuator;
  std::string action;
  double rate_per_s = 0.0;
  /// Command argument the value drifts toward; none means unbounded drift.
  std::optional<std::size_t> target_arg;
};

/// Actuator commands that bend a sensor's trace. The offset starts at 0 and
/// changes at the rate of the last matching command.
struct FeedbackModel
{
  std::string sensor;
  std::string field;
  std::vector<FeedbackResponse> responses;
  double max_rate = 1.0;
};

/// component -> key text -> record. Serves storages and request sensors.
using StorageSeed = std::map<std::string, std::map<std::string, Record>>;

struct SimInputs
{
  std::vector<DevicePackage> packages;
  const StubRegistry * stubs = nullptr;
  /// Keyed by instance name ("Comp@Device") or component name.
  std::map<std::string, SensorTrace> traces;
  std::map<std::string, GeneratorSpec> generators;
  StorageSeed storage;
  std::vector<FeedbackModel> feedback;
  std::int64_t horizon_ms = 0;
  std::uint64_t seed = 0;
  /// Called for every delivered message, in trace order.
  std::function<void(const SimMessage &)> on_message;
};

/// Simulates the interval (0, horizon]. Throws SimError.
SimTrace run(const SimInputs & in);

/// Common-service operator over one full window: the last record with
/// `field` replaced by the aggregate (COUNT gives the window length).
Record compute_common(ComputeOp op, std::span<const Record> window, const std::string & field);

StorageSeed parse_storage_seed(const std::string & json_text, const std::vector<DevicePackage> & packages);
std::vector<FeedbackModel> parse_feedback(const std::string & json_text);
std::map<std::string, GeneratorSpec> parse_generators(const std::string & json_text);

/// Feedback used by the HVAC fixture: SetTemp(x) drives the temperature toward
/// x at +0.5/s, Off() drives it down at 0.2/s.
FeedbackModel reference_hvac_feedback(const std::string & sensor = "TemperatureSensor",
                                      const std::string & field = "tempValue",
                                      const std::string & actuator = "Heater");

}  // namespace iotc
