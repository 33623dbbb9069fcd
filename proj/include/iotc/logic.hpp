// iotc/logic.hpp - user logic behind Custom-service and UI stubs
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "iotc/values.hpp"

namespace iotc
{

/// What logic may do. Each call is checked against the component's
/// declared routes by the runtime.
class LogicContext
{
public:
  virtual ~LogicContext() = default;
  virtual std::int64_t now_ms() const = 0;
  /// Instance name of the component running the logic.
  virtual const std::string & self() const = 0;
  virtual void publish(const std::string & measurement, Record payload) = 0;
  virtual void send_command(const std::string & target, const std::string & action,
                            std::vector<Value> args) = 0;
  virtual void send_request(const std::string & target, Value key) = 0;
};

class ComponentLogic
{
public:
  virtual ~ComponentLogic() = default;
  /// A full window of `measurement` arrived (window size 1 by default).
  virtual void on_consume(LogicContext &, const std::string & /*measurement*/,
                          std::span<const Record> /*window*/)
  {
  }
  /// Answer to an earlier send_request; empty when the key was not found.
  virtual void on_response(LogicContext &, const std::string & /*target*/,
                           const std::optional<Record> & /*response*/)
  {
  }
  virtual void on_notify(LogicContext &, const std::string & /*measurement*/, const Record & /*payload*/)
  {
  }
};

using LogicFactory = std::function<std::unique_ptr<ComponentLogic>()>;

/// Stub id -> logic factory. The runtime only reaches user logic through
/// this table.
class StubRegistry
{
public:
  void add(const std::string & stub_id, LogicFactory factory);
  bool has(const std::string & stub_id) const { return factories_.count(stub_id) != 0; }
  std::unique_ptr<ComponentLogic> create(const std::string & stub_id) const;
  std::vector<std::string> ids() const;

private:
  std::map<std::string, LogicFactory> factories_;
};

/// Built-in temperature controller: mean of `field` over the window;
/// below `low` sends SetTemp(set_point) to `target`, above `high` sends Off().
struct ReferenceHvacParams
{
  double low = 25.0;
  double high = 36.0;
  double set_point = 30.0;
  std::string target = "Heater";
  std::string field;  // empty: first numeric field of the record
};

std::unique_ptr<ComponentLogic> make_reference_hvac(ReferenceHvacParams params = {});
/// Logic that does nothing; messages it receives still show in the trace.
std::unique_ptr<ComponentLogic> make_recorder();

/// Builds a registry from a logic config (JSON document, see docs/formats.md).
/// Throws std::runtime_error on malformed configs.
StubRegistry registry_from_config(const std::string & json_text);

}  // namespace iotc
