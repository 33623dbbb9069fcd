// Canonical pretty-printer. Two levels of nesting per section header, two
// spaces per level, one member per line, terminated by ';'.
#include <array>
#include <charconv>
#include <sstream>

#include "iotc/lexer.hpp"
#include "iotc/parser.hpp"

namespace iotc
{

std::string format_number(double value)
{
  std::array<char, 512> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed);
  if (ec != std::errc{}) return std::to_string(value);
  return std::string(buf.data(), end);
}

namespace
{

std::string indent(int level) { return std::string(static_cast<std::size_t>(level) * 2, ' '); }

void put_struct(std::ostringstream & os, const StructDecl & s, int level)
{
  os << indent(level) << s.name << '\n';
  for (const auto & f : s.fields) {
    os << indent(level + 1) << f.name << " : " << to_string(f.type) << ";\n";
  }
}

void put_params(std::ostringstream & os, const std::vector<Param> & params)
{
  os << '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i > 0) os << ", ";
    os << params[i].name << " : " << to_string(params[i].type);
  }
  os << ')';
}

void put_action(std::ostringstream & os, const ActionDecl & a, int level)
{
  os << indent(level) << "action " << a.name;
  put_params(os, a.params);
  os << ";\n";
}

void put_generate(std::ostringstream & os, const MeasurementRef & m)
{
  os << "generate " << m.measurement << " : " << m.struct_name;
}

void put_request(std::ostringstream & os, const RequestDecl & r, int level)
{
  os << indent(level) << "request " << r.target << '(' << r.param.name << " : "
     << to_string(r.param.type) << ");\n";
}

void put_command(std::ostringstream & os, const CommandDecl & c, int level)
{
  os << indent(level) << "command " << c.action << '(';
  for (std::size_t i = 0; i < c.args.size(); ++i) {
    if (i > 0) os << ", ";
    os << c.args[i];
  }
  os << ") to " << c.target << ";\n";
}

}  // namespace

std::string format(const VocabSection & s)
{
  std::ostringstream os;
  if (!s.structs.empty()) {
    os << "structs:\n";
    for (const auto & st : s.structs) put_struct(os, st, 1);
  }
  os << "resources:\n";
  if (!s.periodic_sensors.empty() || !s.event_sensors.empty() || !s.request_sensors.empty()) {
    os << indent(1) << "sensors:\n";
    if (!s.periodic_sensors.empty()) {
      os << indent(2) << "periodicSensors:\n";
      for (const auto & d : s.periodic_sensors) {
        os << indent(3) << d.name << '\n' << indent(4);
        put_generate(os, d.generates);
        os << ";\n"
           << indent(4) << "sample period " << d.sample_period_s << " for " << d.duration_s << ";\n";
      }
    }
    if (!s.event_sensors.empty()) {
      os << indent(2) << "eventDrivenSensors:\n";
      for (const auto & d : s.event_sensors) {
        os << indent(3) << d.name << '\n' << indent(4);
        put_generate(os, d.generates);
        os << ";\n"
           << indent(4) << "onCondition " << d.condition.field << ' ' << to_string(d.condition.op)
           << ' ' << format_number(d.condition.literal) << ";\n";
      }
    }
    if (!s.request_sensors.empty()) {
      os << indent(2) << "requestBasedSensors:\n";
      for (const auto & d : s.request_sensors) {
        os << indent(3) << d.name << '\n' << indent(4);
        put_generate(os, d.generates);
        os << " accessed-by " << d.access_param.name << " : " << to_string(d.access_param.type)
           << ";\n";
      }
    }
  }
  if (!s.tags.empty()) {
    os << indent(1) << "tags:\n";
    for (const auto & d : s.tags) {
      os << indent(2) << d.name << '\n' << indent(3);
      put_generate(os, d.generates);
      os << ";\n";
    }
  }
  if (!s.actuators.empty()) {
    os << indent(1) << "actuators:\n";
    for (const auto & d : s.actuators) {
      os << indent(2) << d.name << '\n';
      for (const auto & a : d.actions) put_action(os, a, 3);
    }
  }
  if (!s.storages.empty()) {
    os << indent(1) << "storages:\n";
    for (const auto & d : s.storages) {
      os << indent(2) << d.name << '\n' << indent(3);
      put_generate(os, d.generates);
      os << " accessed-by " << d.accessed_by.name << " : " << to_string(d.accessed_by.type) << ";\n";
      put_action(os, d.insert_action, 3);
    }
  }
  return os.str();
}

std::string format(const ArchSection & s)
{
  std::ostringstream os;
  os << "computationalServices:\n";
  for (ServiceKind kind : {ServiceKind::Common, ServiceKind::Custom}) {
    bool header = false;
    for (const auto & d : s.services) {
      if (d.kind != kind) continue;
      if (!header) {
        os << indent(1) << (kind == ServiceKind::Common ? "Common:" : "Custom:") << '\n';
        header = true;
      }
      os << indent(2) << d.name << '\n';
      for (const auto & c : d.consumes) {
        os << indent(3) << "consume " << c.measurement;
        if (c.window != 1) os << " window " << c.window;
        os << ";\n";
      }
      if (d.compute_op) {
        os << indent(3) << "COMPUTE " << to_string(*d.compute_op);
        if (d.compute_field) os << '(' << *d.compute_field << ')';
        os << ";\n";
      }
      for (const auto & r : d.requests) put_request(os, r, 3);
      if (d.generates) {
        os << indent(3);
        put_generate(os, *d.generates);
        os << ";\n";
      }
      for (const auto & c : d.commands) put_command(os, c, 3);
    }
  }
  return os.str();
}

std::string format(const UiSection & s)
{
  std::ostringstream os;
  if (!s.structs.empty()) {
    os << "structs:\n";
    for (const auto & st : s.structs) put_struct(os, st, 1);
  }
  os << "resources:\n" << indent(1) << "userInteractions:\n";
  for (const auto & d : s.interactions) {
    os << indent(2) << d.name << '\n';
    for (const auto & n : d.notifies) {
      os << indent(3) << "notify " << n.measurement << " from " << n.struct_name << ";\n";
    }
    for (const auto & c : d.commands) put_command(os, c, 3);
    for (const auto & r : d.requests) put_request(os, r, 3);
  }
  return os.str();
}

std::string format(const DeploySection & s)
{
  std::ostringstream os;
  os << "devices:\n";
  for (const auto & d : s.devices) {
    os << indent(1) << d.name << '\n';
    os << indent(2) << "location ";
    if (is_identifier(d.location)) {
      os << d.location;
    } else {
      os << '"' << d.location << '"';
    }
    os << ";\n";
    os << indent(2) << "platform " << d.platform << ";\n";
    if (!d.resources.empty()) {
      os << indent(2) << "resources ";
      for (std::size_t i = 0; i < d.resources.size(); ++i) {
        if (i > 0) os << ", ";
        os << d.resources[i];
      }
      os << ";\n";
    }
    os << indent(2) << "protocol " << d.protocol << ";\n";
    if (d.database) os << indent(2) << "database " << *d.database << ";\n";
  }
  return os.str();
}

}  // namespace iotc
