#include "iotc/values.hpp"

#include <cmath>

#include "json.hpp"

namespace iotc
{

const Value * Record::get(std::string_view name) const
{
  for (const auto & [k, v] : fields) {
    if (k == name) return &v;
  }
  return nullptr;
}

void Record::set(const std::string & name, Value v)
{
  for (auto & [k, old] : fields) {
    if (k == name) {
      old = std::move(v);
      return;
    }
  }
  fields.emplace_back(name, std::move(v));
}

std::optional<double> as_number(const Value & v)
{
  if (const auto * d = std::get_if<double>(&v)) return *d;
  if (const auto * i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::nullopt;
}

namespace
{

nlohmann::ordered_json to_json(const Value & v)
{
  if (const auto * d = std::get_if<double>(&v)) return *d;
  if (const auto * i = std::get_if<std::int64_t>(&v)) return *i;
  return std::get<std::string>(v);
}

}  // namespace

std::string value_text(const Value & v)
{
  if (const auto * s = std::get_if<std::string>(&v)) return *s;
  return to_json(v).dump();
}

std::optional<Value> coerce(const Value & v, PrimitiveType type)
{
  switch (type) {
    case PrimitiveType::String:
      if (std::holds_alternative<std::string>(v)) return v;
      return std::nullopt;
    case PrimitiveType::Double:
      if (auto n = as_number(v)) return Value{*n};
      return std::nullopt;
    case PrimitiveType::Long:
      if (std::holds_alternative<std::int64_t>(v)) return v;
      if (const auto * d = std::get_if<double>(&v)) {
        if (std::isfinite(*d) && std::floor(*d) == *d && std::fabs(*d) < 9.2e18) {
          return Value{static_cast<std::int64_t>(*d)};
        }
      }
      return std::nullopt;
  }
  return std::nullopt;
}

Record default_record(const StructDecl & s)
{
  Record r;
  for (const auto & f : s.fields) {
    switch (f.type) {
      case PrimitiveType::Double:
        r.fields.emplace_back(f.name, 0.0);
        break;
      case PrimitiveType::Long:
        r.fields.emplace_back(f.name, std::int64_t{0});
        break;
      case PrimitiveType::String:
        r.fields.emplace_back(f.name, std::string());
        break;
    }
  }
  return r;
}

std::optional<Record> conform(const Record & r, const StructDecl & s)
{
  if (r.fields.size() != s.fields.size()) return std::nullopt;
  Record out;
  for (const auto & f : s.fields) {
    const Value * v = r.get(f.name);
    if (v == nullptr) return std::nullopt;
    auto c = coerce(*v, f.type);
    if (!c) return std::nullopt;
    out.fields.emplace_back(f.name, std::move(*c));
  }
  return out;
}

std::string record_json(const Record & r)
{
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto & [k, v] : r.fields) j[k] = to_json(v);
  return j.dump();
}

std::string values_json(const std::vector<Value> & v)
{
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto & x : v) j.push_back(to_json(x));
  return j.dump();
}

}  // namespace iotc
