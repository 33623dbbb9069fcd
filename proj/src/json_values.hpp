// Conversions between nlohmann::json and runtime values (internal).
#pragma once

#include <optional>

#include "iotc/values.hpp"
#include "json.hpp"

namespace iotc::detail
{

inline std::optional<Value> value_from_json(const nlohmann::json & j)
{
  if (j.is_string()) return Value{j.get<std::string>()};
  if (j.is_number_integer()) return Value{j.get<std::int64_t>()};
  if (j.is_number()) return Value{j.get<double>()};
  return std::nullopt;
}

/// Object members in document order (the json type sorts keys, so callers
/// conform the result to a struct afterwards).
inline std::optional<Record> record_from_json(const nlohmann::json & j)
{
  if (!j.is_object()) return std::nullopt;
  Record r;
  for (auto it = j.begin(); it != j.end(); ++it) {
    auto v = value_from_json(it.value());
    if (!v) return std::nullopt;
    r.fields.emplace_back(it.key(), std::move(*v));
  }
  return r;
}

}  // namespace iotc::detail
