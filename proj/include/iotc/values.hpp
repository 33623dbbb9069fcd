// iotc/values.hpp - runtime field values and records
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "iotc/model.hpp"

namespace iotc
{

using Value = std::variant<double, std::int64_t, std::string>;

/// Field values in struct order.
struct Record
{
  std::vector<std::pair<std::string, Value>> fields;

  const Value * get(std::string_view name) const;
  void set(const std::string & name, Value v);
  bool operator==(const Record &) const = default;
};

std::optional<double> as_number(const Value & v);
std::string value_text(const Value & v);

/// Converts `v` to `type`: numbers convert between double and long (long only
/// from integral values), strings stay strings. Empty when impossible.
std::optional<Value> coerce(const Value & v, PrimitiveType type);

/// Record shaped exactly like `s`; missing fields get 0 or "".
Record default_record(const StructDecl & s);

/// Every field of `s` present once, in order, with the declared type after
/// coercion. Empty when the record does not fit. Extra fields are rejected.
std::optional<Record> conform(const Record & r, const StructDecl & s);

/// Compact JSON object text, fields in record order.
std::string record_json(const Record & r);
std::string values_json(const std::vector<Value> & v);

}  // namespace iotc
