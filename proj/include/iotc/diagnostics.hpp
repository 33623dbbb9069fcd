// iotc/diagnostics.hpp - source locations and compiler diagnostics
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace iotc
{

/// Location of a token in a spec file. Line and column are 1-based byte
/// offsets; length is at least 1.
struct SourceSpan
{
  std::string file;
  std::uint32_t line = 1;
  std::uint32_t column = 1;
  std::uint32_t length = 1;

  bool operator==(const SourceSpan &) const = default;
};

enum class Severity { Error, Warning };

/// Diagnostic classes. The code is printed next to every message so tests and
/// users can tell failures apart without parsing prose.
namespace diag
{
inline constexpr const char * LexError = "LexError";
inline constexpr const char * SyntaxError = "SyntaxError";
inline constexpr const char * DuplicateName = "DuplicateName";
inline constexpr const char * InvalidDecl = "InvalidDecl";
inline constexpr const char * UnknownLabel = "UnknownLabel";
inline constexpr const char * UnresolvedStruct = "UnresolvedStruct";
inline constexpr const char * UnresolvedMeasurement = "UnresolvedMeasurement";
inline constexpr const char * UnknownAction = "UnknownAction";
inline constexpr const char * UnknownRequestTarget = "UnknownRequestTarget";
inline constexpr const char * ArityMismatch = "ArityMismatch";
inline constexpr const char * TypeMismatch = "TypeMismatch";
inline constexpr const char * UnplacedResource = "UnplacedResource";
inline constexpr const char * UnknownDeviceResource = "UnknownDeviceResource";
inline constexpr const char * MissingDatabase = "MissingDatabase";
inline constexpr const char * UnusedDatabase = "UnusedDatabase";
inline constexpr const char * MultipleProducers = "MultipleProducers";
inline constexpr const char * UnusedMeasurement = "UnusedMeasurement";
inline constexpr const char * CycleWarning = "CycleWarning";
inline constexpr const char * MissingSection = "MissingSection";
inline constexpr const char * NoEligibleDevice = "NoEligibleDevice";
inline constexpr const char * StaleMapping = "StaleMapping";
inline constexpr const char * EmptyDevice = "EmptyDevice";
}  // namespace diag

struct Diagnostic
{
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceSpan span;

  bool operator==(const Diagnostic &) const = default;
};

/// `file:line:col: severity: message [Code]`
std::string to_string(const Diagnostic & d);
std::ostream & operator<<(std::ostream & os, const Diagnostic & d);

bool has_errors(const std::vector<Diagnostic> & diags);
std::size_t count_code(const std::vector<Diagnostic> & diags, std::string_view code);

/// Stable order used for printing: file, line, column, then code.
void sort_diagnostics(std::vector<Diagnostic> & diags);

/// A parse/compile step either yields a value or a list of errors, never
/// both. Warnings may accompany a value.
template <typename T>
struct Result
{
  std::optional<T> value;
  std::vector<Diagnostic> diagnostics;

  explicit operator bool() const { return value.has_value(); }
  const T & operator*() const & { return *value; }
  T & operator*() & { return *value; }
  T && operator*() && { return std::move(*value); }
  const T * operator->() const { return &*value; }
};

}  // namespace iotc
