#include "iotc/diagnostics.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace iotc
{

std::string to_string(const Diagnostic & d)
{
  std::ostringstream os;
  os << d;
  return os.str();
}

std::ostream & operator<<(std::ostream & os, const Diagnostic & d)
{
  os << (d.span.file.empty() ? "<input>" : d.span.file) << ':' << d.span.line << ':'
     << d.span.column << ": " << (d.severity == Severity::Error ? "error" : "warning") << ": "
     << d.message;
  if (!d.code.empty()) os << " [" << d.code << ']';
  return os;
}

bool has_errors(const std::vector<Diagnostic> & diags)
{
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic & d) { return d.severity == Severity::Error; });
}

std::size_t count_code(const std::vector<Diagnostic> & diags, std::string_view code)
{
  return static_cast<std::size_t>(std::count_if(
    diags.begin(), diags.end(), [&](const Diagnostic & d) { return d.code == code; }));
}

void sort_diagnostics(std::vector<Diagnostic> & diags)
{
  std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic & a, const Diagnostic & b) {
    return std::tie(a.span.file, a.span.line, a.span.column, a.code, a.message) <
           std::tie(b.span.file, b.span.line, b.span.column, b.code, b.message);
  });
}

}  // namespace iotc
