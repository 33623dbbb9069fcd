#include <algorithm>

#include "iotc/parser.hpp"
#include "parser_support.hpp"

namespace iotc
{

using detail::TokenStream;

namespace
{

const std::set<std::string, std::less<>> kDeployKeywords{
  "devices", "location", "platform", "resources", "protocol", "database",
};

bool allowed(const std::vector<std::string> & list, const std::string & label)
{
  return std::find(list.begin(), list.end(), label) != list.end();
}

std::string join(const std::vector<std::string> & items)
{
  std::string out;
  for (const auto & s : items) {
    if (!out.empty()) out += ", ";
    out += s;
  }
  return out;
}

void parse_device(TokenStream & ts, DeploySection & out, const LabelAllowList & labels)
{
  DeviceDecl d;
  const Token & name = ts.expect_name("device name");
  d.name = name.text;
  const SourceSpan span = name.span;
  detail::register_decl(ts, out.spans, span_key::decl("device", d.name), name, "device");

  bool seen_location = false;
  bool seen_platform = false;
  bool seen_protocol = false;
  bool seen_resources = false;

  auto once = [&](bool & seen, const Token & kw) {
    if (seen) ts.fail(kw, "'" + kw.text + "' given twice for device '" + d.name + "'");
    seen = true;
  };
  auto label = [&](const char * member, const std::vector<std::string> & allow,
                   const char * what) {
    const Token & t = ts.expect(TokenKind::Identifier, what);
    out.spans.emplace(span_key::member("device", d.name, member, 0), t.span);
    if (!allowed(allow, t.text)) {
      ts.error(t.span, diag::UnknownLabel,
               "unknown " + std::string(what) + " '" + t.text + "' (allowed: " + join(allow) + ")");
    }
    ts.expect(TokenKind::Semicolon, "';'");
    return t.text;
  };

  while (true) {
    if (ts.at_keyword("location")) {
      once(seen_location, ts.advance());
      const Token & t = ts.peek();
      if (t.kind != TokenKind::Identifier && t.kind != TokenKind::String) {
        ts.fail_expected({"location"});
      }
      d.location = ts.advance().text;
      ts.expect(TokenKind::Semicolon, "';'");
    } else if (ts.at_keyword("platform")) {
      once(seen_platform, ts.advance());
      d.platform = label("platform", labels.platforms, "platform");
    } else if (ts.at_keyword("protocol")) {
      once(seen_protocol, ts.advance());
      d.protocol = label("protocol", labels.protocols, "protocol");
    } else if (ts.at_keyword("database")) {
      bool seen_db = d.database.has_value();
      once(seen_db, ts.advance());
      d.database = label("database", labels.databases, "database");
    } else if (ts.at_keyword("resources")) {
      once(seen_resources, ts.advance());
      while (true) {
        const Token & r = ts.expect_name("resource name");
        out.spans.emplace(span_key::member("device", d.name, "resource", d.resources.size()), r.span);
        d.resources.push_back(r.text);
        if (!ts.at_kind(TokenKind::Comma)) break;
        ts.advance();
      }
      ts.expect(TokenKind::Semicolon, "';'");
    } else {
      break;
    }
  }
  if (!seen_location) ts.fail_expected({"'location'"});
  if (!seen_platform) ts.fail_expected({"'platform'"});
  if (!seen_protocol) ts.fail_expected({"'protocol'"});
  detail::report_violations(ts, span, check_invariants(d));
  out.devices.push_back(std::move(d));
}

}  // namespace

Result<DeploySection> parse_deploy(std::string_view source, std::string_view file,
                                   const LabelAllowList & labels)
{
  return detail::run_parser<DeploySection>(source, file, kDeployKeywords,
                                           [&](TokenStream & ts, DeploySection & out) {
                                             ts.expect_section("devices");
                                             while (ts.at_name()) parse_device(ts, out, labels);
                                             if (!ts.at_end()) {
                                               ts.fail_expected({"device name", "end of file"});
                                             }
                                           });
}

}  // namespace iotc
