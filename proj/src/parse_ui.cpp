#include "iotc/parser.hpp"
#include "parser_support.hpp"

namespace iotc
{

using detail::TokenStream;

namespace
{

const std::set<std::string, std::less<>> kUiKeywords{
  "structs", "resources", "userInteractions", "notify", "from", "command", "request", "to",
  "double", "long", "String",
};

void parse_interaction(TokenStream & ts, UiSection & out)
{
  UserInteractionDecl d;
  const Token & name = ts.expect_name("interaction name");
  d.name = name.text;
  const SourceSpan span = name.span;
  detail::register_decl(ts, out.spans, span_key::decl("component", d.name), name, "component");

  auto mark = [&](std::string_view member, std::size_t index) {
    out.spans.emplace(span_key::member("component", d.name, member, index), ts.peek(1).span);
  };
  while (true) {
    if (ts.at_keyword("notify")) {
      mark("notify", d.notifies.size());
      ts.advance();
      NotifyDecl n;
      n.measurement = ts.expect_name("measurement name").text;
      ts.expect_keyword("from");
      const Token & st = ts.expect_name("struct name");
      out.spans.emplace(span_key::member("component", d.name, "notifyStruct", d.notifies.size()),
                        st.span);
      n.struct_name = st.text;
      ts.expect(TokenKind::Semicolon, "';'");
      d.notifies.push_back(std::move(n));
    } else if (ts.at_keyword("command")) {
      mark("command", d.commands.size());
      d.commands.push_back(detail::parse_command(ts));
    } else if (ts.at_keyword("request")) {
      mark("request", d.requests.size());
      d.requests.push_back(detail::parse_request(ts));
    } else {
      break;
    }
  }
  detail::report_violations(ts, span, check_invariants(d));
  out.interactions.push_back(std::move(d));
}

}  // namespace

Result<UiSection> parse_ui(std::string_view source, std::string_view file)
{
  return detail::run_parser<UiSection>(source, file, kUiKeywords, [](TokenStream & ts, UiSection & out) {
    if (ts.at_section("structs")) {
      ts.expect_section("structs");
      while (ts.at_name()) out.structs.push_back(detail::parse_struct(ts, out.spans));
    }
    ts.expect_section("resources");
    ts.expect_section("userInteractions");
    while (ts.at_name()) parse_interaction(ts, out);
    if (!ts.at_end()) ts.fail_expected({"interaction name", "end of file"});
  });
}

}  // namespace iotc
