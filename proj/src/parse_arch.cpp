#include "iotc/parser.hpp"
#include "parser_support.hpp"

namespace iotc
{

using detail::TokenStream;

namespace
{

const std::set<std::string, std::less<>> kArchKeywords{
  "computationalServices", "Common", "Custom", "consume", "generate", "request", "command",
  "COMPUTE", "window", "to", "double", "long", "String",
};

class ArchParser
{
public:
  ArchParser(TokenStream & ts, ArchSection & out) : ts_(ts), out_(out) {}

  void run()
  {
    ts_.expect_section("computationalServices");
    while (!ts_.at_end()) {
      if (ts_.at_section("Common")) {
        ts_.expect_section("Common");
        while (ts_.at_name()) parse_service(ServiceKind::Common);
      } else if (ts_.at_section("Custom")) {
        ts_.expect_section("Custom");
        while (ts_.at_name()) parse_service(ServiceKind::Custom);
      } else {
        ts_.fail_expected({"'Common:'", "'Custom:'"});
      }
    }
  }

private:
  void parse_service(ServiceKind kind)
  {
    ComputationalServiceDecl d;
    d.kind = kind;
    const Token & name = ts_.expect_name("service name");
    d.name = name.text;
    const SourceSpan span = name.span;
    detail::register_decl(ts_, out_.spans, span_key::decl("component", d.name), name, "component");

    auto mark = [&](std::string_view member, std::size_t index) {
      out_.spans.emplace(span_key::member("component", d.name, member, index), ts_.peek(1).span);
    };

    bool any = false;
    while (true) {
      if (ts_.at_keyword("consume")) {
        mark("consume", d.consumes.size());
        ts_.advance();
        ConsumeDecl c;
        c.measurement = ts_.expect_name("measurement name").text;
        if (ts_.at_keyword("window")) {
          ts_.advance();
          c.window = ts_.expect_positive_int("window size");
        }
        ts_.expect(TokenKind::Semicolon, "';'");
        d.consumes.push_back(std::move(c));
      } else if (ts_.at_keyword("generate")) {
        if (d.generates) ts_.fail(ts_.peek(), "service '" + d.name + "' already has a generate");
        mark("generate", 0);
        ts_.advance();
        MeasurementRef m;
        m.measurement = ts_.expect_name("measurement name").text;
        ts_.expect(TokenKind::Colon, "':'");
        const Token & st = ts_.expect_name("struct name");
        out_.spans.emplace(span_key::member("component", d.name, "generateStruct", 0), st.span);
        m.struct_name = st.text;
        ts_.expect(TokenKind::Semicolon, "';'");
        d.generates = std::move(m);
      } else if (ts_.at_keyword("request")) {
        mark("request", d.requests.size());
        d.requests.push_back(detail::parse_request(ts_));
      } else if (ts_.at_keyword("command")) {
        mark("command", d.commands.size());
        d.commands.push_back(detail::parse_command(ts_));
      } else if (ts_.at_keyword("COMPUTE")) {
        if (d.compute_op) ts_.fail(ts_.peek(), "service '" + d.name + "' already has a COMPUTE");
        mark("compute", 0);
        ts_.advance();
        const Token & op = ts_.expect(TokenKind::Identifier, "compute operation");
        auto parsed = parse_compute_op(op.text);
        if (!parsed) {
          ts_.fail(op, "unknown compute operation '" + op.text +
                         "' (expected AVG_BY_SAMPLE, SUM_BY_SAMPLE, COUNT_BY_SAMPLE, "
                         "MAX_BY_SAMPLE or MIN_BY_SAMPLE)");
        }
        d.compute_op = *parsed;
        if (ts_.at_kind(TokenKind::LParen)) {
          ts_.advance();
          d.compute_field = ts_.expect_name("field name").text;
          ts_.expect(TokenKind::RParen, "')'");
        }
        ts_.expect(TokenKind::Semicolon, "';'");
      } else {
        break;
      }
      any = true;
    }
    if (!any) {
      ts_.fail_expected({"'consume'", "'generate'", "'request'", "'command'", "'COMPUTE'"});
    }
    detail::report_violations(ts_, span, check_invariants(d));
    out_.services.push_back(std::move(d));
  }

  TokenStream & ts_;
  ArchSection & out_;
};

}  // namespace

Result<ArchSection> parse_arch(std::string_view source, std::string_view file)
{
  return detail::run_parser<ArchSection>(source, file, kArchKeywords,
                                         [](TokenStream & ts, ArchSection & out) {
                                           ArchParser(ts, out).run();
                                         });
}

}  // namespace iotc
