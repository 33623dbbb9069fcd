#include "parser_support.hpp"

namespace iotc::detail
{

void register_decl(TokenStream & ts, SpanTable & spans, const std::string & key, const Token & name,
                   std::string_view what)
{
  auto [it, inserted] = spans.emplace(key, name.span);
  if (!inserted) {
    ts.error(name.span, diag::DuplicateName,
             "duplicate " + std::string(what) + " '" + name.text + "' (first declared at line " +
               std::to_string(it->second.line) + ")");
  }
}

// struct := Name (field)+ ; field := Name ':' type ';'
StructDecl parse_struct(TokenStream & ts, SpanTable & spans)
{
  StructDecl decl;
  const Token & name = ts.expect_name("struct name");
  decl.name = name.text;
  const std::string key = span_key::decl("struct", decl.name);
  const bool fresh = spans.find(key) == spans.end();
  register_decl(ts, spans, key, name, "struct");
  const SourceSpan name_span = name.span;
  while (ts.at_name() && ts.at_kind(TokenKind::Colon, 1)) {
    const Token & field = ts.advance();
    FieldDecl f;
    f.name = field.text;
    const SourceSpan field_span = field.span;
    ts.expect(TokenKind::Colon, "':'");
    f.type = ts.expect_type();
    ts.expect(TokenKind::Semicolon, "';'");
    if (fresh) spans.emplace(span_key::member("struct", decl.name, "field", decl.fields.size()), field_span);
    decl.fields.push_back(std::move(f));
  }
  report_violations(ts, name_span, check_invariants(decl));
  return decl;
}

// params := '(' [ Name ':' type { ',' Name ':' type } ] ')'
std::vector<Param> parse_param_list(TokenStream & ts)
{
  std::vector<Param> params;
  ts.expect(TokenKind::LParen, "'('");
  if (!ts.at_kind(TokenKind::RParen)) {
    while (true) {
      Param p;
      p.name = ts.expect_name("parameter name").text;
      ts.expect(TokenKind::Colon, "':'");
      p.type = ts.expect_type();
      params.push_back(std::move(p));
      if (!ts.at_kind(TokenKind::Comma)) break;
      ts.advance();
    }
  }
  ts.expect(TokenKind::RParen, "')'");
  return params;
}

// request := 'request' Target '(' Name ':' type ')' ';'
RequestDecl parse_request(TokenStream & ts)
{
  RequestDecl r;
  ts.expect_keyword("request");
  r.target = ts.expect_name("request target").text;
  ts.expect(TokenKind::LParen, "'('");
  r.param.name = ts.expect_name("parameter name").text;
  ts.expect(TokenKind::Colon, "':'");
  r.param.type = ts.expect_type();
  ts.expect(TokenKind::RParen, "')'");
  ts.expect(TokenKind::Semicolon, "';'");
  return r;
}

// command := 'command' Action '(' [ Name { ',' Name } ] ')' 'to' Target ';'
CommandDecl parse_command(TokenStream & ts)
{
  CommandDecl c;
  ts.expect_keyword("command");
  c.action = ts.expect_name("action name").text;
  ts.expect(TokenKind::LParen, "'('");
  if (!ts.at_kind(TokenKind::RParen)) {
    while (true) {
      c.args.push_back(ts.expect_name("argument name").text);
      if (!ts.at_kind(TokenKind::Comma)) break;
      ts.advance();
    }
  }
  ts.expect(TokenKind::RParen, "')'");
  ts.expect_keyword("to");
  c.target = ts.expect_name("command target").text;
  ts.expect(TokenKind::Semicolon, "';'");
  return c;
}

}  // namespace iotc::detail
