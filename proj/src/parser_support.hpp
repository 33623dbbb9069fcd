// Token cursor shared by the four recursive-descent parsers.
#pragma once

#include <cstdint>
#include <initializer_list>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "iotc/diagnostics.hpp"
#include "iotc/lexer.hpp"
#include "iotc/model.hpp"

namespace iotc::detail
{

/// Thrown after the first syntax error has been recorded; the parsers do not
/// attempt recovery.
struct ParseAbort
{
};

class TokenStream
{
public:
  TokenStream(std::vector<Token> tokens, std::set<std::string, std::less<>> keywords,
              std::vector<Diagnostic> & diags)
  : tokens_(std::move(tokens)), keywords_(std::move(keywords)), diags_(diags)
  {
  }

  const Token & peek(std::size_t ahead = 0) const
  {
    const std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at_end() const { return peek().kind == TokenKind::End; }
  bool at_kind(TokenKind k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
  bool at_keyword(std::string_view kw, std::size_t ahead = 0) const
  {
    const Token & t = peek(ahead);
    return t.kind == TokenKind::Identifier && t.text == kw;
  }
  /// `kw :` - a section header.
  bool at_section(std::string_view kw) const
  {
    return at_keyword(kw) && at_kind(TokenKind::Colon, 1);
  }
  /// Any keyword followed by ':'.
  bool at_any_section() const
  {
    return peek().kind == TokenKind::Identifier && is_keyword(peek().text) &&
           at_kind(TokenKind::Colon, 1);
  }
  bool is_keyword(std::string_view text) const { return keywords_.find(text) != keywords_.end(); }
  /// Identifier that is not a keyword.
  bool at_name(std::size_t ahead = 0) const
  {
    const Token & t = peek(ahead);
    return t.kind == TokenKind::Identifier && !is_keyword(t.text);
  }

  const Token & advance()
  {
    const Token & t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }

  const Token & expect(TokenKind k, std::string_view what)
  {
    if (!at_kind(k)) fail_expected({std::string(what)});
    return advance();
  }
  const Token & expect_keyword(std::string_view kw)
  {
    if (!at_keyword(kw)) fail_expected({"'" + std::string(kw) + "'"});
    return advance();
  }
  void expect_section(std::string_view kw)
  {
    expect_keyword(kw);
    expect(TokenKind::Colon, "':'");
  }
  const Token & expect_name(std::string_view what)
  {
    if (!at_name()) fail_expected({std::string(what)});
    return advance();
  }
  PrimitiveType expect_type()
  {
    const Token & t = peek();
    if (t.kind == TokenKind::Identifier) {
      if (auto p = parse_primitive(t.text)) {
        advance();
        return *p;
      }
    }
    fail_expected({"'double'", "'long'", "'String'"});
  }
  std::uint32_t expect_positive_int(std::string_view what)
  {
    const Token & t = peek();
    if (t.kind != TokenKind::Integer) fail_expected({std::string(what)});
    if (t.text.front() == '-' || t.text.size() > 9) {
      fail(t, std::string(what) + " must be a positive integer below 10^9");
    }
    const auto v = static_cast<std::uint32_t>(std::stoul(t.text));
    if (v == 0) fail(t, std::string(what) + " must be positive");
    advance();
    return v;
  }
  double expect_number()
  {
    const Token & t = peek();
    if (t.kind != TokenKind::Integer && t.kind != TokenKind::Decimal) {
      fail_expected({"number"});
    }
    advance();
    return std::stod(t.text);
  }

  [[noreturn]] void fail(const Token & at, std::string message)
  {
    diags_.push_back({Severity::Error, diag::SyntaxError, std::move(message), at.span});
    throw ParseAbort{};
  }
  [[noreturn]] void fail_expected(std::initializer_list<std::string> expected)
  {
    std::string msg = "expected ";
    std::size_t n = 0;
    for (const auto & e : expected) {
      if (n > 0) msg += (n + 1 == expected.size()) ? " or " : ", ";
      msg += e;
      ++n;
    }
    const Token & t = peek();
    msg += ", found ";
    if (t.kind == TokenKind::End) {
      msg += "end of file";
    } else if (t.kind == TokenKind::Identifier && is_keyword(t.text)) {
      msg += "keyword '" + t.text + "'";
    } else {
      msg += "'" + t.text + "'";
    }
    fail(t, std::move(msg));
  }

  void error(const SourceSpan & span, const char * code, std::string message)
  {
    diags_.push_back({Severity::Error, code, std::move(message), span});
  }
  void warning(const SourceSpan & span, const char * code, std::string message)
  {
    diags_.push_back({Severity::Warning, code, std::move(message), span});
  }

private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::set<std::string, std::less<>> keywords_;
  std::vector<Diagnostic> & diags_;
};

/// Shared driver: tokenizes, runs `body`, and enforces the value-xor-errors
/// contract.
template <typename Section, typename Body>
Result<Section> run_parser(std::string_view source, std::string_view file,
                           std::set<std::string, std::less<>> keywords, Body && body)
{
  Result<Section> result;
  LexResult lexed = tokenize(source, file);
  if (!lexed.diagnostics.empty()) {
    result.diagnostics = std::move(lexed.diagnostics);
    return result;
  }
  TokenStream ts(std::move(lexed.tokens), std::move(keywords), result.diagnostics);
  Section section;
  try {
    body(ts, section);
  } catch (const ParseAbort &) {
  }
  if (!has_errors(result.diagnostics)) result.value = std::move(section);
  return result;
}

/// Reports every violation as an InvalidDecl error at `span`.
inline void report_violations(TokenStream & ts, const SourceSpan & span,
                              const std::vector<InvariantViolation> & violations)
{
  for (const auto & v : violations) ts.error(span, diag::InvalidDecl, v.message + " (" + v.field + ")");
}

// Grammar fragments shared by several languages.

StructDecl parse_struct(TokenStream & ts, SpanTable & spans);
std::vector<Param> parse_param_list(TokenStream & ts);
RequestDecl parse_request(TokenStream & ts);
CommandDecl parse_command(TokenStream & ts);

/// Records the span of `name` under `key`; reports a DuplicateName error if
/// `key` was already present.
void register_decl(TokenStream & ts, SpanTable & spans, const std::string & key, const Token & name,
                   std::string_view what);

}  // namespace iotc::detail
