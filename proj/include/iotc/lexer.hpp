// iotc/lexer.hpp - tokenizer shared by the four spec languages
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "iotc/diagnostics.hpp"

namespace iotc
{

enum class TokenKind {
  Identifier,  // [A-Za-z_][A-Za-z0-9_#-]*
  Integer,     // -?[0-9]+
  Decimal,     // -?[0-9]+\.[0-9]+
  String,      // "..." without escapes or newlines
  Colon,
  Semicolon,
  Comma,
  LParen,
  RParen,
  Comparator,  // < <= > >= ==
  End,
};

std::string_view to_string(TokenKind k);

struct Token
{
  TokenKind kind = TokenKind::End;
  std::string text;  // string literals without quotes
  SourceSpan span;
};

struct LexResult
{
  std::vector<Token> tokens;  // always terminated by an End token
  std::vector<Diagnostic> diagnostics;
};

/// Splits `source` into tokens. `//` comments and whitespace are skipped.
/// Illegal characters produce LexError diagnostics and are skipped so that
/// all of them are reported in one pass.
LexResult tokenize(std::string_view source, std::string_view file);

bool is_identifier(std::string_view text);

}  // namespace iotc
