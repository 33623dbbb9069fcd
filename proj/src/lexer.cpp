#include "iotc/lexer.hpp"

namespace iotc
{

namespace
{
bool ident_start(char c)
{
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
bool ident_char(char c)
{
  return ident_start(c) || (c >= '0' && c <= '9') || c == '#' || c == '-';
}
bool digit(char c) { return c >= '0' && c <= '9'; }
}  // namespace

std::string_view to_string(TokenKind k)
{
  switch (k) {
    case TokenKind::Identifier:
      return "identifier";
    case TokenKind::Integer:
      return "integer";
    case TokenKind::Decimal:
      return "number";
    case TokenKind::String:
      return "string";
    case TokenKind::Colon:
      return "':'";
    case TokenKind::Semicolon:
      return "';'";
    case TokenKind::Comma:
      return "','";
    case TokenKind::LParen:
      return "'('";
    case TokenKind::RParen:
      return "')'";
    case TokenKind::Comparator:
      return "comparator";
    case TokenKind::End:
      return "end of file";
  }
  return "?";
}

bool is_identifier(std::string_view text)
{
  if (text.empty() || !ident_start(text.front())) return false;
  for (char c : text) {
    if (!ident_char(c)) return false;
  }
  return true;
}

LexResult tokenize(std::string_view source, std::string_view file)
{
  LexResult out;
  std::size_t i = 0;
  std::uint32_t line = 1;
  std::uint32_t col = 1;

  auto make_span = [&](std::uint32_t l, std::uint32_t c, std::size_t len) {
    SourceSpan s;
    s.file = std::string(file);
    s.line = l;
    s.column = c;
    s.length = static_cast<std::uint32_t>(len == 0 ? 1 : len);
    return s;
  };
  auto push = [&](TokenKind kind, std::size_t len, std::string text) {
    out.tokens.push_back(Token{kind, std::move(text), make_span(line, col, len)});
    i += len;
    col += static_cast<std::uint32_t>(len);
  };

  while (i < source.size()) {
    const char c = source[i];
    if (c == '\n') {
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
      while (i < source.size() && source[i] != '\n') {
        ++i;
        ++col;
      }
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < source.size() && ident_char(source[j])) ++j;
      push(TokenKind::Identifier, j - i, std::string(source.substr(i, j - i)));
      continue;
    }
    if (digit(c) || (c == '-' && i + 1 < source.size() && digit(source[i + 1]))) {
      std::size_t j = i + 1;
      while (j < source.size() && digit(source[j])) ++j;
      TokenKind kind = TokenKind::Integer;
      if (j + 1 < source.size() && source[j] == '.' && digit(source[j + 1])) {
        kind = TokenKind::Decimal;
        j += 1;
        while (j < source.size() && digit(source[j])) ++j;
      }
      push(kind, j - i, std::string(source.substr(i, j - i)));
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      while (j < source.size() && source[j] != '"' && source[j] != '\n') ++j;
      if (j >= source.size() || source[j] != '"') {
        out.diagnostics.push_back({Severity::Error, diag::LexError, "unterminated string literal",
                                   make_span(line, col, j - i)});
        col += static_cast<std::uint32_t>(j - i);
        i = j;
        continue;
      }
      push(TokenKind::String, j + 1 - i, std::string(source.substr(i + 1, j - i - 1)));
      continue;
    }
    switch (c) {
      case ':':
        push(TokenKind::Colon, 1, ":");
        continue;
      case ';':
        push(TokenKind::Semicolon, 1, ";");
        continue;
      case ',':
        push(TokenKind::Comma, 1, ",");
        continue;
      case '(':
        push(TokenKind::LParen, 1, "(");
        continue;
      case ')':
        push(TokenKind::RParen, 1, ")");
        continue;
      case '<':
      case '>':
        if (i + 1 < source.size() && source[i + 1] == '=') {
          push(TokenKind::Comparator, 2, std::string(source.substr(i, 2)));
        } else {
          push(TokenKind::Comparator, 1, std::string(1, c));
        }
        continue;
      case '=':
        if (i + 1 < source.size() && source[i + 1] == '=') {
          push(TokenKind::Comparator, 2, "==");
          continue;
        }
        break;
      default:
        break;
    }
    // Multi-byte UTF-8 sequences are reported once with their full length.
    std::size_t len = 1;
    const auto uc = static_cast<unsigned char>(c);
    if (uc >= 0xC0) {
      while (i + len < source.size() &&
             (static_cast<unsigned char>(source[i + len]) & 0xC0) == 0x80) {
        ++len;
      }
    }
    out.diagnostics.push_back({Severity::Error, diag::LexError,
                               "illegal character '" + std::string(source.substr(i, len)) + "'",
                               make_span(line, col, len)});
    i += len;
    col += static_cast<std::uint32_t>(len);
  }
  out.tokens.push_back(Token{TokenKind::End, "", make_span(line, col, 1)});
  return out;
}

}  // namespace iotc
