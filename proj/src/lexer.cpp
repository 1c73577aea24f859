#include "emars/lexer.hpp"

#include <cctype>

#include "emars/error.hpp"
#include "emars/literal.hpp"

namespace emars::lang {

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::var: return "variable";
    case Tok::symbol: return "symbol";
    case Tok::skolem: return "skolem";
    case Tok::literal: return "literal";
    case Tok::number: return "number";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::lbrack: return "'['";
    case Tok::rbrack: return "']'";
    case Tok::comma: return "','";
    case Tok::colon: return "':'";
    case Tok::semicolon: return "';'";
    case Tok::dot: return "'.'";
    case Tok::at: return "'@'";
    case Tok::eq: return "'='";
    case Tok::neq: return "'!='";
    case Tok::ge: return "'>='";
    case Tok::le: return "'<='";
    case Tok::arrow: return "'->'";
    case Tok::fat_arrow: return "'=>'";
    case Tok::end: return "end of input";
  }
  return "?";
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  std::size_t line_start = 0;

  auto column = [&](std::size_t pos) { return static_cast<int>(pos - line_start) + 1; };
  auto advance_over = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) {
      if (text[k] == '\n') {
        ++line;
        line_start = k + 1;
      }
    }
  };
  auto push = [&](Tok kind, std::string s, std::size_t start) { out.push_back({kind, std::move(s), line, column(start)}); };
  auto read_name = [&](std::size_t from) {
    std::size_t j = from;
    while (j < text.size() && ident_char(text[j])) ++j;
    return j;
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      line_start = ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '%' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    const bool after_exists = !out.empty() && out.back().kind == Tok::ident && out.back().text == "exists";

    if (c == '"' || (c == '<' && !after_exists)) {
      std::size_t n = scan_value(text, i);
      if (n == 0) throw ParseError(c == '"' ? "unterminated string" : "malformed IRI", line, column(start));
      push(Tok::literal, std::string(text.substr(i, n)), start);
      advance_over(i, i + n);
      i += n;
      continue;
    }
    if (c == '_' && i + 1 < text.size() && text[i + 1] == ':') {
      std::size_t j = i + 2;
      while (j < text.size() && (ident_char(text[j]) || text[j] == '-')) ++j;
      if (j == i + 2) throw ParseError("empty skolem name", line, column(start));
      push(Tok::skolem, std::string(text.substr(i, j - i)), start);
      i = j;
      continue;
    }
    if (ident_start(c)) {
      std::size_t n = scan_value(text, i);
      if (n > 0) {
        push(Tok::literal, std::string(text.substr(i, n)), start);
        advance_over(i, i + n);
        i += n;
        continue;
      }
      std::size_t j = read_name(i);
      push(Tok::ident, std::string(text.substr(i, j - i)), start);
      i = j;
      continue;
    }
    if (c == '?' || c == '#') {
      if (i + 1 >= text.size() || !ident_start(text[i + 1])) {
        throw ParseError(std::string("expected a name after '") + c + "'", line, column(start));
      }
      std::size_t j = read_name(i + 1);
      push(c == '?' ? Tok::var : Tok::symbol, std::string(text.substr(i + 1, j - i - 1)), start);
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      push(Tok::number, std::string(text.substr(i, j - i)), start);
      i = j;
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < text.size() && text[i + 1] == b; };
    if (two('-', '>')) {
      push(Tok::arrow, "->", start);
      i += 2;
    } else if (two('=', '>')) {
      push(Tok::fat_arrow, "=>", start);
      i += 2;
    } else if (two('!', '=')) {
      push(Tok::neq, "!=", start);
      i += 2;
    } else if (two('>', '=')) {
      push(Tok::ge, ">=", start);
      i += 2;
    } else if (two('<', '=')) {
      push(Tok::le, "<=", start);
      i += 2;
    } else {
      Tok kind;
      switch (c) {
        case '(': kind = Tok::lparen; break;
        case ')': kind = Tok::rparen; break;
        case '{': kind = Tok::lbrace; break;
        case '}': kind = Tok::rbrace; break;
        case '[': kind = Tok::lbrack; break;
        case ']': kind = Tok::rbrack; break;
        case ',': kind = Tok::comma; break;
        case ':': kind = Tok::colon; break;
        case ';': kind = Tok::semicolon; break;
        case '.': kind = Tok::dot; break;
        case '@': kind = Tok::at; break;
        case '=': kind = Tok::eq; break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", line, column(start));
      }
      push(kind, std::string(1, c), start);
      ++i;
    }
  }
  out.push_back({Tok::end, "", line, column(i)});
  return out;
}

}  // namespace emars::lang
