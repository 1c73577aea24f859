#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace emars::lang {

enum class Tok {
  ident,
  var,      // ?name
  symbol,   // #name
  skolem,   // _:name
  literal,  // "..", "..".@tag, <iri>, time(..), qty(..), geo(..), multi(..)
  number,
  lparen,
  rparen,
  lbrace,
  rbrace,
  lbrack,
  rbrack,
  comma,
  colon,
  semicolon,
  dot,
  at,
  eq,
  neq,
  ge,
  le,
  arrow,      // ->
  fat_arrow,  // =>
  end,
};

const char* tok_name(Tok t);

struct Token {
  Tok kind;
  std::string text;  // identifier name without sigil, literal source text, number digits
  int line;
  int column;
};

/// Splits rule/constraint source into tokens. Comments run from '%' or "//"
/// to the end of the line. Throws ParseError on stray characters.
std::vector<Token> tokenize(std::string_view text);

}  // namespace emars::lang
