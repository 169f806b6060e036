#pragma once

#include <string>
#include <vector>

#include "minij/span.hpp"

namespace minij {

enum class Tok {
  End,
  Ident,
  Int,
  String,
  Annotation,  // @Tainted, @Untainted, @PolyTaint
  KwPackage,
  KwClass,
  KwEnum,
  KwExtends,
  KwStatic,
  KwFinal,
  KwNew,
  KwReturn,
  KwIf,
  KwElse,
  KwWhile,
  LParen,
  RParen,
  LBrace,
  RBrace,
  LBracket,
  RBracket,
  Lt,
  Gt,
  Comma,
  Semi,
  Dot,
  Assign,
  Plus,
  ColonColon,
  Arrow,
  Error,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Span span;
};

struct LexError {
  std::string message;
  Span span;
};

struct LexResult {
  std::vector<Token> tokens;  // always ends with Tok::End
  std::vector<LexError> errors;
};

LexResult lex(const std::string& text);

}  // namespace minij
