#include "minij/lexer.hpp"

#include <cctype>
#include <map>

namespace minij {

namespace {

const std::map<std::string, Tok> kKeywords = {
    {"package", Tok::KwPackage}, {"class", Tok::KwClass},   {"enum", Tok::KwEnum},
    {"extends", Tok::KwExtends}, {"static", Tok::KwStatic}, {"final", Tok::KwFinal},
    {"new", Tok::KwNew},         {"return", Tok::KwReturn}, {"if", Tok::KwIf},
    {"else", Tok::KwElse},       {"while", Tok::KwWhile},
};

struct Cursor {
  const std::string& text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  bool done() const { return pos >= text.size(); }
  char peek(int ahead = 0) const {
    return pos + ahead < text.size() ? text[pos + ahead] : '\0';
  }
  char advance() {
    char c = text[pos++];
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return c;
  }
};

}  // namespace

LexResult lex(const std::string& text) {
  LexResult out;
  Cursor cur{text};

  auto startSpan = [&]() {
    Span s;
    s.line = cur.line;
    s.col = cur.col;
    s.offset = static_cast<int>(cur.pos);
    return s;
  };
  auto closeSpan = [&](Span s) {
    s.endLine = cur.line;
    s.endCol = cur.col;
    s.endOffset = static_cast<int>(cur.pos);
    return s;
  };
  auto push = [&](Tok k, std::string txt, Span s) {
    out.tokens.push_back(Token{k, std::move(txt), closeSpan(s)});
  };

  while (!cur.done()) {
    char c = cur.peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      cur.advance();
      continue;
    }
    if (c == '/' && cur.peek(1) == '/') {
      while (!cur.done() && cur.peek() != '\n') cur.advance();
      continue;
    }
    if (c == '/' && cur.peek(1) == '*') {
      Span s = startSpan();
      cur.advance();
      cur.advance();
      bool closed = false;
      while (!cur.done()) {
        if (cur.peek() == '*' && cur.peek(1) == '/') {
          cur.advance();
          cur.advance();
          closed = true;
          break;
        }
        cur.advance();
      }
      if (!closed) out.errors.push_back({"unterminated block comment", closeSpan(s)});
      continue;
    }

    Span s = startSpan();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string word;
      while (!cur.done() && (std::isalnum(static_cast<unsigned char>(cur.peek())) ||
                             cur.peek() == '_'))
        word += cur.advance();
      auto it = kKeywords.find(word);
      push(it != kKeywords.end() ? it->second : Tok::Ident, word, s);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.peek())))
        num += cur.advance();
      push(Tok::Int, num, s);
      continue;
    }
    if (c == '"') {
      cur.advance();
      std::string value;
      bool closed = false;
      while (!cur.done()) {
        char ch = cur.advance();
        if (ch == '"') {
          closed = true;
          break;
        }
        if (ch == '\\' && !cur.done()) {
          char esc = cur.advance();
          switch (esc) {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case '\\': value += '\\'; break;
            case '"': value += '"'; break;
            default: value += esc; break;
          }
          continue;
        }
        if (ch == '\n') break;
        value += ch;
      }
      if (!closed) {
        out.errors.push_back({"unterminated string literal", closeSpan(s)});
        push(Tok::Error, value, s);
      } else {
        push(Tok::String, value, s);
      }
      continue;
    }
    if (c == '@') {
      std::string word = "@";
      cur.advance();
      while (!cur.done() && std::isalnum(static_cast<unsigned char>(cur.peek())))
        word += cur.advance();
      if (word == "@Tainted" || word == "@Untainted" || word == "@PolyTaint") {
        push(Tok::Annotation, word, s);
      } else {
        out.errors.push_back({"unknown annotation " + word, closeSpan(s)});
        push(Tok::Error, word, s);
      }
      continue;
    }

    cur.advance();
    switch (c) {
      case '(': push(Tok::LParen, "(", s); break;
      case ')': push(Tok::RParen, ")", s); break;
      case '{': push(Tok::LBrace, "{", s); break;
      case '}': push(Tok::RBrace, "}", s); break;
      case '[': push(Tok::LBracket, "[", s); break;
      case ']': push(Tok::RBracket, "]", s); break;
      case '<': push(Tok::Lt, "<", s); break;
      case '>': push(Tok::Gt, ">", s); break;
      case ',': push(Tok::Comma, ",", s); break;
      case ';': push(Tok::Semi, ";", s); break;
      case '.': push(Tok::Dot, ".", s); break;
      case '+': push(Tok::Plus, "+", s); break;
      case '=': push(Tok::Assign, "=", s); break;
      case ':':
        if (cur.peek() == ':') {
          cur.advance();
          push(Tok::ColonColon, "::", s);
        } else {
          out.errors.push_back({"stray ':'", closeSpan(s)});
          push(Tok::Error, ":", s);
        }
        break;
      case '-':
        if (cur.peek() == '>') {
          cur.advance();
          push(Tok::Arrow, "->", s);
        } else {
          out.errors.push_back({"stray '-'", closeSpan(s)});
          push(Tok::Error, "-", s);
        }
        break;
      default:
        out.errors.push_back({std::string("unexpected character '") + c + "'", closeSpan(s)});
        push(Tok::Error, std::string(1, c), s);
        break;
    }
  }

  Span endSpan;
  endSpan.line = cur.line;
  endSpan.col = cur.col;
  endSpan.endLine = cur.line;
  endSpan.endCol = cur.col;
  endSpan.offset = endSpan.endOffset = static_cast<int>(cur.pos);
  out.tokens.push_back(Token{Tok::End, "", endSpan});
  return out;
}

}  // namespace minij
