// Recursive descent parser for MiniJ with single-token backtracking marks.
// Statements need the backtracking: `Map<String, String> m = e;` versus
// `m = e;` versus a bare call statement only diverge after a full type parse.

#include "minij/parser.hpp"

#include "minij/lexer.hpp"

namespace minij {

namespace {

class Parser {
 public:
  Parser(std::string path, const std::string& text, std::vector<Token> tokens)
      : path_(std::move(path)), text_(text), toks_(std::move(tokens)) {}

  ParseResult run() {
    ParseResult res;
    SourceUnit unit;
    unit.path = path_;
    unit.text = text_;

    expect(Tok::KwPackage, "expected 'package'");
    unit.package = parseDottedName();
    expect(Tok::Semi, "expected ';' after package name");

    while (!at(Tok::End) && !fatal_) {
      if (at(Tok::KwEnum)) {
        parseEnum(unit);
      } else if (at(Tok::KwClass)) {
        parseClass(unit);
      } else {
        error(peek().span, "expected class or enum declaration");
        break;
      }
    }

    res.errors = errors_;
    if (errors_.empty()) res.unit = std::move(unit);
    return res;
  }

 private:
  std::string path_;
  const std::string& text_;
  std::vector<Token> toks_;
  size_t pos_ = 0;
  std::vector<ParseError> errors_;
  bool fatal_ = false;

  const Token& peek(int ahead = 0) const {
    size_t i = pos_ + ahead;
    if (i >= toks_.size()) i = toks_.size() - 1;
    return toks_[i];
  }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& advance() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (at(k)) {
      advance();
      return true;
    }
    return false;
  }
  const Token& expect(Tok k, const std::string& msg) {
    if (at(k)) return advance();
    error(peek().span, msg);
    return peek();
  }
  void error(const Span& s, const std::string& msg) {
    errors_.push_back({msg, s});
    if (errors_.size() > 40) fatal_ = true;
  }

  size_t mark() const { return pos_; }
  void reset(size_t m) { pos_ = m; }

  void skipToMemberEnd() {
    int depth = 0;
    while (!at(Tok::End)) {
      if (at(Tok::LBrace)) ++depth;
      if (at(Tok::RBrace)) {
        if (depth == 0) return;
        --depth;
        advance();
        if (depth == 0) return;
        continue;
      }
      if (at(Tok::Semi) && depth == 0) {
        advance();
        return;
      }
      advance();
    }
  }

  std::string parseDottedName() {
    std::string name = expect(Tok::Ident, "expected identifier").text;
    while (at(Tok::Dot) && peek(1).kind == Tok::Ident) {
      advance();
      name += "." + advance().text;
    }
    return name;
  }

  // --- types ---

  bool looksLikeTypeStart() const {
    return at(Tok::Annotation) || at(Tok::Ident);
  }

  std::optional<ParsedType> tryParseAnnType() {
    std::optional<Qualifier> ann;
    if (at(Tok::Annotation)) {
      ann = qualifier_from_name(peek().text);
      advance();
    }
    if (!at(Tok::Ident)) return std::nullopt;
    auto base = tryParseTypeCore();
    if (!base) return std::nullopt;
    // A leading annotation on an array type binds to the element type, as in
    // Java's type-annotation syntax.
    if (ann) {
      ParsedType* p = &*base;
      while (p->isArray()) p = &p->args[0];
      if (p->ann) return std::nullopt;  // duplicate annotation
      p->ann = ann;
    }
    return base;
  }

  std::optional<ParsedType> tryParseTypeCore() {
    ParsedType t;
    const Token& nameTok = peek();
    t.name = expect(Tok::Ident, "expected type name").text;
    t.span = nameTok.span;
    t.annPos = SrcPos{nameTok.span.line, nameTok.span.col, nameTok.span.offset};
    if (at(Tok::Lt)) {
      advance();
      if (accept(Tok::Gt)) {
        t.diamond = true;
      } else {
        while (true) {
          auto arg = tryParseAnnType();
          if (!arg) return std::nullopt;
          t.args.push_back(std::move(*arg));
          if (accept(Tok::Comma)) continue;
          if (accept(Tok::Gt)) break;
          return std::nullopt;
        }
      }
      t.span = span_between(nameTok.span, toks_[pos_ - 1].span);
    }
    while (at(Tok::LBracket) && peek(1).kind == Tok::RBracket) {
      advance();
      advance();
      ParsedType arr;
      arr.shape = ParsedType::Shape::Array;
      arr.span = span_between(t.span, toks_[pos_ - 1].span);
      arr.annPos = t.annPos;
      arr.args.push_back(std::move(t));
      t = std::move(arr);
    }
    return t;
  }

  ParsedType parseAnnTypeOrError() {
    auto t = tryParseAnnType();
    if (t) return std::move(*t);
    error(peek().span, "expected type");
    ParsedType dummy;
    dummy.name = "<error>";
    dummy.span = peek().span;
    return dummy;
  }

  // --- declarations ---

  void parseEnum(SourceUnit& unit) {
    EnumDecl e;
    Span start = peek().span;
    advance();  // enum
    e.name = expect(Tok::Ident, "expected enum name").text;
    expect(Tok::LBrace, "expected '{'");
    if (!at(Tok::RBrace)) {
      e.constants.push_back(expect(Tok::Ident, "expected enum constant").text);
      while (accept(Tok::Comma))
        e.constants.push_back(expect(Tok::Ident, "expected enum constant").text);
    }
    const Token& close = expect(Tok::RBrace, "expected '}'");
    e.span = span_between(start, close.span);
    unit.enums.push_back(std::move(e));
  }

  void parseClass(SourceUnit& unit) {
    ClassDecl cls;
    Span start = peek().span;
    advance();  // class
    cls.name = expect(Tok::Ident, "expected class name").text;
    if (accept(Tok::Lt)) {
      cls.typeParams.push_back(expect(Tok::Ident, "expected type parameter").text);
      while (accept(Tok::Comma))
        cls.typeParams.push_back(expect(Tok::Ident, "expected type parameter").text);
      expect(Tok::Gt, "expected '>'");
    }
    if (accept(Tok::KwExtends)) {
      auto sup = tryParseAnnType();
      if (sup)
        cls.extends = std::move(*sup);
      else
        error(peek().span, "expected superclass type");
    }
    expect(Tok::LBrace, "expected '{'");
    while (!at(Tok::RBrace) && !at(Tok::End) && !fatal_) parseMember(cls);
    const Token& close = expect(Tok::RBrace, "expected '}' to close class");
    cls.span = span_between(start, close.span);
    unit.classes.push_back(std::move(cls));
  }

  void parseMember(ClassDecl& cls) {
    size_t before = errors_.size();
    bool isStatic = false, isFinal = false;
    Span start = peek().span;
    while (at(Tok::KwStatic) || at(Tok::KwFinal)) {
      if (at(Tok::KwStatic)) isStatic = true;
      if (at(Tok::KwFinal)) isFinal = true;
      advance();
    }

    std::vector<std::string> typeParams;
    if (accept(Tok::Lt)) {
      typeParams.push_back(expect(Tok::Ident, "expected type parameter").text);
      while (accept(Tok::Comma))
        typeParams.push_back(expect(Tok::Ident, "expected type parameter").text);
      expect(Tok::Gt, "expected '>'");
    }

    ParsedType type = parseAnnTypeOrError();
    const Token& nameTok = expect(Tok::Ident, "expected member name");

    if (at(Tok::LParen)) {
      MethodDecl m;
      m.isStatic = isStatic;
      m.typeParams = std::move(typeParams);
      m.returnType = std::move(type);
      m.name = nameTok.text;
      m.nameSpan = nameTok.span;
      advance();
      if (!at(Tok::RParen)) {
        while (true) {
          ParamDecl p;
          Span pstart = peek().span;
          p.type = parseAnnTypeOrError();
          const Token& pn = expect(Tok::Ident, "expected parameter name");
          p.name = pn.text;
          p.span = span_between(pstart, pn.span);
          m.params.push_back(std::move(p));
          if (!accept(Tok::Comma)) break;
        }
      }
      expect(Tok::RParen, "expected ')'");
      m.body = parseBlock();
      m.span = span_between(start, toks_[pos_ - 1].span);
      if (errors_.size() > before) skipRecover();
      cls.methods.push_back(std::move(m));
      return;
    }

    if (!typeParams.empty()) error(nameTok.span, "type parameters are only valid on methods");
    FieldDecl f;
    f.isStatic = isStatic;
    f.isFinal = isFinal;
    f.type = std::move(type);
    f.name = nameTok.text;
    if (accept(Tok::Assign)) f.init = parseExpr();
    const Token& semi = expect(Tok::Semi, "expected ';' after field declaration");
    f.span = span_between(start, semi.span);
    if (errors_.size() > before) skipRecover();
    cls.fields.push_back(std::move(f));
  }

  void skipRecover() {
    // Best effort: move past the broken member so later errors still surface.
    while (!at(Tok::End) && !at(Tok::Semi) && !at(Tok::RBrace)) advance();
    accept(Tok::Semi);
  }

  // --- statements ---

  std::vector<StmtPtr> parseBlock() {
    std::vector<StmtPtr> body;
    expect(Tok::LBrace, "expected '{'");
    while (!at(Tok::RBrace) && !at(Tok::End) && !fatal_) {
      size_t before = errors_.size();
      auto s = parseStmt();
      if (s) body.push_back(std::move(s));
      if (errors_.size() > before) {
        while (!at(Tok::End) && !at(Tok::Semi) && !at(Tok::RBrace)) advance();
        accept(Tok::Semi);
      }
    }
    expect(Tok::RBrace, "expected '}'");
    return body;
  }

  StmtPtr parseStmt() {
    Span start = peek().span;
    if (at(Tok::KwReturn)) {
      advance();
      auto st = std::make_unique<ReturnStmt>();
      if (!at(Tok::Semi)) st->value = parseExpr();
      const Token& semi = expect(Tok::Semi, "expected ';' after return");
      st->span = span_between(start, semi.span);
      return st;
    }
    if (at(Tok::KwIf)) {
      advance();
      auto st = std::make_unique<IfStmt>();
      expect(Tok::LParen, "expected '(' after if");
      st->cond = parseExpr();
      expect(Tok::RParen, "expected ')'");
      st->thenBody = parseBlock();
      if (accept(Tok::KwElse)) st->elseBody = parseBlock();
      st->span = span_between(start, toks_[pos_ - 1].span);
      return st;
    }
    if (at(Tok::KwWhile)) {
      advance();
      auto st = std::make_unique<WhileStmt>();
      expect(Tok::LParen, "expected '(' after while");
      st->cond = parseExpr();
      expect(Tok::RParen, "expected ')'");
      st->body = parseBlock();
      st->span = span_between(start, toks_[pos_ - 1].span);
      return st;
    }

    // Local declaration: anntype ID = expr ;
    if (looksLikeTypeStart()) {
      size_t m = mark();
      size_t errBefore = errors_.size();
      auto ty = tryParseAnnType();
      if (ty && at(Tok::Ident) && peek(1).kind == Tok::Assign) {
        auto st = std::make_unique<LocalDeclStmt>();
        st->type = std::move(*ty);
        st->name = advance().text;
        advance();  // '='
        st->init = parseExpr();
        const Token& semi = expect(Tok::Semi, "expected ';' after declaration");
        st->span = span_between(start, semi.span);
        return st;
      }
      reset(m);
      errors_.resize(errBefore);
    }

    // Assignment: ID = expr ;
    if (at(Tok::Ident) && peek(1).kind == Tok::Assign) {
      auto st = std::make_unique<AssignStmt>();
      st->name = advance().text;
      advance();  // '='
      st->value = parseExpr();
      const Token& semi = expect(Tok::Semi, "expected ';' after assignment");
      st->span = span_between(start, semi.span);
      return st;
    }

    auto st = std::make_unique<ExprStmt>();
    st->expr = parseExpr();
    const Token& semi = expect(Tok::Semi, "expected ';' after expression");
    st->span = span_between(start, semi.span);
    return st;
  }

  // --- expressions ---

  ExprPtr parseExpr() {
    ExprPtr lhs = parsePostfix();
    while (at(Tok::Plus)) {
      advance();
      auto bin = std::make_unique<BinaryExpr>();
      bin->lhs = std::move(lhs);
      bin->rhs = parsePostfix();
      bin->span = span_between(bin->lhs->span, bin->rhs->span);
      lhs = std::move(bin);
    }
    return lhs;
  }

  ExprPtr parsePostfix() {
    ExprPtr e = parsePrimary();
    while (true) {
      if (at(Tok::Dot) && peek(1).kind == Tok::Ident) {
        advance();
        const Token& nameTok = advance();
        if (at(Tok::LParen)) {
          auto call = std::make_unique<CallExpr>();
          call->recv = std::move(e);
          call->name = nameTok.text;
          call->args = parseArgs();
          call->span = span_between(call->recv->span, toks_[pos_ - 1].span);
          e = std::move(call);
        } else {
          auto fg = std::make_unique<FieldGetExpr>();
          fg->base = std::move(e);
          fg->name = nameTok.text;
          fg->span = span_between(fg->base->span, nameTok.span);
          e = std::move(fg);
        }
        continue;
      }
      break;
    }
    return e;
  }

  std::vector<ExprPtr> parseArgs() {
    std::vector<ExprPtr> args;
    expect(Tok::LParen, "expected '('");
    if (!at(Tok::RParen)) {
      args.push_back(parseExpr());
      while (accept(Tok::Comma)) args.push_back(parseExpr());
    }
    expect(Tok::RParen, "expected ')'");
    return args;
  }

  // Finds the token index just past the RParen matching an LParen at pos_.
  std::optional<size_t> afterMatchingParen() const {
    int depth = 0;
    for (size_t i = pos_; i < toks_.size(); ++i) {
      if (toks_[i].kind == Tok::LParen) ++depth;
      if (toks_[i].kind == Tok::RParen) {
        --depth;
        if (depth == 0) return i + 1;
      }
      if (toks_[i].kind == Tok::End) break;
    }
    return std::nullopt;
  }

  ExprPtr parsePrimary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::Int: {
        auto e = std::make_unique<IntLit>();
        e->value = std::stoll(advance().text);
        e->span = t.span;
        return e;
      }
      case Tok::String: {
        auto e = std::make_unique<StringLit>();
        e->value = advance().text;
        e->span = t.span;
        return e;
      }
      case Tok::KwNew:
        return parseNew();
      case Tok::Ident: {
        if (peek(1).kind == Tok::ColonColon) {
          auto e = std::make_unique<ClassLitExpr>();
          e->className = advance().text;
          advance();  // '::'
          const Token& cls = expect(Tok::KwClass, "expected 'class' after '::'");
          e->span = span_between(t.span, cls.span);
          return e;
        }
        if (peek(1).kind == Tok::Arrow) {
          auto e = std::make_unique<LambdaExpr>();
          e->params.push_back(advance().text);
          advance();  // '->'
          e->body = parseExpr();
          e->span = span_between(t.span, e->body->span);
          return e;
        }
        if (peek(1).kind == Tok::LParen) {
          auto call = std::make_unique<CallExpr>();
          call->name = advance().text;
          call->args = parseArgs();
          call->span = span_between(t.span, toks_[pos_ - 1].span);
          return call;
        }
        auto e = std::make_unique<NameExpr>();
        e->name = advance().text;
        e->span = t.span;
        return e;
      }
      case Tok::LParen: {
        auto after = afterMatchingParen();
        if (after && toks_[*after].kind == Tok::Arrow) {
          // (a, b) -> expr
          auto e = std::make_unique<LambdaExpr>();
          advance();
          while (at(Tok::Ident)) {
            e->params.push_back(advance().text);
            if (!accept(Tok::Comma)) break;
          }
          expect(Tok::RParen, "expected ')'");
          expect(Tok::Arrow, "expected '->'");
          e->body = parseExpr();
          e->span = span_between(t.span, e->body->span);
          return e;
        }
        // (anntype) expr
        advance();
        auto e = std::make_unique<CastExpr>();
        auto ty = tryParseAnnType();
        if (!ty) {
          error(peek().span, "expected type in cast");
          ParsedType dummy;
          dummy.name = "<error>";
          e->type = dummy;
        } else {
          e->type = std::move(*ty);
        }
        expect(Tok::RParen, "expected ')' after cast type");
        e->inner = parsePostfix();
        e->span = span_between(t.span, e->inner->span);
        return e;
      }
      default: {
        error(t.span, "expected expression");
        advance();
        auto e = std::make_unique<NameExpr>();
        e->name = "<error>";
        e->span = t.span;
        return e;
      }
    }
  }

  ExprPtr parseNew() {
    Span start = peek().span;
    advance();  // new
    auto ty = tryParseAnnType();
    if (!ty) {
      error(peek().span, "expected type after 'new'");
      ParsedType dummy;
      dummy.name = "<error>";
      ty = dummy;
    }
    // The type parser already folded `String[]` into an array shape; an
    // initializer brace after an array type means `new T[]{...}`.
    if (ty->isArray() && at(Tok::LBrace)) {
      auto e = std::make_unique<NewArrayExpr>();
      e->elemType = std::move(ty->args[0]);
      expect(Tok::LBrace, "expected '{' in array initializer");
      if (!at(Tok::RBrace)) {
        e->elems.push_back(parseExpr());
        while (accept(Tok::Comma)) e->elems.push_back(parseExpr());
      }
      const Token& close = expect(Tok::RBrace, "expected '}'");
      e->span = span_between(start, close.span);
      return e;
    }
    auto e = std::make_unique<NewObjectExpr>();
    e->type = std::move(*ty);
    e->args = parseArgs();
    e->span = span_between(start, toks_[pos_ - 1].span);
    return e;
  }
};

}  // namespace

ParseResult parse_unit(const std::string& path, const std::string& text) {
  LexResult lx = lex(text);
  ParseResult res;
  if (!lx.errors.empty()) {
    for (const auto& e : lx.errors) res.errors.push_back({e.message, e.span});
    return res;
  }
  Parser p(path, text, std::move(lx.tokens));
  return p.run();
}

}  // namespace minij
