#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minij/span.hpp"
#include "minij/types.hpp"

namespace minij {

// Type as written in source: annotations are optional per level, and generic
// uses may be raw or diamond. Qualification happens later, per declaration
// context.
struct ParsedType {
  enum class Shape { Named, Array };

  std::optional<Qualifier> ann;
  Shape shape = Shape::Named;
  std::string name;               // Named only
  std::vector<ParsedType> args;   // Named: type args; Array: exactly the element type
  bool diamond = false;           // explicit empty <> on a new-expression
  Span span;
  SrcPos annPos;  // where an inserted annotation would go (start of the type name)

  bool isArray() const { return shape == Shape::Array; }
  const ParsedType& elem() const { return args.at(0); }
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

enum class ExprKind {
  IntLit,
  StringLit,
  Name,
  FieldGet,
  Call,
  Binary,
  Cast,
  NewObject,
  NewArray,
  ClassLit,
  Lambda,
};

// What a bare name or a field-get resolved to.
enum class RefKind { Unresolved, Local, Param, Field, StaticField, EnumConst, ClassRef };

struct Expr {
  ExprKind kind;
  Span span;

  explicit Expr(ExprKind k) : kind(k) {}
  virtual ~Expr() = default;
};

struct IntLit : Expr {
  long long value = 0;
  IntLit() : Expr(ExprKind::IntLit) {}
};

struct StringLit : Expr {
  std::string value;
  StringLit() : Expr(ExprKind::StringLit) {}
};

struct NameExpr : Expr {
  std::string name;
  // resolution results
  RefKind ref = RefKind::Unresolved;
  int localId = -1;               // Local
  int paramIndex = -1;            // Param
  std::string ownerClass;         // Field / StaticField / ClassRef
  NameExpr() : Expr(ExprKind::Name) {}
};

struct FieldGetExpr : Expr {
  ExprPtr base;  // null once resolved to a static/enum member via a class name
  std::string baseClassName;
  std::string name;
  RefKind ref = RefKind::Unresolved;  // Field, StaticField or EnumConst
  std::string ownerClass;
  FieldGetExpr() : Expr(ExprKind::FieldGet) {}
};

struct CallExpr : Expr {
  ExprPtr recv;  // null: same-class call, or static call via class name
  std::string recvClassName;  // set when the receiver was a plain class name
  std::string name;
  std::vector<ExprPtr> args;
  // resolution results
  std::string ownerClass;
  bool staticCall = false;
  CallExpr() : Expr(ExprKind::Call) {}
};

struct BinaryExpr : Expr {
  ExprPtr lhs, rhs;
  BinaryExpr() : Expr(ExprKind::Binary) {}
};

struct CastExpr : Expr {
  ParsedType type;
  ExprPtr inner;
  CastExpr() : Expr(ExprKind::Cast) {}
};

struct NewObjectExpr : Expr {
  ParsedType type;
  std::vector<ExprPtr> args;
  NewObjectExpr() : Expr(ExprKind::NewObject) {}
};

struct NewArrayExpr : Expr {
  ParsedType elemType;
  std::vector<ExprPtr> elems;
  NewArrayExpr() : Expr(ExprKind::NewArray) {}
};

struct ClassLitExpr : Expr {
  std::string className;
  ClassLitExpr() : Expr(ExprKind::ClassLit) {}
};

struct LambdaExpr : Expr {
  std::vector<std::string> params;
  ExprPtr body;  // parsed but not taint-checked
  LambdaExpr() : Expr(ExprKind::Lambda) {}
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

enum class StmtKind { LocalDecl, Assign, Return, ExprStmt, If, While };

struct Stmt {
  StmtKind kind;
  Span span;
  explicit Stmt(StmtKind k) : kind(k) {}
  virtual ~Stmt() = default;
};

struct LocalDeclStmt : Stmt {
  ParsedType type;
  std::string name;
  ExprPtr init;
  int localId = -1;
  LocalDeclStmt() : Stmt(StmtKind::LocalDecl) {}
};

struct AssignStmt : Stmt {
  std::string name;
  ExprPtr value;
  RefKind target = RefKind::Unresolved;  // Local or Field
  int localId = -1;
  std::string ownerClass;
  AssignStmt() : Stmt(StmtKind::Assign) {}
};

struct ReturnStmt : Stmt {
  ExprPtr value;  // may be null
  ReturnStmt() : Stmt(StmtKind::Return) {}
};

struct ExprStmt : Stmt {
  ExprPtr expr;
  ExprStmt() : Stmt(StmtKind::ExprStmt) {}
};

struct IfStmt : Stmt {
  ExprPtr cond;
  std::vector<StmtPtr> thenBody, elseBody;
  IfStmt() : Stmt(StmtKind::If) {}
};

struct WhileStmt : Stmt {
  ExprPtr cond;
  std::vector<StmtPtr> body;
  WhileStmt() : Stmt(StmtKind::While) {}
};

struct ParamDecl {
  ParsedType type;
  std::string name;
  Span span;
};

struct MethodDecl {
  bool isStatic = false;
  std::vector<std::string> typeParams;
  ParsedType returnType;
  std::string name;
  std::vector<ParamDecl> params;
  std::vector<StmtPtr> body;
  Span span;      // whole declaration
  Span nameSpan;  // method name token
};

struct FieldDecl {
  bool isStatic = false;
  bool isFinal = false;
  ParsedType type;
  std::string name;
  ExprPtr init;  // may be null
  Span span;
};

struct ClassDecl {
  std::string name;
  std::vector<std::string> typeParams;
  std::optional<ParsedType> extends;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  Span span;
};

struct EnumDecl {
  std::string name;
  std::vector<std::string> constants;
  Span span;
};

struct SourceUnit {
  std::string path;
  std::string text;
  std::string package;
  std::vector<ClassDecl> classes;
  std::vector<EnumDecl> enums;
};

// Unparses the unit to valid MiniJ source. Reparsing the result yields a
// structurally identical tree (see ast_equal).
std::string unparse(const SourceUnit& unit);
std::string unparse_type(const ParsedType& t);
std::string unparse_expr(const Expr& e);

// Structural comparison ignoring spans and resolution state.
bool ast_equal(const SourceUnit& a, const SourceUnit& b);

}  // namespace minij
