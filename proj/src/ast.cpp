#include "minij/ast.hpp"

#include <sstream>

namespace minij {

namespace {

void printType(std::ostream& os, const ParsedType& t) {
  if (t.isArray()) {
    // Element annotations print in leading position, matching the parse rule.
    printType(os, t.elem());
    os << "[]";
    return;
  }
  if (t.ann) os << qualifier_name(*t.ann) << " ";
  os << t.name;
  if (t.diamond) {
    os << "<>";
  } else if (!t.args.empty()) {
    os << "<";
    for (size_t i = 0; i < t.args.size(); ++i) {
      if (i) os << ", ";
      printType(os, t.args[i]);
    }
    os << ">";
  }
}

void printExpr(std::ostream& os, const Expr& e);

void printArgs(std::ostream& os, const std::vector<ExprPtr>& args) {
  os << "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) os << ", ";
    printExpr(os, *args[i]);
  }
  os << ")";
}

void printExpr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case ExprKind::IntLit:
      os << static_cast<const IntLit&>(e).value;
      break;
    case ExprKind::StringLit: {
      const auto& s = static_cast<const StringLit&>(e);
      os << '"';
      for (char c : s.value) {
        switch (c) {
          case '\n': os << "\\n"; break;
          case '\t': os << "\\t"; break;
          case '\\': os << "\\\\"; break;
          case '"': os << "\\\""; break;
          default: os << c; break;
        }
      }
      os << '"';
      break;
    }
    case ExprKind::Name:
      os << static_cast<const NameExpr&>(e).name;
      break;
    case ExprKind::FieldGet: {
      const auto& f = static_cast<const FieldGetExpr&>(e);
      if (f.base)
        printExpr(os, *f.base);
      else
        os << f.baseClassName;
      os << "." << f.name;
      break;
    }
    case ExprKind::Call: {
      const auto& c = static_cast<const CallExpr&>(e);
      if (c.recv) {
        printExpr(os, *c.recv);
        os << ".";
      } else if (!c.recvClassName.empty()) {
        os << c.recvClassName << ".";
      }
      os << c.name;
      printArgs(os, c.args);
      break;
    }
    case ExprKind::Binary: {
      const auto& b = static_cast<const BinaryExpr&>(e);
      printExpr(os, *b.lhs);
      os << " + ";
      printExpr(os, *b.rhs);
      break;
    }
    case ExprKind::Cast: {
      const auto& c = static_cast<const CastExpr&>(e);
      os << "(";
      printType(os, c.type);
      os << ") ";
      printExpr(os, *c.inner);
      break;
    }
    case ExprKind::NewObject: {
      const auto& n = static_cast<const NewObjectExpr&>(e);
      os << "new ";
      printType(os, n.type);
      printArgs(os, n.args);
      break;
    }
    case ExprKind::NewArray: {
      const auto& n = static_cast<const NewArrayExpr&>(e);
      os << "new ";
      printType(os, n.elemType);
      os << "[]{";
      for (size_t i = 0; i < n.elems.size(); ++i) {
        if (i) os << ", ";
        printExpr(os, *n.elems[i]);
      }
      os << "}";
      break;
    }
    case ExprKind::ClassLit:
      os << static_cast<const ClassLitExpr&>(e).className << "::class";
      break;
    case ExprKind::Lambda: {
      const auto& l = static_cast<const LambdaExpr&>(e);
      if (l.params.size() == 1) {
        os << l.params[0];
      } else {
        os << "(";
        for (size_t i = 0; i < l.params.size(); ++i) {
          if (i) os << ", ";
          os << l.params[i];
        }
        os << ")";
      }
      os << " -> ";
      printExpr(os, *l.body);
      break;
    }
  }
}

void printStmt(std::ostream& os, const Stmt& s, int indent);

void printBody(std::ostream& os, const std::vector<StmtPtr>& body, int indent) {
  os << "{\n";
  for (const auto& s : body) printStmt(os, *s, indent + 1);
  for (int i = 0; i < indent; ++i) os << "  ";
  os << "}";
}

void printStmt(std::ostream& os, const Stmt& s, int indent) {
  for (int i = 0; i < indent; ++i) os << "  ";
  switch (s.kind) {
    case StmtKind::LocalDecl: {
      const auto& d = static_cast<const LocalDeclStmt&>(s);
      printType(os, d.type);
      os << " " << d.name << " = ";
      printExpr(os, *d.init);
      os << ";\n";
      break;
    }
    case StmtKind::Assign: {
      const auto& a = static_cast<const AssignStmt&>(s);
      os << a.name << " = ";
      printExpr(os, *a.value);
      os << ";\n";
      break;
    }
    case StmtKind::Return: {
      const auto& r = static_cast<const ReturnStmt&>(s);
      os << "return";
      if (r.value) {
        os << " ";
        printExpr(os, *r.value);
      }
      os << ";\n";
      break;
    }
    case StmtKind::ExprStmt: {
      printExpr(os, *static_cast<const ExprStmt&>(s).expr);
      os << ";\n";
      break;
    }
    case StmtKind::If: {
      const auto& f = static_cast<const IfStmt&>(s);
      os << "if (";
      printExpr(os, *f.cond);
      os << ") ";
      printBody(os, f.thenBody, indent);
      if (!f.elseBody.empty()) {
        os << " else ";
        printBody(os, f.elseBody, indent);
      }
      os << "\n";
      break;
    }
    case StmtKind::While: {
      const auto& w = static_cast<const WhileStmt&>(s);
      os << "while (";
      printExpr(os, *w.cond);
      os << ") ";
      printBody(os, w.body, indent);
      os << "\n";
      break;
    }
  }
}

}  // namespace

std::string unparse_type(const ParsedType& t) {
  std::ostringstream os;
  printType(os, t);
  return os.str();
}

std::string unparse_expr(const Expr& e) {
  std::ostringstream os;
  printExpr(os, e);
  return os.str();
}

std::string unparse(const SourceUnit& unit) {
  std::ostringstream os;
  os << "package " << unit.package << ";\n";
  for (const auto& e : unit.enums) {
    os << "\nenum " << e.name << " { ";
    for (size_t i = 0; i < e.constants.size(); ++i) {
      if (i) os << ", ";
      os << e.constants[i];
    }
    os << " }\n";
  }
  for (const auto& c : unit.classes) {
    os << "\nclass " << c.name;
    if (!c.typeParams.empty()) {
      os << "<";
      for (size_t i = 0; i < c.typeParams.size(); ++i) {
        if (i) os << ", ";
        os << c.typeParams[i];
      }
      os << ">";
    }
    if (c.extends) {
      os << " extends ";
      printType(os, *c.extends);
    }
    os << " {\n";
    for (const auto& f : c.fields) {
      os << "  ";
      if (f.isStatic) os << "static ";
      if (f.isFinal) os << "final ";
      printType(os, f.type);
      os << " " << f.name;
      if (f.init) {
        os << " = ";
        printExpr(os, *f.init);
      }
      os << ";\n";
    }
    for (const auto& m : c.methods) {
      os << "  ";
      if (m.isStatic) os << "static ";
      if (!m.typeParams.empty()) {
        os << "<";
        for (size_t i = 0; i < m.typeParams.size(); ++i) {
          if (i) os << ", ";
          os << m.typeParams[i];
        }
        os << "> ";
      }
      printType(os, m.returnType);
      os << " " << m.name << "(";
      for (size_t i = 0; i < m.params.size(); ++i) {
        if (i) os << ", ";
        printType(os, m.params[i].type);
        os << " " << m.params[i].name;
      }
      os << ") ";
      printBody(os, m.body, 1);
      os << "\n";
    }
    os << "}\n";
  }
  return os.str();
}

namespace {

bool typeEq(const ParsedType& a, const ParsedType& b) {
  if (a.ann != b.ann || a.shape != b.shape || a.name != b.name || a.diamond != b.diamond ||
      a.args.size() != b.args.size())
    return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!typeEq(a.args[i], b.args[i])) return false;
  return true;
}

bool exprEq(const Expr& a, const Expr& b);

bool exprListEq(const std::vector<ExprPtr>& a, const std::vector<ExprPtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!exprEq(*a[i], *b[i])) return false;
  return true;
}

bool exprEq(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ExprKind::IntLit:
      return static_cast<const IntLit&>(a).value == static_cast<const IntLit&>(b).value;
    case ExprKind::StringLit:
      return static_cast<const StringLit&>(a).value == static_cast<const StringLit&>(b).value;
    case ExprKind::Name:
      return static_cast<const NameExpr&>(a).name == static_cast<const NameExpr&>(b).name;
    case ExprKind::FieldGet: {
      const auto& x = static_cast<const FieldGetExpr&>(a);
      const auto& y = static_cast<const FieldGetExpr&>(b);
      if (x.name != y.name) return false;
      if (!x.base != !y.base) return false;
      return x.base ? exprEq(*x.base, *y.base) : x.baseClassName == y.baseClassName;
    }
    case ExprKind::Call: {
      const auto& x = static_cast<const CallExpr&>(a);
      const auto& y = static_cast<const CallExpr&>(b);
      if (x.name != y.name || x.recvClassName != y.recvClassName) return false;
      if (!x.recv != !y.recv) return false;
      if (x.recv && !exprEq(*x.recv, *y.recv)) return false;
      return exprListEq(x.args, y.args);
    }
    case ExprKind::Binary: {
      const auto& x = static_cast<const BinaryExpr&>(a);
      const auto& y = static_cast<const BinaryExpr&>(b);
      return exprEq(*x.lhs, *y.lhs) && exprEq(*x.rhs, *y.rhs);
    }
    case ExprKind::Cast: {
      const auto& x = static_cast<const CastExpr&>(a);
      const auto& y = static_cast<const CastExpr&>(b);
      return typeEq(x.type, y.type) && exprEq(*x.inner, *y.inner);
    }
    case ExprKind::NewObject: {
      const auto& x = static_cast<const NewObjectExpr&>(a);
      const auto& y = static_cast<const NewObjectExpr&>(b);
      return typeEq(x.type, y.type) && exprListEq(x.args, y.args);
    }
    case ExprKind::NewArray: {
      const auto& x = static_cast<const NewArrayExpr&>(a);
      const auto& y = static_cast<const NewArrayExpr&>(b);
      return typeEq(x.elemType, y.elemType) && exprListEq(x.elems, y.elems);
    }
    case ExprKind::ClassLit:
      return static_cast<const ClassLitExpr&>(a).className ==
             static_cast<const ClassLitExpr&>(b).className;
    case ExprKind::Lambda: {
      const auto& x = static_cast<const LambdaExpr&>(a);
      const auto& y = static_cast<const LambdaExpr&>(b);
      return x.params == y.params && exprEq(*x.body, *y.body);
    }
  }
  return false;
}

bool stmtEq(const Stmt& a, const Stmt& b);

bool bodyEq(const std::vector<StmtPtr>& a, const std::vector<StmtPtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!stmtEq(*a[i], *b[i])) return false;
  return true;
}

bool stmtEq(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case StmtKind::LocalDecl: {
      const auto& x = static_cast<const LocalDeclStmt&>(a);
      const auto& y = static_cast<const LocalDeclStmt&>(b);
      return x.name == y.name && typeEq(x.type, y.type) && exprEq(*x.init, *y.init);
    }
    case StmtKind::Assign: {
      const auto& x = static_cast<const AssignStmt&>(a);
      const auto& y = static_cast<const AssignStmt&>(b);
      return x.name == y.name && exprEq(*x.value, *y.value);
    }
    case StmtKind::Return: {
      const auto& x = static_cast<const ReturnStmt&>(a);
      const auto& y = static_cast<const ReturnStmt&>(b);
      if (!x.value != !y.value) return false;
      return !x.value || exprEq(*x.value, *y.value);
    }
    case StmtKind::ExprStmt:
      return exprEq(*static_cast<const ExprStmt&>(a).expr,
                    *static_cast<const ExprStmt&>(b).expr);
    case StmtKind::If: {
      const auto& x = static_cast<const IfStmt&>(a);
      const auto& y = static_cast<const IfStmt&>(b);
      return exprEq(*x.cond, *y.cond) && bodyEq(x.thenBody, y.thenBody) &&
             bodyEq(x.elseBody, y.elseBody);
    }
    case StmtKind::While: {
      const auto& x = static_cast<const WhileStmt&>(a);
      const auto& y = static_cast<const WhileStmt&>(b);
      return exprEq(*x.cond, *y.cond) && bodyEq(x.body, y.body);
    }
  }
  return false;
}

}  // namespace

bool ast_equal(const SourceUnit& a, const SourceUnit& b) {
  if (a.package != b.package) return false;
  if (a.enums.size() != b.enums.size() || a.classes.size() != b.classes.size()) return false;
  for (size_t i = 0; i < a.enums.size(); ++i) {
    if (a.enums[i].name != b.enums[i].name || a.enums[i].constants != b.enums[i].constants)
      return false;
  }
  for (size_t i = 0; i < a.classes.size(); ++i) {
    const auto& x = a.classes[i];
    const auto& y = b.classes[i];
    if (x.name != y.name || x.typeParams != y.typeParams) return false;
    if (x.extends.has_value() != y.extends.has_value()) return false;
    if (x.extends && !typeEq(*x.extends, *y.extends)) return false;
    if (x.fields.size() != y.fields.size() || x.methods.size() != y.methods.size()) return false;
    for (size_t j = 0; j < x.fields.size(); ++j) {
      const auto& f = x.fields[j];
      const auto& g = y.fields[j];
      if (f.name != g.name || f.isStatic != g.isStatic || f.isFinal != g.isFinal ||
          !typeEq(f.type, g.type))
        return false;
      if (!f.init != !g.init) return false;
      if (f.init && !exprEq(*f.init, *g.init)) return false;
    }
    for (size_t j = 0; j < x.methods.size(); ++j) {
      const auto& m = x.methods[j];
      const auto& n = y.methods[j];
      if (m.name != n.name || m.isStatic != n.isStatic || m.typeParams != n.typeParams)
        return false;
      if (!typeEq(m.returnType, n.returnType)) return false;
      if (m.params.size() != n.params.size()) return false;
      for (size_t k = 0; k < m.params.size(); ++k) {
        if (m.params[k].name != n.params[k].name ||
            !typeEq(m.params[k].type, n.params[k].type))
          return false;
      }
      if (!bodyEq(m.body, n.body)) return false;
    }
  }
  return true;
}

}  // namespace minij
