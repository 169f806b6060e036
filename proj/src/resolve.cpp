// Name resolution: builds the program database (classes, members, stubs),
// binds every name/call/field use, and enforces the structural rules the
// checker relies on (unique members, arity-stable overrides, annotation
// placement).

#include "minij/resolve.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

namespace minij {

bool is_primitive_name(const std::string& name) {
  return name == "int" || name == "boolean" || name == "void";
}

const FieldInfo* ClassInfo::field(const std::string& n) const {
  for (const auto& f : fields)
    if (f.name == n) return &f;
  return nullptr;
}

const MethodInfo* ClassInfo::method(const std::string& n) const {
  for (const auto& m : methods)
    if (m.name == n) return &m;
  return nullptr;
}

const ClassInfo* ProgramDB::find_class(const std::string& name) const {
  auto it = classes.find(name);
  return it == classes.end() ? nullptr : &it->second;
}

const FieldInfo* ProgramDB::find_field(const std::string& cls, const std::string& name,
                                       const ClassInfo** definingOut) const {
  for (const auto& cn : super_chain(cls)) {
    const ClassInfo* ci = find_class(cn);
    if (!ci) break;
    if (const FieldInfo* f = ci->field(name)) {
      if (definingOut) *definingOut = ci;
      return f;
    }
  }
  return nullptr;
}

const MethodInfo* ProgramDB::find_method(const std::string& cls, const std::string& name,
                                         const ClassInfo** definingOut) const {
  for (const auto& cn : super_chain(cls)) {
    const ClassInfo* ci = find_class(cn);
    if (!ci) break;
    if (const MethodInfo* m = ci->method(name)) {
      if (definingOut) *definingOut = ci;
      return m;
    }
  }
  return nullptr;
}

bool ProgramDB::is_subclass(const std::string& sub, const std::string& super) const {
  for (const auto& cn : super_chain(sub))
    if (cn == super) return true;
  return false;
}

std::vector<std::string> ProgramDB::super_chain(const std::string& cls) const {
  std::vector<std::string> chain;
  std::string cur = cls;
  std::set<std::string> seen;
  while (!cur.empty() && seen.insert(cur).second) {
    chain.push_back(cur);
    const ClassInfo* ci = find_class(cur);
    if (!ci) break;
    cur = ci->superName;
  }
  return chain;
}

const std::vector<LocalInfo>& ProgramDB::locals_of(const std::string& owner,
                                                   const std::string& method) const {
  static const std::vector<LocalInfo> kEmpty;
  auto it = methodLocals.find(owner + "#" + method);
  return it == methodLocals.end() ? kEmpty : it->second;
}

std::string content_hash(const std::string& text) {
  unsigned long long h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::string ProgramDB::unit_hash(int unitIndex) const {
  return content_hash(units.at(unitIndex).text);
}

std::string ProgramDB::serialize() const {
  nlohmann::json j;
  j["classes"] = nlohmann::json::object();
  for (const auto& [name, ci] : classes) {
    nlohmann::json c;
    c["pkg"] = ci.pkg;
    c["kind"] = ci.kind == ClassInfo::Kind::Enum ? "enum" : "class";
    c["origin"] = ci.isBuiltin() ? "builtin" : "source";
    c["typeParams"] = ci.typeParams;
    c["super"] = ci.superName;
    if (ci.kind == ClassInfo::Kind::Enum) c["constants"] = ci.enumConsts;
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& f : ci.fields) {
      nlohmann::json fj;
      fj["type"] = unparse_type(f.type);
      fj["static"] = f.isStatic;
      fj["final"] = f.isFinal;
      fields[f.name] = fj;
    }
    c["fields"] = fields;
    nlohmann::json methods = nlohmann::json::object();
    for (const auto& m : ci.methods) {
      nlohmann::json mj;
      mj["return"] = unparse_type(m.returnType);
      nlohmann::json ps = nlohmann::json::array();
      for (const auto& p : m.params) ps.push_back(unparse_type(p.type));
      mj["params"] = ps;
      mj["static"] = m.isStatic;
      methods[m.name] = mj;
    }
    c["methods"] = methods;
    j["classes"][name] = c;
  }
  nlohmann::json us = nlohmann::json::array();
  for (size_t i = 0; i < units.size(); ++i) {
    nlohmann::json u;
    u["path"] = units[i].path;
    u["hash"] = content_hash(units[i].text);
    u["package"] = units[i].package;
    us.push_back(u);
  }
  j["units"] = us;
  nlohmann::json stubs = nlohmann::json::array();
  for (const auto& [k, _] : this->stubs.sigs) stubs.push_back(k);
  j["stubs"] = stubs;
  return j.dump(2);
}

namespace {

// Erased static shapes: QualifiedType reused with qualifiers ignored.
using Shape = QualifiedType;

class Resolver {
 public:
  Resolver(std::shared_ptr<ProgramDB> db) : db_(std::move(db)) {}

  std::vector<ResolveError> run() {
    loadBuiltinClasses();
    collectSourceClasses();
    if (!errors_.empty()) return errors_;
    checkHierarchy();
    checkStubs();
    for (auto& [name, ci] : db_->classes) {
      if (ci.isBuiltin()) continue;
      curFile_ = db_->units[ci.unitIndex].path;
      checkDeclaredTypes(ci);
      resolveBodies(ci);
    }
    return errors_;
  }

 private:
  std::shared_ptr<ProgramDB> db_;
  std::vector<ResolveError> errors_;
  std::string curFile_;

  void error(const Span& s, const std::string& msg) { errors_.push_back({curFile_, msg, s}); }

  void loadBuiltinClasses() {
    for (const auto& bc : load_builtins()) {
      ClassInfo ci;
      ci.name = bc.name;
      ci.pkg = bc.pkg;
      ci.origin = ClassInfo::Origin::Builtin;
      ci.typeParams = bc.typeParams;
      ci.superName = bc.superName;
      for (const auto& bm : bc.methods) {
        MethodInfo mi;
        mi.name = bm.name;
        mi.owner = bc.name;
        mi.isStatic = bm.isStatic;
        mi.returnType = bm.returnType;
        for (const auto& pt : bm.paramTypes) mi.params.push_back({pt, "", Span{}});
        ci.methods.push_back(std::move(mi));
      }
      db_->classes.emplace(ci.name, std::move(ci));
    }
  }

  void collectSourceClasses() {
    for (size_t u = 0; u < db_->units.size(); ++u) {
      SourceUnit& unit = db_->units[u];
      curFile_ = unit.path;
      for (auto& cls : unit.classes) {
        if (db_->classes.count(cls.name)) {
          error(cls.span, "duplicate class name " + cls.name);
          continue;
        }
        ClassInfo ci;
        ci.name = cls.name;
        ci.pkg = unit.package;
        ci.typeParams = cls.typeParams;
        ci.extends = cls.extends;
        if (cls.extends) ci.superName = cls.extends->name;
        ci.unitIndex = static_cast<int>(u);
        std::set<std::string> memberNames;
        for (auto& f : cls.fields) {
          if (!memberNames.insert(f.name).second)
            error(f.span, "duplicate member " + f.name + " in class " + cls.name);
          FieldInfo fi;
          fi.name = f.name;
          fi.owner = cls.name;
          fi.type = f.type;
          fi.isStatic = f.isStatic;
          fi.isFinal = f.isFinal;
          fi.init = f.init.get();
          fi.span = f.span;
          ci.fields.push_back(std::move(fi));
        }
        for (auto& m : cls.methods) {
          if (!memberNames.insert(m.name).second)
            error(m.span, "duplicate member " + m.name + " in class " + cls.name);
          MethodInfo mi;
          mi.name = m.name;
          mi.owner = cls.name;
          mi.isStatic = m.isStatic;
          mi.typeParams = m.typeParams;
          mi.returnType = m.returnType;
          for (const auto& p : m.params) mi.params.push_back({p.type, p.name, p.span});
          mi.decl = &m;
          mi.span = m.span;
          mi.nameSpan = m.nameSpan;
          ci.methods.push_back(std::move(mi));
        }
        db_->classes.emplace(ci.name, std::move(ci));
      }
      for (auto& en : unit.enums) {
        if (db_->classes.count(en.name)) {
          error(en.span, "duplicate class name " + en.name);
          continue;
        }
        ClassInfo ci;
        ci.name = en.name;
        ci.pkg = unit.package;
        ci.kind = ClassInfo::Kind::Enum;
        ci.enumConsts = en.constants;
        ci.unitIndex = static_cast<int>(u);
        db_->classes.emplace(ci.name, std::move(ci));
      }
    }
  }

  void checkHierarchy() {
    for (auto& [name, ci] : db_->classes) {
      if (ci.superName.empty()) continue;
      if (ci.unitIndex >= 0) curFile_ = db_->units[ci.unitIndex].path;
      const ClassInfo* sup = db_->find_class(ci.superName);
      Span where = ci.extends ? ci.extends->span : Span{};
      if (!sup) {
        error(where, "unknown superclass " + ci.superName);
        ci.superName.clear();
        continue;
      }
      if (sup->kind == ClassInfo::Kind::Enum) {
        error(where, "cannot extend enum " + ci.superName);
        ci.superName.clear();
        continue;
      }
      if (ci.extends && !sup->typeParams.empty() && !ci.extends->args.empty() &&
          ci.extends->args.size() != sup->typeParams.size()) {
        error(where, "wrong number of type arguments for " + ci.superName);
      }
      // cycles
      std::set<std::string> seen{name};
      std::string cur = ci.superName;
      while (!cur.empty()) {
        if (!seen.insert(cur).second) {
          error(where, "cyclic inheritance involving " + name);
          ci.superName.clear();
          break;
        }
        const ClassInfo* c = db_->find_class(cur);
        cur = c ? c->superName : "";
      }
    }
    // Override structure: same arity and same erased shapes.
    for (auto& [name, ci] : db_->classes) {
      if (ci.isBuiltin() || ci.superName.empty()) continue;
      if (ci.unitIndex >= 0) curFile_ = db_->units[ci.unitIndex].path;
      for (const auto& m : ci.methods) {
        const ClassInfo* definer = nullptr;
        const MethodInfo* overridden = db_->find_method(ci.superName, m.name, &definer);
        if (!overridden) continue;
        if (overridden->params.size() != m.params.size())
          error(m.nameSpan, "override of " + definer->name + "." + m.name +
                                " changes parameter count");
        else if (m.isStatic != overridden->isStatic)
          error(m.nameSpan, "override of " + definer->name + "." + m.name +
                                " changes staticness");
      }
    }
  }

  void checkStubs() {
    for (const auto& [id, sig] : db_->stubs.sigs) {
      const ClassInfo* ci = db_->find_class(sig.owner);
      if (!ci || ci->pkg != sig.pkg) {
        errors_.push_back({"<stubs>", "stub refers to unknown class " + sig.pkg + "." + sig.owner,
                           Span{}});
        continue;
      }
      const MethodInfo* mi = ci->method(sig.method);
      if (!mi) {
        errors_.push_back({"<stubs>", "stub refers to unknown method " + id, Span{}});
        continue;
      }
      if (mi->params.size() != sig.paramTypes.size())
        errors_.push_back({"<stubs>", "stub arity differs for " + id, Span{}});
    }
  }

  // --- declared-type validation ---

  void checkType(const ParsedType& t, const std::vector<std::string>& typeParams,
                 bool polyAllowed, const Span& where) {
    if (t.isArray()) {
      if (t.ann && *t.ann == Qualifier::PolyTaint && !polyAllowed)
        error(where, "@PolyTaint is only valid on method parameters and returns");
      checkType(t.elem(), typeParams, false, where);
      return;
    }
    if (t.ann && *t.ann == Qualifier::PolyTaint && !polyAllowed)
      error(where, "@PolyTaint is only valid on method parameters and returns");
    bool isVar = std::find(typeParams.begin(), typeParams.end(), t.name) != typeParams.end();
    if (!isVar && !is_primitive_name(t.name)) {
      const ClassInfo* ci = db_->find_class(t.name);
      if (!ci) {
        error(t.span.valid() ? t.span : where, "unknown type " + t.name);
        return;
      }
      if (!t.args.empty() && t.args.size() != ci->typeParams.size())
        error(t.span, "wrong number of type arguments for " + t.name);
      if (t.args.empty() && !t.diamond && !ci->typeParams.empty()) {
        // raw use: allowed, flagged later when a fix would need arguments
      }
    } else if (!t.args.empty()) {
      error(t.span, "type arguments on non-class type " + t.name);
    }
    for (const auto& a : t.args) checkType(a, typeParams, false, where);
  }

  std::vector<std::string> scopeParams(const ClassInfo& ci, const MethodInfo* mi) {
    std::vector<std::string> tp = ci.typeParams;
    if (mi) tp.insert(tp.end(), mi->typeParams.begin(), mi->typeParams.end());
    return tp;
  }

  void checkDeclaredTypes(ClassInfo& ci) {
    for (const auto& f : ci.fields) checkType(f.type, ci.typeParams, false, f.span);
    for (const auto& m : ci.methods) {
      auto tp = scopeParams(ci, &m);
      checkType(m.returnType, tp, true, m.nameSpan);
      for (const auto& p : m.params) checkType(p.type, tp, true, p.span);
    }
    if (ci.extends) {
      checkType(*ci.extends, ci.typeParams, false, ci.extends->span);
      if (ci.extends->ann) error(ci.extends->span, "annotations are not valid on extends");
    }
  }

  // --- body resolution ---

  struct Scope {
    std::vector<std::map<std::string, int>> blocks;
    void push() { blocks.emplace_back(); }
    void pop() { blocks.pop_back(); }
    int lookup(const std::string& n) const {
      for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
        auto f = it->find(n);
        if (f != it->end()) return f->second;
      }
      return -1;
    }
    bool declaredInCurrent(const std::string& n) const {
      return !blocks.empty() && blocks.back().count(n) > 0;
    }
    void declare(const std::string& n, int id) { blocks.back()[n] = id; }
  };

  struct BodyCtx {
    ClassInfo* cls = nullptr;
    MethodInfo* method = nullptr;  // null for field initializers
    Scope scope;
    std::vector<LocalInfo>* locals = nullptr;
    std::vector<std::string> typeParams;
  };

  void resolveBodies(ClassInfo& ci) {
    for (auto& f : ci.fields) {
      if (!f.init) continue;
      BodyCtx ctx;
      ctx.cls = &ci;
      ctx.typeParams = ci.typeParams;
      ctx.scope.push();
      resolveExpr(const_cast<Expr*>(f.init), ctx);
    }
    for (auto& m : ci.methods) {
      if (!m.decl) continue;
      BodyCtx ctx;
      ctx.cls = &ci;
      ctx.method = &m;
      ctx.typeParams = scopeParams(ci, &m);
      auto& locals = db_->methodLocals[ci.name + "#" + m.name];
      ctx.locals = &locals;
      ctx.scope.push();
      resolveBlock(const_cast<MethodDecl*>(m.decl)->body, ctx);
      ctx.scope.pop();
    }
  }

  void resolveBlock(std::vector<StmtPtr>& body, BodyCtx& ctx) {
    for (auto& s : body) resolveStmt(*s, ctx);
  }

  void resolveStmt(Stmt& s, BodyCtx& ctx) {
    switch (s.kind) {
      case StmtKind::LocalDecl: {
        auto& d = static_cast<LocalDeclStmt&>(s);
        checkType(d.type, ctx.typeParams, false, d.span);
        resolveExpr(d.init.get(), ctx);
        if (ctx.scope.declaredInCurrent(d.name) ||
            paramIndex(ctx, d.name) >= 0) {
          error(d.span, "redeclaration of " + d.name);
        }
        d.localId = static_cast<int>(ctx.locals->size());
        ctx.locals->push_back({d.name, &d});
        ctx.scope.declare(d.name, d.localId);
        break;
      }
      case StmtKind::Assign: {
        auto& a = static_cast<AssignStmt&>(s);
        resolveExpr(a.value.get(), ctx);
        int lid = ctx.scope.lookup(a.name);
        if (lid >= 0) {
          a.target = RefKind::Local;
          a.localId = lid;
          break;
        }
        if (paramIndex(ctx, a.name) >= 0) {
          error(a.span, "cannot assign to parameter " + a.name);
          break;
        }
        const ClassInfo* definer = nullptr;
        if (db_->find_field(ctx.cls->name, a.name, &definer)) {
          a.target = RefKind::Field;
          a.ownerClass = definer->name;
          break;
        }
        error(a.span, "unknown assignment target " + a.name);
        break;
      }
      case StmtKind::Return: {
        auto& r = static_cast<ReturnStmt&>(s);
        if (r.value) resolveExpr(r.value.get(), ctx);
        break;
      }
      case StmtKind::ExprStmt:
        resolveExpr(static_cast<ExprStmt&>(s).expr.get(), ctx);
        break;
      case StmtKind::If: {
        auto& f = static_cast<IfStmt&>(s);
        resolveExpr(f.cond.get(), ctx);
        ctx.scope.push();
        resolveBlock(f.thenBody, ctx);
        ctx.scope.pop();
        ctx.scope.push();
        resolveBlock(f.elseBody, ctx);
        ctx.scope.pop();
        break;
      }
      case StmtKind::While: {
        auto& w = static_cast<WhileStmt&>(s);
        resolveExpr(w.cond.get(), ctx);
        ctx.scope.push();
        resolveBlock(w.body, ctx);
        ctx.scope.pop();
        break;
      }
    }
  }

  int paramIndex(const BodyCtx& ctx, const std::string& name) {
    if (!ctx.method) return -1;
    for (size_t i = 0; i < ctx.method->params.size(); ++i)
      if (ctx.method->params[i].name == name) return static_cast<int>(i);
    return -1;
  }

  // Shape of a declared type within a class context: type variables stay as
  // TypeVar nodes; raw generic uses get their arguments erased to Object.
  Shape shapeOf(const ParsedType& t, const std::vector<std::string>& typeParams) {
    if (t.isArray()) return make_array(Qualifier::Tainted, shapeOf(t.elem(), typeParams));
    if (std::find(typeParams.begin(), typeParams.end(), t.name) != typeParams.end())
      return make_typevar(Qualifier::Tainted, t.name);
    if (is_primitive_name(t.name)) return make_primitive(Qualifier::Tainted, t.name);
    std::vector<Shape> args;
    const ClassInfo* ci = db_->find_class(t.name);
    if (!t.args.empty()) {
      for (const auto& a : t.args) args.push_back(shapeOf(a, typeParams));
    } else if (ci && !ci->typeParams.empty()) {
      for (size_t i = 0; i < ci->typeParams.size(); ++i)
        args.push_back(make_named(Qualifier::Tainted, "Object"));
    }
    return make_named(Qualifier::Tainted, t.name, std::move(args));
  }

  // Upcasts a shape to the given superclass, mapping type arguments through
  // extends clauses.
  std::optional<Shape> upcastShape(const Shape& s, const std::string& target) {
    if (!s.isNamed()) return std::nullopt;
    Shape cur = s;
    std::set<std::string> seen;
    while (cur.name != target) {
      if (!seen.insert(cur.name).second) return std::nullopt;
      const ClassInfo* ci = db_->find_class(cur.name);
      if (!ci || ci->superName.empty()) return std::nullopt;
      const ClassInfo* sup = db_->find_class(ci->superName);
      if (!sup) return std::nullopt;
      std::vector<Shape> superArgs;
      if (ci->isBuiltin() || !ci->extends || ci->extends->args.empty()) {
        // positional pass-through (covers the builtin collection chain)
        for (size_t i = 0; i < sup->typeParams.size(); ++i)
          superArgs.push_back(i < cur.args.size()
                                  ? cur.args[i]
                                  : make_named(Qualifier::Tainted, "Object"));
      } else {
        Substitution subst;
        for (size_t i = 0; i < ci->typeParams.size() && i < cur.args.size(); ++i)
          subst[ci->typeParams[i]] = cur.args[i];
        for (const auto& a : ci->extends->args)
          superArgs.push_back(apply_subst(subst, shapeOf(a, ci->typeParams)));
      }
      cur = make_named(Qualifier::Tainted, ci->superName, std::move(superArgs));
    }
    return cur;
  }

  Shape exprShape(Expr* e, BodyCtx& ctx) {
    switch (e->kind) {
      case ExprKind::IntLit: return make_primitive(Qualifier::Tainted, "int");
      case ExprKind::StringLit: return make_named(Qualifier::Tainted, "String");
      case ExprKind::ClassLit: return make_named(Qualifier::Tainted, "Class");
      case ExprKind::Lambda: return make_named(Qualifier::Tainted, "Function");
      case ExprKind::Cast:
        return shapeOf(static_cast<CastExpr*>(e)->type, ctx.typeParams);
      case ExprKind::NewObject:
        return shapeOf(static_cast<NewObjectExpr*>(e)->type, ctx.typeParams);
      case ExprKind::NewArray:
        return make_array(Qualifier::Tainted,
                          shapeOf(static_cast<NewArrayExpr*>(e)->elemType, ctx.typeParams));
      case ExprKind::Binary: {
        auto* b = static_cast<BinaryExpr*>(e);
        Shape l = exprShape(b->lhs.get(), ctx);
        Shape r = exprShape(b->rhs.get(), ctx);
        if (l.name == "String" || r.name == "String")
          return make_named(Qualifier::Tainted, "String");
        return make_primitive(Qualifier::Tainted, "int");
      }
      case ExprKind::Name: {
        auto* n = static_cast<NameExpr*>(e);
        switch (n->ref) {
          case RefKind::Local:
            return shapeOf((*ctx.locals)[n->localId].decl->type, ctx.typeParams);
          case RefKind::Param:
            return shapeOf(ctx.method->params[n->paramIndex].type, ctx.typeParams);
          case RefKind::Field: {
            const FieldInfo* f = db_->find_field(n->ownerClass, n->name);
            return memberShape(f->type, n->ownerClass, ctx);
          }
          default:
            return make_named(Qualifier::Tainted, "Object");
        }
      }
      case ExprKind::FieldGet: {
        auto* f = static_cast<FieldGetExpr*>(e);
        if (f->ref == RefKind::EnumConst)
          return make_named(Qualifier::Tainted, f->ownerClass);
        if (f->ref == RefKind::StaticField || f->ref == RefKind::Field) {
          const FieldInfo* fi = db_->find_field(f->ownerClass, f->name);
          if (fi) return memberShape(fi->type, f->ownerClass, ctx);
        }
        return make_named(Qualifier::Tainted, "Object");
      }
      case ExprKind::Call: {
        auto* c = static_cast<CallExpr*>(e);
        if (c->ownerClass.empty()) return make_named(Qualifier::Tainted, "Object");
        const ClassInfo* definer = nullptr;
        const MethodInfo* mi = db_->find_method(c->ownerClass, c->name, &definer);
        if (!mi) return make_named(Qualifier::Tainted, "Object");
        std::vector<std::string> tp = definer->typeParams;
        tp.insert(tp.end(), mi->typeParams.begin(), mi->typeParams.end());
        Shape ret = shapeOf(mi->returnType, tp);
        if (!contains_typevar(ret)) return ret;
        // bind class-level variables from the receiver's static shape
        Substitution subst;
        if (c->recv && !c->staticCall) {
          Shape recvShape = exprShape(c->recv.get(), ctx);
          auto up = upcastShape(recvShape, definer->name);
          if (up) {
            for (size_t i = 0; i < definer->typeParams.size() && i < up->args.size(); ++i)
              subst[definer->typeParams[i]] = up->args[i];
          }
        } else if (!c->recv && !c->staticCall) {
          for (const auto& tpn : ctx.cls->typeParams)
            subst[tpn] = make_typevar(Qualifier::Tainted, tpn);
        }
        Shape substd = apply_subst(subst, ret);
        if (contains_typevar(substd)) {
          // method-level variables: erase leftovers to Object for shape purposes
          Substitution erase;
          collectVars(substd, erase);
          substd = apply_subst(erase, substd);
        }
        return substd;
      }
    }
    return make_named(Qualifier::Tainted, "Object");
  }

  void collectVars(const Shape& s, Substitution& out) {
    if (s.isTypeVar()) out.emplace(s.name, make_named(Qualifier::Tainted, "Object"));
    for (const auto& a : s.args) collectVars(a, out);
  }

  // Field shape seen from a use site: substitute the owner's type parameters
  // if the owner is generic (rare; raw-ish view keeps Object).
  Shape memberShape(const ParsedType& t, const std::string& owner, BodyCtx& ctx) {
    const ClassInfo* ci = db_->find_class(owner);
    return shapeOf(t, ci ? ci->typeParams : std::vector<std::string>{});
  }

  void resolveExpr(Expr* e, BodyCtx& ctx) {
    if (!e) return;
    switch (e->kind) {
      case ExprKind::IntLit:
      case ExprKind::StringLit:
        return;
      case ExprKind::ClassLit: {
        auto* cl = static_cast<ClassLitExpr*>(e);
        if (!db_->find_class(cl->className) && !is_primitive_name(cl->className))
          error(cl->span, "unknown class " + cl->className + " in class literal");
        return;
      }
      case ExprKind::Lambda: {
        auto* l = static_cast<LambdaExpr*>(e);
        // Bodies are parsed and name-checked loosely; lambda params shadow.
        ctx.scope.push();
        for (size_t i = 0; i < l->params.size(); ++i) {
          ctx.scope.declare(l->params[i], -1000 - static_cast<int>(i));
        }
        resolveLambdaBody(l->body.get(), ctx);
        ctx.scope.pop();
        return;
      }
      case ExprKind::Cast: {
        auto* c = static_cast<CastExpr*>(e);
        checkType(c->type, ctx.typeParams, false, c->span);
        resolveExpr(c->inner.get(), ctx);
        return;
      }
      case ExprKind::NewObject: {
        auto* n = static_cast<NewObjectExpr*>(e);
        if (!n->type.diamond) checkType(n->type, ctx.typeParams, false, n->span);
        const ClassInfo* ci = db_->find_class(n->type.name);
        if (!ci)
          error(n->span, "unknown class " + n->type.name);
        else if (ci->kind == ClassInfo::Kind::Enum)
          error(n->span, "cannot instantiate enum " + n->type.name);
        else {
          // Classes have no declared constructors; collections additionally
          // accept a single source collection to copy from.
          bool copyable = ci->isBuiltin() &&
                          db_->is_subclass(ci->name, "Collection");
          size_t maxArgs = copyable ? 1 : 0;
          if (n->args.size() > maxArgs)
            error(n->span, "too many constructor arguments for " + n->type.name);
        }
        for (auto& a : n->args) resolveExpr(a.get(), ctx);
        return;
      }
      case ExprKind::NewArray: {
        auto* n = static_cast<NewArrayExpr*>(e);
        checkType(n->elemType, ctx.typeParams, false, n->span);
        for (auto& el : n->elems) resolveExpr(el.get(), ctx);
        return;
      }
      case ExprKind::Binary: {
        auto* b = static_cast<BinaryExpr*>(e);
        resolveExpr(b->lhs.get(), ctx);
        resolveExpr(b->rhs.get(), ctx);
        return;
      }
      case ExprKind::Name: {
        auto* n = static_cast<NameExpr*>(e);
        int lid = ctx.scope.lookup(n->name);
        if (lid >= 0) {
          n->ref = RefKind::Local;
          n->localId = lid;
          return;
        }
        if (lid <= -1000) {  // lambda parameter
          n->ref = RefKind::Local;
          n->localId = -1;
          return;
        }
        int pi = paramIndex(ctx, n->name);
        if (pi >= 0) {
          n->ref = RefKind::Param;
          n->paramIndex = pi;
          return;
        }
        const ClassInfo* definer = nullptr;
        if (ctx.cls && db_->find_field(ctx.cls->name, n->name, &definer)) {
          n->ref = RefKind::Field;
          n->ownerClass = definer->name;
          return;
        }
        if (db_->find_class(n->name)) {
          n->ref = RefKind::ClassRef;
          n->ownerClass = n->name;
          return;
        }
        error(n->span, "unresolved name " + n->name);
        return;
      }
      case ExprKind::FieldGet: {
        auto* f = static_cast<FieldGetExpr*>(e);
        resolveExpr(f->base.get(), ctx);
        if (f->base->kind == ExprKind::Name &&
            static_cast<NameExpr*>(f->base.get())->ref == RefKind::ClassRef) {
          const std::string& cn = static_cast<NameExpr*>(f->base.get())->name;
          f->baseClassName = cn;
          const ClassInfo* ci = db_->find_class(cn);
          if (ci && ci->kind == ClassInfo::Kind::Enum) {
            if (std::find(ci->enumConsts.begin(), ci->enumConsts.end(), f->name) ==
                ci->enumConsts.end()) {
              error(f->span, "unknown enum constant " + cn + "." + f->name);
              return;
            }
            f->ref = RefKind::EnumConst;
            f->ownerClass = cn;
            return;
          }
          const ClassInfo* definer = nullptr;
          const FieldInfo* fi = db_->find_field(cn, f->name, &definer);
          if (fi && fi->isStatic) {
            f->ref = RefKind::StaticField;
            f->ownerClass = definer->name;
            return;
          }
          error(f->span, "unknown static member " + cn + "." + f->name);
          return;
        }
        Shape base = exprShape(f->base.get(), ctx);
        if (!base.isNamed()) {
          error(f->span, "field access on non-class value");
          return;
        }
        const ClassInfo* definer = nullptr;
        const FieldInfo* fi = db_->find_field(base.name, f->name, &definer);
        if (!fi) {
          error(f->span, "unknown field " + base.name + "." + f->name);
          return;
        }
        f->ref = RefKind::Field;
        f->ownerClass = definer->name;
        return;
      }
      case ExprKind::Call: {
        auto* c = static_cast<CallExpr*>(e);
        for (auto& a : c->args) resolveExpr(a.get(), ctx);
        const ClassInfo* definer = nullptr;
        const MethodInfo* mi = nullptr;
        if (!c->recv) {
          if (!ctx.cls) {
            error(c->span, "call " + c->name + " outside a class body");
            return;
          }
          mi = db_->find_method(ctx.cls->name, c->name, &definer);
          if (!mi) {
            error(c->span, "unresolved method " + c->name);
            return;
          }
        } else {
          resolveExpr(c->recv.get(), ctx);
          if (c->recv->kind == ExprKind::Name &&
              static_cast<NameExpr*>(c->recv.get())->ref == RefKind::ClassRef) {
            const std::string& cn = static_cast<NameExpr*>(c->recv.get())->name;
            mi = db_->find_method(cn, c->name, &definer);
            if (!mi) {
              error(c->span, "unresolved method " + cn + "." + c->name);
              return;
            }
            if (!mi->isStatic) {
              error(c->span, c->name + " is not static on " + cn);
              return;
            }
            c->staticCall = true;
            c->recvClassName = cn;
          } else {
            Shape recvShape = exprShape(c->recv.get(), ctx);
            if (!recvShape.isNamed()) {
              error(c->span, "method call on non-class value");
              return;
            }
            mi = db_->find_method(recvShape.name, c->name, &definer);
            if (!mi) {
              error(c->span, "unresolved method " + recvShape.name + "." + c->name);
              return;
            }
            if (mi->isStatic) {
              error(c->span, c->name + " is static; call it via " + definer->name);
              return;
            }
          }
        }
        if (mi->params.size() != c->args.size()) {
          error(c->span, "wrong number of arguments to " + definer->name + "." + c->name);
          return;
        }
        c->ownerClass = definer->name;
        return;
      }
    }
  }

  // Lambda bodies are name-resolved (unknown names are still errors) but the
  // checker never types them.
  void resolveLambdaBody(Expr* e, BodyCtx& ctx) { resolveExpr(e, ctx); }
};

}  // namespace

namespace {

void collect_type_refs(const ParsedType& t, std::set<std::string>& out) {
  if (t.shape == ParsedType::Shape::Named && !t.name.empty()) out.insert(t.name);
  for (const ParsedType& a : t.args) collect_type_refs(a, out);
}

void collect_expr_refs(const Expr* e, std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::StringLit:
      return;
    case ExprKind::Name: {
      auto* n = static_cast<const NameExpr*>(e);
      if (!n->ownerClass.empty()) out.insert(n->ownerClass);
      return;
    }
    case ExprKind::FieldGet: {
      auto* f = static_cast<const FieldGetExpr*>(e);
      if (!f->ownerClass.empty()) out.insert(f->ownerClass);
      collect_expr_refs(f->base.get(), out);
      return;
    }
    case ExprKind::Call: {
      auto* c = static_cast<const CallExpr*>(e);
      if (!c->ownerClass.empty()) out.insert(c->ownerClass);
      if (!c->recvClassName.empty()) out.insert(c->recvClassName);
      collect_expr_refs(c->recv.get(), out);
      for (const auto& a : c->args) collect_expr_refs(a.get(), out);
      return;
    }
    case ExprKind::Binary: {
      auto* b = static_cast<const BinaryExpr*>(e);
      collect_expr_refs(b->lhs.get(), out);
      collect_expr_refs(b->rhs.get(), out);
      return;
    }
    case ExprKind::Cast: {
      auto* c = static_cast<const CastExpr*>(e);
      collect_type_refs(c->type, out);
      collect_expr_refs(c->inner.get(), out);
      return;
    }
    case ExprKind::NewObject: {
      auto* n = static_cast<const NewObjectExpr*>(e);
      collect_type_refs(n->type, out);
      for (const auto& a : n->args) collect_expr_refs(a.get(), out);
      return;
    }
    case ExprKind::NewArray: {
      auto* n = static_cast<const NewArrayExpr*>(e);
      collect_type_refs(n->elemType, out);
      for (const auto& el : n->elems) collect_expr_refs(el.get(), out);
      return;
    }
    case ExprKind::ClassLit: {
      auto* c = static_cast<const ClassLitExpr*>(e);
      if (!c->className.empty()) out.insert(c->className);
      return;
    }
    case ExprKind::Lambda: {
      collect_expr_refs(static_cast<const LambdaExpr*>(e)->body.get(), out);
      return;
    }
  }
}

void collect_stmt_refs(const Stmt* s, std::set<std::string>& out) {
  if (!s) return;
  switch (s->kind) {
    case StmtKind::LocalDecl: {
      auto* d = static_cast<const LocalDeclStmt*>(s);
      collect_type_refs(d->type, out);
      collect_expr_refs(d->init.get(), out);
      return;
    }
    case StmtKind::Assign: {
      auto* a = static_cast<const AssignStmt*>(s);
      if (!a->ownerClass.empty()) out.insert(a->ownerClass);
      collect_expr_refs(a->value.get(), out);
      return;
    }
    case StmtKind::Return:
      collect_expr_refs(static_cast<const ReturnStmt*>(s)->value.get(), out);
      return;
    case StmtKind::ExprStmt:
      collect_expr_refs(static_cast<const ExprStmt*>(s)->expr.get(), out);
      return;
    case StmtKind::If: {
      auto* i = static_cast<const IfStmt*>(s);
      collect_expr_refs(i->cond.get(), out);
      for (const auto& t : i->thenBody) collect_stmt_refs(t.get(), out);
      for (const auto& t : i->elseBody) collect_stmt_refs(t.get(), out);
      return;
    }
    case StmtKind::While: {
      auto* w = static_cast<const WhileStmt*>(s);
      collect_expr_refs(w->cond.get(), out);
      for (const auto& t : w->body) collect_stmt_refs(t.get(), out);
      return;
    }
  }
}

}  // namespace

std::map<std::string, std::set<std::string>> reverse_dependencies(const ProgramDB& db) {
  std::map<std::string, std::set<std::string>> rev;
  for (const auto& [name, ci] : db.classes) {
    if (ci.isBuiltin()) continue;
    std::set<std::string> refs;
    if (ci.extends) collect_type_refs(*ci.extends, refs);
    for (const FieldInfo& f : ci.fields) {
      collect_type_refs(f.type, refs);
      collect_expr_refs(f.init, refs);
    }
    for (const MethodInfo& m : ci.methods) {
      collect_type_refs(m.returnType, refs);
      for (const ParamInfo& p : m.params) collect_type_refs(p.type, refs);
      if (m.decl)
        for (const auto& st : m.decl->body) collect_stmt_refs(st.get(), refs);
    }
    for (const std::string& r : refs) {
      const ClassInfo* target = db.find_class(r);
      if (!target || target->isBuiltin()) continue;
      if (target->name != name) rev[target->name].insert(name);
    }
  }
  return rev;
}

std::set<std::string> dependency_closure(const std::string& cls,
                                         const std::map<std::string, std::set<std::string>>& rev) {
  std::set<std::string> out{cls};
  std::vector<std::string> work{cls};
  while (!work.empty()) {
    std::string cur = std::move(work.back());
    work.pop_back();
    auto it = rev.find(cur);
    if (it == rev.end()) continue;
    for (const std::string& d : it->second)
      if (out.insert(d).second) work.push_back(d);
  }
  return out;
}

ResolveResult resolve(std::vector<SourceUnit> units, const StubSet& stubs) {
  auto db = std::make_shared<ProgramDB>();
  db->units = std::move(units);
  db->stubs = stubs;
  Resolver r(db);
  ResolveResult res;
  res.errors = r.run();
  for (const auto& e : stubs.errors)
    res.errors.push_back({e.file, "stub line " + std::to_string(e.line) + ": " + e.message,
                          Span{}});
  if (res.errors.empty()) res.db = db;
  return res;
}

}  // namespace minij
