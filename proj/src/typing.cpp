#include "minij/typing.hpp"

#include <algorithm>
#include <cassert>
#include <regex>

namespace minij {

namespace {

bool in_list(const std::vector<std::string>& xs, const std::string& n) {
  return std::find(xs.begin(), xs.end(), n) != xs.end();
}

QualifiedType all_tainted(const QualifiedType& t) {
  QualifiedType r = t;
  r.qual = Qualifier::Tainted;
  for (auto& a : r.args) a = all_tainted(a);
  return r;
}

std::vector<std::string> method_tvars(const ClassInfo& cls, const MethodInfo& m) {
  std::vector<std::string> tv = cls.typeParams;
  tv.insert(tv.end(), m.typeParams.begin(), m.typeParams.end());
  return tv;
}

}  // namespace

AnnotationSite field_site(const ClassInfo& cls, const FieldInfo& f) {
  AnnotationSite s;
  s.kind = AnnotationSite::Kind::FieldType;
  s.owner = cls.name;
  s.member = f.name;
  return s;
}

AnnotationSite param_site(const ClassInfo& cls, const MethodInfo& m, int index) {
  AnnotationSite s;
  s.kind = AnnotationSite::Kind::ParamType;
  s.owner = cls.name;
  s.member = m.name;
  s.index = index;
  return s;
}

AnnotationSite return_site(const ClassInfo& cls, const MethodInfo& m) {
  AnnotationSite s;
  s.kind = AnnotationSite::Kind::ReturnType;
  s.owner = cls.name;
  s.member = m.name;
  return s;
}

AnnotationSite local_site(const ClassInfo& cls, const MethodInfo& m, int localId) {
  AnnotationSite s;
  s.kind = AnnotationSite::Kind::LocalType;
  s.owner = cls.name;
  s.member = m.name;
  s.localId = localId;
  return s;
}

const ParsedType* parsed_at_path(const ParsedType& t, const std::vector<int>& path) {
  const ParsedType* cur = &t;
  for (int step : path) {
    if (step < 0 || step >= (int)cur->args.size()) return nullptr;
    cur = &cur->args[step];
  }
  return cur;
}

bool has_explicit_ann(const ParsedType& t) {
  if (t.ann) return true;
  for (const auto& a : t.args)
    if (has_explicit_ann(a)) return true;
  return false;
}

QualifiedType erase_typevars(const QualifiedType& t) {
  if (t.isTypeVar()) return make_named(t.qual, "Object");
  QualifiedType r = t;
  for (auto& a : r.args) a = erase_typevars(a);
  return r;
}

bool subtype_ok(const QualifiedType& actual, const QualifiedType& required) {
  if (!same_shape(actual, required)) return true;
  return is_subtype(actual, required);
}

// ---------------------------------------------------------------- DBView

DBView::DBView(const ProgramDB* db, const CheckConfig* cfg, const AnnotationOverlay* overlay)
    : db_(db), cfg_(cfg), overlay_(overlay) {}

bool DBView::class_annotated(const ClassInfo& ci) const {
  if (ci.isBuiltin()) return false;
  if (cfg_->annotatedPackages.empty()) return true;
  thread_local std::map<std::string, bool> cache;
  std::string key = cfg_->annotatedPackages + "\n" + ci.pkg;
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  bool ok = std::regex_match(ci.pkg, std::regex(cfg_->annotatedPackages));
  cache[key] = ok;
  return ok;
}

const SourceUnit* DBView::unit_of(const ClassInfo& cls) const {
  if (cls.unitIndex < 0 || cls.unitIndex >= (int)db_->units.size()) return nullptr;
  return &db_->units[cls.unitIndex];
}

std::string DBView::file_of(const ClassInfo& cls) const {
  const SourceUnit* u = unit_of(cls);
  return u ? u->path : std::string();
}

namespace {

QualifiedType qualify_rec(const DBView& v, const ParsedType& t, TypeContext topCtx,
                          AnnotationSite& site, const std::vector<std::string>& tvars, bool top) {
  Qualifier q;
  if (t.ann) {
    q = *t.ann;
  } else {
    std::optional<Qualifier> ov =
        v.overlay() && !site.owner.empty() ? v.overlay()->get(site) : std::nullopt;
    q = ov ? *ov : default_qual(top ? topCtx : TypeContext::TypeArg);
  }
  if (t.isArray()) {
    site.path.push_back(0);
    QualifiedType elem = qualify_rec(v, t.elem(), topCtx, site, tvars, false);
    site.path.pop_back();
    return make_array(q, elem);
  }
  if (in_list(tvars, t.name)) return make_typevar(q, t.name);
  if (is_primitive_name(t.name)) return make_primitive(q, t.name);
  std::vector<QualifiedType> args;
  for (size_t i = 0; i < t.args.size(); ++i) {
    site.path.push_back((int)i);
    args.push_back(qualify_rec(v, t.args[i], topCtx, site, tvars, false));
    site.path.pop_back();
  }
  return make_named(q, t.name, std::move(args));
}

}  // namespace

QualifiedType DBView::qualify(const ParsedType& t, TypeContext topCtx, const AnnotationSite& base,
                              const std::vector<std::string>& tvars) const {
  AnnotationSite site = base;
  return qualify_rec(*this, t, topCtx, site, tvars, true);
}

QualifiedType DBView::field_declared(const ClassInfo& cls, const FieldInfo& f) const {
  return qualify(f.type, TypeContext::Field, field_site(cls, f), cls.typeParams);
}

QualifiedType DBView::field_read_type(const ClassInfo& cls, const FieldInfo& f) const {
  QualifiedType t = field_declared(cls, f);
  if (f.isStatic && f.isFinal && cfg_->constructDefaulting)
    t.qual = static_final_qual(cls, f);
  return t;
}

QualifiedType DBView::param_type(const ClassInfo& cls, const MethodInfo& m, int index) const {
  return qualify(m.params[index].type, TypeContext::Param, param_site(cls, m, index),
                 method_tvars(cls, m));
}

QualifiedType DBView::return_type(const ClassInfo& cls, const MethodInfo& m) const {
  return qualify(m.returnType, TypeContext::Return, return_site(cls, m), method_tvars(cls, m));
}

QualifiedType DBView::local_conservative(const ClassInfo& cls, const MethodInfo& m,
                                         const LocalDeclStmt& d) const {
  return qualify(d.type, TypeContext::Field, local_site(cls, m, d.localId), method_tvars(cls, m));
}

QualifiedType DBView::this_type(const ClassInfo& cls) const {
  std::vector<QualifiedType> args;
  for (const auto& tp : cls.typeParams) args.push_back(make_typevar(Qualifier::Tainted, tp));
  return make_named(Qualifier::Tainted, cls.name, std::move(args));
}

MethodSig DBView::method_sig(const ClassInfo& owner, const MethodInfo& m) const {
  MethodSig s;
  s.owner = owner.name;
  s.name = m.name;
  s.pkg = owner.pkg;
  s.isStatic = m.isStatic;
  s.receiverType = this_type(owner);
  const std::string id = s.pkg + "." + s.owner + "#" + s.name;
  const StubSig* stub = db_->stubs.find(id);
  std::vector<std::string> tvars = method_tvars(owner, m);
  AnnotationSite none;
  if (stub) {
    s.returnType = qualify(stub->returnType, TypeContext::Return, none, tvars);
    for (const auto& p : stub->paramTypes)
      s.paramTypes.push_back(qualify(p, TypeContext::Param, none, tvars));
  } else {
    s.returnType = return_type(owner, m);
    for (size_t i = 0; i < m.params.size(); ++i)
      s.paramTypes.push_back(param_type(owner, m, (int)i));
    if (owner.isBuiltin() && !cfg_->constructDefaulting) {
      // the catalog's only explicit qualifiers model the known-safe library
      // constructs; without construct defaulting they revert to Tainted
      s.returnType = all_tainted(s.returnType);
      for (auto& p : s.paramTypes) p = all_tainted(p);
    }
  }
  for (size_t i = 0; i < s.paramTypes.size(); ++i)
    if (s.paramTypes[i].qual == Qualifier::PolyTaint) s.ptParams.push_back((int)i);
  return s;
}

void DBView::precompute_static_finals() const {
  for (const auto& [name, ci] : db_->classes) {
    if (ci.isBuiltin()) continue;
    for (const auto& f : ci.fields)
      if (f.isStatic && f.isFinal) static_final_qual(ci, f);
  }
}

// ------------------------------------------------- expression typing

namespace {

class ExprTyper {
 public:
  using Env = std::map<int, QualifiedType>;

  ExprTyper(const DBView& v, const ClassInfo& cls, const MethodInfo* m, TypedMethod& out)
      : v_(v), cls_(cls), m_(m), out_(out) {}

  void runBody(const std::vector<StmtPtr>& body) {
    Env env;
    walkBlock(body, env);
  }

  void runFieldInit(const FieldInfo& f) {
    if (!f.init) return;
    Env env;
    QualifiedType required = v_.field_declared(cls_, f);
    if (f.isStatic && f.isFinal) {
      AnnotationSite s = field_site(cls_, f);
      bool pinned =
          f.type.ann.has_value() || (v_.overlay() && v_.overlay()->get(s).has_value());
      // an unpinned static final takes its qualifier from this initializer,
      // so only an explicit annotation imposes a top-level requirement
      if (!pinned) required.qual = Qualifier::Tainted;
    }
    QualifiedType rhs = typeExpr(f.init, env, &required);
    recordAssign(AssignFlavor::FieldAssign, f.span, required, rhs, f.init);
  }

  QualifiedType typeOnly(const Expr* e) {
    Env env;
    record_ = false;
    return typeExpr(e, env, nullptr);
  }

 private:
  const DBView& v_;
  const ClassInfo& cls_;
  const MethodInfo* m_;
  TypedMethod& out_;
  bool record_ = true;

  std::vector<std::string> tvars() const {
    return m_ ? method_tvars(cls_, *m_) : cls_.typeParams;
  }

  void walkBlock(const std::vector<StmtPtr>& b, Env& env) {
    for (const auto& s : b) walkStmt(s.get(), env);
  }

  static Env mergeEnvs(const Env& a, const Env& b) {
    Env out;
    for (const auto& [id, ta] : a) {
      auto it = b.find(id);
      if (it == b.end()) continue;  // declared inside one branch: out of scope
      out[id] = same_shape(ta, it->second) ? join_types(ta, it->second) : ta;
    }
    return out;
  }

  const LocalDeclStmt* localDecl(int localId) const {
    const auto& locals = v_.db().locals_of(cls_.name, m_->name);
    if (localId < 0 || localId >= (int)locals.size()) return nullptr;
    return locals[localId].decl;
  }

  void walkStmt(const Stmt* s, Env& env) {
    switch (s->kind) {
      case StmtKind::LocalDecl: {
        auto* d = static_cast<const LocalDeclStmt*>(s);
        QualifiedType cons = v_.local_conservative(cls_, *m_, *d);
        if (d->init) {
          QualifiedType rhs = typeExpr(d->init.get(), env, &cons);
          setLocal(env, d, rhs, d->init.get(), s->span);
        } else {
          env[d->localId] = cons;
        }
        return;
      }
      case StmtKind::Assign: {
        auto* a = static_cast<const AssignStmt*>(s);
        if (a->target == RefKind::Local) {
          const LocalDeclStmt* d = localDecl(a->localId);
          if (!d) return;
          QualifiedType cons = v_.local_conservative(cls_, *m_, *d);
          QualifiedType rhs = typeExpr(a->value.get(), env, &cons);
          setLocal(env, d, rhs, a->value.get(), s->span);
        } else {
          const ClassInfo* def = v_.db().find_class(a->ownerClass);
          const FieldInfo* f = def ? def->field(a->name) : nullptr;
          if (!f) return;
          QualifiedType req = substFieldForThis(*def, *f);
          QualifiedType rhs = typeExpr(a->value.get(), env, &req);
          recordAssign(AssignFlavor::FieldAssign, s->span, req, rhs, a->value.get());
        }
        return;
      }
      case StmtKind::Return: {
        auto* r = static_cast<const ReturnStmt*>(s);
        if (r->value && m_) {
          QualifiedType req = v_.return_type(cls_, *m_);
          QualifiedType rhs = typeExpr(r->value.get(), env, &req);
          recordAssign(AssignFlavor::Return, s->span, req, rhs, r->value.get());
        }
        return;
      }
      case StmtKind::ExprStmt:
        typeExpr(static_cast<const ExprStmt*>(s)->expr.get(), env, nullptr);
        return;
      case StmtKind::If: {
        auto* i = static_cast<const IfStmt*>(s);
        typeExpr(i->cond.get(), env, nullptr);
        Env e1 = env, e2 = env;
        walkBlock(i->thenBody, e1);
        walkBlock(i->elseBody, e2);
        env = mergeEnvs(e1, e2);
        return;
      }
      case StmtKind::While: {
        auto* w = static_cast<const WhileStmt*>(s);
        Env in = env;
        bool saved = record_;
        record_ = false;
        for (int iter = 0; iter < 16; ++iter) {
          Env out = in;
          typeExpr(w->cond.get(), out, nullptr);
          walkBlock(w->body, out);
          Env merged = mergeEnvs(in, out);
          // locals declared before the loop survive the merge by construction
          if (merged == in) break;
          in = merged;
        }
        record_ = saved;
        typeExpr(w->cond.get(), in, nullptr);
        Env fin = in;
        walkBlock(w->body, fin);
        env = in;
        return;
      }
    }
  }

  // Field type of a (possibly inherited) field accessed on `this`.
  QualifiedType substFieldForThis(const ClassInfo& def, const FieldInfo& f) {
    QualifiedType t = v_.field_read_type(def, f);
    if (def.typeParams.empty()) return t;
    auto up = upcast_type(v_, v_.this_type(cls_), def.name);
    Substitution s;
    if (up && up->args.size() == def.typeParams.size())
      for (size_t i = 0; i < def.typeParams.size(); ++i) s[def.typeParams[i]] = up->args[i];
    return apply_subst(s, t);
  }

  void recordAssign(AssignFlavor fl, Span span, const QualifiedType& required,
                    const QualifiedType& actualRaw, const Expr* rhs, int localId = -1) {
    QualifiedType actual = actualRaw;
    if (!same_shape(actual, required) && actual.isNamed() && required.isNamed()) {
      auto up = upcast_type(v_, actual, required.name);
      if (up) actual = *up;
    }
    PseudoAssign pa;
    pa.flavor = fl;
    pa.span = span;
    pa.required = required;
    pa.actual = actual;
    pa.rhsExpr = rhs;
    pa.localId = localId;
    pa.ok = subtype_ok(actual, required);
    if (record_) out_.assigns.push_back(pa);
  }

  // Pins from explicit annotations and overlay entries on the local's
  // declared type, forced onto the flow type.
  void applyPins(QualifiedType& t, const ParsedType& p, AnnotationSite& site) {
    std::optional<Qualifier> pin = p.ann;
    if (!pin && v_.overlay()) pin = v_.overlay()->get(site);
    if (pin) t.qual = *pin;
    if (p.isArray() && t.isArray()) {
      site.path.push_back(0);
      applyPins(t.args[0], p.elem(), site);
      site.path.pop_back();
      return;
    }
    for (size_t i = 0; i < p.args.size() && i < t.args.size(); ++i) {
      site.path.push_back((int)i);
      applyPins(t.args[i], p.args[i], site);
      site.path.pop_back();
    }
  }

  void setLocal(Env& env, const LocalDeclStmt* d, const QualifiedType& rhs, const Expr* re,
                Span span) {
    QualifiedType cons = v_.local_conservative(cls_, *m_, *d);
    QualifiedType aligned = rhs;
    if (!same_shape(aligned, cons) && aligned.isNamed() && cons.isNamed()) {
      auto up = upcast_type(v_, aligned, cons.name);
      if (up) aligned = *up;
    }
    if (!same_shape(aligned, cons)) {
      // raw declarations and unrelated shapes don't constrain the flow type
      recordAssign(AssignFlavor::LocalAssign, span, cons, aligned, re, d->localId);
      env[d->localId] = cons;
      return;
    }
    QualifiedType flowed = aligned;
    AnnotationSite site = local_site(cls_, *m_, d->localId);
    applyPins(flowed, d->type, site);
    recordAssign(AssignFlavor::LocalAssign, span, flowed, aligned, re, d->localId);
    env[d->localId] = flowed;
  }

  QualifiedType typeExpr(const Expr* e, Env& env, const QualifiedType* target) {
    QualifiedType t = typeExprInner(e, env, target);
    out_.exprTypes[e] = t;
    return t;
  }

  QualifiedType typeExprInner(const Expr* e, Env& env, const QualifiedType* target) {
    switch (e->kind) {
      case ExprKind::IntLit:
        return make_primitive(Qualifier::Untainted, "int");
      case ExprKind::StringLit:
        return make_named(Qualifier::Untainted, "String");
      case ExprKind::Name: {
        auto* n = static_cast<const NameExpr*>(e);
        switch (n->ref) {
          case RefKind::Local: {
            auto it = env.find(n->localId);
            if (it != env.end()) return it->second;
            const LocalDeclStmt* d = m_ ? localDecl(n->localId) : nullptr;
            return d ? v_.local_conservative(cls_, *m_, *d)
                     : make_named(Qualifier::Tainted, "Object");
          }
          case RefKind::Param:
            return v_.param_type(cls_, *m_, n->paramIndex);
          case RefKind::Field: {
            const ClassInfo* def = v_.db().find_class(n->ownerClass);
            const FieldInfo* f = def ? def->field(n->name) : nullptr;
            if (!f) return make_named(Qualifier::Tainted, "Object");
            return substFieldForThis(*def, *f);
          }
          default:
            return make_named(Qualifier::Untainted, "Class");
        }
      }
      case ExprKind::FieldGet: {
        auto* g = static_cast<const FieldGetExpr*>(e);
        if (g->ref == RefKind::EnumConst) {
          Qualifier q =
              v_.cfg().constructDefaulting ? Qualifier::Untainted : Qualifier::Tainted;
          return make_named(q, g->ownerClass);
        }
        const ClassInfo* def = v_.db().find_class(g->ownerClass);
        const FieldInfo* f = def ? def->field(g->name) : nullptr;
        if (g->ref == RefKind::StaticField) {
          if (!f) return make_named(Qualifier::Tainted, "Object");
          return erase_typevars(v_.field_read_type(*def, *f));
        }
        // instance field through an expression
        QualifiedType baseT = typeExpr(g->base.get(), env, nullptr);
        if (!f) return make_named(Qualifier::Tainted, "Object");
        QualifiedType ft = v_.field_read_type(*def, *f);
        Substitution s;
        if (!def->typeParams.empty()) {
          auto up = upcast_type(v_, baseT, def->name);
          if (up && up->args.size() == def->typeParams.size())
            for (size_t i = 0; i < def->typeParams.size(); ++i)
              s[def->typeParams[i]] = up->args[i];
        }
        return erase_typevars(apply_subst(s, ft));
      }
      case ExprKind::Call:
        return typeCall(static_cast<const CallExpr*>(e), env);
      case ExprKind::Binary: {
        auto* b = static_cast<const BinaryExpr*>(e);
        QualifiedType l = typeExpr(b->lhs.get(), env, nullptr);
        QualifiedType r = typeExpr(b->rhs.get(), env, nullptr);
        Qualifier q = qual_join(l.qual, r.qual);
        bool str = (l.isNamed() && l.name == "String") || (r.isNamed() && r.name == "String");
        return str ? make_named(q, "String") : make_primitive(q, "int");
      }
      case ExprKind::Cast: {
        auto* c = static_cast<const CastExpr*>(e);
        QualifiedType inner = typeExpr(c->inner.get(), env, nullptr);
        AnnotationSite none;
        QualifiedType castT = v_.qualify(c->type, TypeContext::Cast, none, tvars());
        if (has_explicit_ann(c->type)) return castT;  // programmer assertion, trusted
        if (!v_.cfg().constructDefaulting) return castT;
        if (same_shape(inner, castT)) return inner;  // cast mirrors the casted expression
        return with_qual(castT, inner.qual);
      }
      case ExprKind::NewObject:
        return typeNew(static_cast<const NewObjectExpr*>(e), env, target);
      case ExprKind::NewArray:
        return typeNewArray(static_cast<const NewArrayExpr*>(e), env);
      case ExprKind::ClassLit: {
        Qualifier q = v_.cfg().constructDefaulting ? Qualifier::Untainted : Qualifier::Tainted;
        return make_named(q, "Class");
      }
      case ExprKind::Lambda: {
        // lambda bodies are not taint-checked; the literal itself is safe
        Qualifier q = v_.cfg().constructDefaulting ? Qualifier::Untainted : Qualifier::Tainted;
        return make_named(q, "Function");
      }
    }
    return make_named(Qualifier::Tainted, "Object");
  }

  QualifiedType typeCall(const CallExpr* c, Env& env) {
    QualifiedType recvT;
    const QualifiedType* recvPtr = nullptr;
    if (c->recv) {
      recvT = typeExpr(c->recv.get(), env, nullptr);
      recvPtr = &recvT;
    } else if (!c->staticCall) {
      recvT = v_.this_type(cls_);
      recvPtr = &recvT;
    }
    CallInfo info = analyze_call(v_, cls_, *c, recvPtr);
    std::vector<QualifiedType> argTs;
    for (size_t i = 0; i < c->args.size(); ++i) {
      const QualifiedType* t =
          i < info.argDeclared.size() ? &info.argDeclared[i] : nullptr;
      argTs.push_back(typeExpr(c->args[i].get(), env, t));
    }
    for (size_t i = 0; i < c->args.size() && i < info.argRequired.size(); ++i) {
      if (!info.argRequired[i]) continue;
      recordAssign(AssignFlavor::CallArg, c->args[i]->span, *info.argRequired[i], argTs[i],
                   c->args[i].get());
    }
    return call_result(v_, info, recvPtr, argTs);
  }

  QualifiedType typeNew(const NewObjectExpr* n, Env& env, const QualifiedType* target) {
    const ClassInfo* ci = v_.db().find_class(n->type.name);
    size_t arity = ci ? ci->typeParams.size() : 0;
    bool copyCtor = ci && ci->isBuiltin() && !n->args.empty() &&
                    v_.db().is_subclass(ci->name, "Collection");

    QualifiedType srcT;
    bool haveSrc = false;
    if (!n->args.empty()) {
      srcT = typeExpr(n->args[0].get(), env, nullptr);
      haveSrc = true;
    }

    std::vector<QualifiedType> typeArgs;
    bool mirrored = false;
    AnnotationSite none;
    if (!n->type.args.empty()) {
      for (const auto& pa : n->type.args)
        typeArgs.push_back(v_.qualify(pa, TypeContext::TypeArg, none, tvars()));
    } else if (copyCtor && v_.cfg().constructDefaulting && haveSrc) {
      auto up = upcast_type(v_, srcT, "Collection");
      if (up && up->args.size() == 1 && arity == 1) {
        typeArgs = {up->args[0]};
        mirrored = true;
      }
    }
    if (typeArgs.empty() && arity > 0) {
      if (n->type.diamond && target && target->isNamed()) {
        auto mapped = down_map_args(*target, *ci);
        if (mapped) typeArgs = *mapped;
      }
      while (typeArgs.size() < arity && (n->type.diamond || !typeArgs.empty()))
        typeArgs.push_back(make_named(Qualifier::Tainted, "Object"));
      // a plain raw `new` stays raw: no arguments at all
    }

    QualifiedType res = make_named(Qualifier::Untainted, n->type.name, typeArgs);
    if (copyCtor && haveSrc && !mirrored) {
      auto reqUp = upcast_type(v_, res, "Collection");
      auto actUp = upcast_type(v_, srcT, "Collection");
      if (reqUp && actUp)
        recordAssign(AssignFlavor::CtorArg, n->span, with_qual(*reqUp, Qualifier::Tainted),
                     *actUp, n->args[0].get());
    }
    return res;
  }

  // Back-maps a supertype instantiation onto `cls`'s own type arguments.
  std::optional<std::vector<QualifiedType>> down_map_args(const QualifiedType& target,
                                                          const ClassInfo& cls) {
    if (target.name == cls.name) {
      if (target.args.size() == cls.typeParams.size()) return target.args;
      return std::nullopt;
    }
    QualifiedType sym = v_.this_type(cls);
    auto up = upcast_type(v_, sym, target.name);
    if (up) {
      auto sb = find_type_subst(with_qual(*up, target.qual), target);
      if (sb) {
        std::vector<QualifiedType> args;
        for (const auto& tp : cls.typeParams) {
          auto it = sb->find(tp);
          args.push_back(it != sb->end() ? it->second : make_named(Qualifier::Tainted, "Object"));
        }
        return args;
      }
    }
    if (target.args.size() == cls.typeParams.size()) return target.args;
    return std::nullopt;
  }

  QualifiedType typeNewArray(const NewArrayExpr* n, Env& env) {
    AnnotationSite none;
    QualifiedType declaredElem = v_.qualify(n->elemType, TypeContext::TypeArg, none, tvars());
    std::vector<QualifiedType> elemTs;
    for (const auto& el : n->elems) elemTs.push_back(typeExpr(el.get(), env, &declaredElem));

    QualifiedType elemQ = declaredElem;
    if (has_explicit_ann(n->elemType)) {
      for (size_t i = 0; i < n->elems.size(); ++i)
        recordAssign(AssignFlavor::ArrayElem, n->elems[i]->span, declaredElem, elemTs[i],
                     n->elems[i].get());
    } else if (v_.cfg().constructDefaulting) {
      Qualifier j = Qualifier::Untainted;
      for (const auto& t : elemTs) j = qual_join(j, t.qual);
      elemQ.qual = j;
    }
    return make_array(Qualifier::Untainted, elemQ);
  }
};

}  // namespace

Qualifier DBView::static_final_qual(const ClassInfo& cls, const FieldInfo& f) const {
  std::string key = cls.name + "#" + f.name;
  auto it = sfMemo_.find(key);
  if (it != sfMemo_.end()) return it->second;
  Qualifier q;
  std::optional<Qualifier> ov =
      overlay_ ? overlay_->get(field_site(cls, f)) : std::nullopt;
  if (f.type.ann) {
    q = *f.type.ann;
  } else if (ov) {
    q = *ov;
  } else if (!f.init) {
    q = Qualifier::Tainted;
  } else if (sfInFlight_.count(key)) {
    return Qualifier::Tainted;  // cycle: unresolvable, stay conservative
  } else {
    sfInFlight_.insert(key);
    TypedMethod tmp;
    ExprTyper t(*this, cls, nullptr, tmp);
    q = t.typeOnly(f.init).qual;
    sfInFlight_.erase(key);
  }
  sfMemo_[key] = q;
  return q;
}

std::optional<QualifiedType> upcast_type(const DBView& v, const QualifiedType& t,
                                         const std::string& target) {
  if (!t.isNamed()) return std::nullopt;
  QualifiedType cur = t;
  for (int guard = 0; guard < 64; ++guard) {
    if (cur.name == target) return cur;
    const ClassInfo* ci = v.db().find_class(cur.name);
    if (!ci || ci->superName.empty()) return std::nullopt;
    if (!ci->extends || ci->extends->args.empty()) {
      // builtin chains and argument-less extends pass type arguments through
      const ClassInfo* sup = v.db().find_class(ci->superName);
      size_t arity = sup ? sup->typeParams.size() : 0;
      std::vector<QualifiedType> args;
      for (size_t i = 0; i < arity && i < cur.args.size(); ++i) args.push_back(cur.args[i]);
      cur = make_named(cur.qual, ci->superName, std::move(args));
    } else {
      Substitution s;
      for (size_t i = 0; i < ci->typeParams.size() && i < cur.args.size(); ++i)
        s[ci->typeParams[i]] = cur.args[i];
      AnnotationSite none;
      QualifiedType supDecl =
          v.qualify(*ci->extends, TypeContext::TypeArg, none, ci->typeParams);
      cur = with_qual(apply_subst(s, supDecl), cur.qual);
    }
  }
  return std::nullopt;
}

CallInfo analyze_call(const DBView& v, const ClassInfo& ctxClass, const CallExpr& call,
                      const QualifiedType* recvType) {
  (void)ctxClass;
  CallInfo info;
  info.owner = v.db().find_class(call.ownerClass);
  info.method = info.owner ? info.owner->method(call.name) : nullptr;
  if (!info.owner || !info.method) return info;
  const ClassInfo& owner = *info.owner;
  const MethodInfo& mi = *info.method;

  info.sig = v.method_sig(owner, mi);
  const std::string id = info.sig.id();

  Substitution S;
  if (!mi.isStatic && recvType && recvType->isNamed()) {
    auto up = upcast_type(v, *recvType, owner.name);
    if (up && up->args.size() == owner.typeParams.size())
      for (size_t i = 0; i < owner.typeParams.size(); ++i) S[owner.typeParams[i]] = up->args[i];
  }
  info.subst = S;

  auto substErase = [&](const QualifiedType& t) { return erase_typevars(apply_subst(S, t)); };
  for (const auto& p : info.sig.paramTypes) info.argDeclared.push_back(substErase(p));
  info.argRequired.assign(info.sig.paramTypes.size(), std::nullopt);

  bool ownerAnnotated = v.class_annotated(owner);
  bool hasStub = v.db().stubs.find(id) != nullptr;

  if (v.cfg().is_source(id)) {
    info.branch = CallInfo::Branch::Source;
  } else if (v.cfg().is_sanitizer(id)) {
    info.branch = CallInfo::Branch::Sanitizer;
  } else if (contains_typevar(info.sig.returnType)) {
    info.branch = CallInfo::Branch::Generics;
    for (size_t i = 0; i < info.sig.paramTypes.size(); ++i)
      if (contains_typevar(info.sig.paramTypes[i]) || ownerAnnotated || hasStub)
        info.argRequired[i] = info.argDeclared[i];
  } else if (hasStub) {
    info.branch = CallInfo::Branch::Stub;
    for (size_t i = 0; i < info.sig.paramTypes.size(); ++i)
      info.argRequired[i] = info.argDeclared[i];
  } else if (ownerAnnotated) {
    info.branch = CallInfo::Branch::Annotated;
    info.treatAsPoly =
        info.sig.returnType.qual == Qualifier::PolyTaint || !info.sig.ptParams.empty();
    info.ptArgs = info.sig.ptParams;
    for (size_t i = 0; i < info.sig.paramTypes.size(); ++i) {
      bool poly = std::find(info.ptArgs.begin(), info.ptArgs.end(), (int)i) != info.ptArgs.end();
      if (!poly) info.argRequired[i] = info.argDeclared[i];
    }
  } else {
    info.branch = CallInfo::Branch::PolyDefault;
    info.treatAsPoly = true;
    info.receiverInPolySet = !mi.isStatic;
    for (size_t i = 0; i < info.sig.paramTypes.size(); ++i) {
      if (contains_typevar(info.sig.paramTypes[i])) {
        // type-variable parameters couple to the receiver's contents, not to
        // the result's top-level qualifier
        info.argRequired[i] = info.argDeclared[i];
      } else {
        info.ptArgs.push_back((int)i);
      }
    }
  }

  for (int si : v.cfg().sink_params(id))
    if (si >= 0 && si < (int)info.argRequired.size())
      info.argRequired[si] = with_qual(info.argDeclared[si], Qualifier::Untainted);

  return info;
}

QualifiedType call_result(const DBView& v, const CallInfo& info, const QualifiedType* recvType,
                          const std::vector<QualifiedType>& argTypes) {
  if (!info.owner || !info.method) return make_named(Qualifier::Tainted, "Object");
  auto substErase = [&](const QualifiedType& t) {
    return erase_typevars(apply_subst(info.subst, t));
  };
  switch (info.branch) {
    case CallInfo::Branch::Source:
      return all_tainted(substErase(info.sig.returnType));
    case CallInfo::Branch::Sanitizer:
      return with_qual(all_tainted(substErase(info.sig.returnType)), Qualifier::Untainted);
    case CallInfo::Branch::Generics:
    case CallInfo::Branch::Stub:
      return substErase(info.sig.returnType);
    case CallInfo::Branch::Annotated: {
      QualifiedType ret = substErase(info.sig.returnType);
      if (ret.qual == Qualifier::PolyTaint) {
        Qualifier inst = Qualifier::Untainted;
        for (int pi : info.ptArgs)
          if (pi >= 0 && pi < (int)argTypes.size()) inst = qual_join(inst, argTypes[pi].qual);
        ret.qual = inst;
      }
      return ret;
    }
    case CallInfo::Branch::PolyDefault: {
      Qualifier j = Qualifier::Untainted;
      if (info.receiverInPolySet && recvType) j = qual_join(j, recvType->qual);
      for (int pi : info.ptArgs)
        if (pi >= 0 && pi < (int)argTypes.size()) j = qual_join(j, argTypes[pi].qual);
      return with_qual(substErase(info.sig.returnType), j);
    }
  }
  return make_named(Qualifier::Tainted, "Object");
}

std::optional<QualifiedType> fix_target(const DBView& v, const QualifiedType& rhsType,
                                        const QualifiedType& required) {
  if (same_shape(rhsType, required)) {
    // The top level is the one covariant position; a satisfactory actual
    // qualifier stays put so only real violations become fix requirements.
    QualifiedType t = required;
    if (qual_leq(rhsType.qual, required.qual)) t.qual = rhsType.qual;
    return t;
  }
  if (!rhsType.isNamed() || !required.isNamed()) return std::nullopt;
  const ClassInfo* rc = v.db().find_class(rhsType.name);
  if (!rc) return std::nullopt;
  if (rhsType.args.size() != rc->typeParams.size()) return std::nullopt;  // raw
  QualifiedType sym = v.this_type(*rc);
  auto up = upcast_type(v, sym, required.name);
  if (!up) return std::nullopt;
  auto sb = find_type_subst(with_qual(*up, required.qual), required);
  if (!sb) return std::nullopt;
  std::vector<QualifiedType> args;
  for (size_t i = 0; i < rc->typeParams.size(); ++i) {
    auto it = sb->find(rc->typeParams[i]);
    args.push_back(it != sb->end() ? it->second : rhsType.args[i]);
  }
  QualifiedType t = make_named(required.qual, rhsType.name, std::move(args));
  return same_shape(t, rhsType) ? std::optional<QualifiedType>(t) : std::nullopt;
}

TypedMethod type_method(const DBView& v, const ClassInfo& cls, const MethodInfo& m) {
  TypedMethod out;
  if (!m.decl) return out;
  ExprTyper t(v, cls, &m, out);
  t.runBody(m.decl->body);
  return out;
}

TypedMethod type_field_init(const DBView& v, const ClassInfo& cls, const FieldInfo& f) {
  TypedMethod out;
  ExprTyper t(v, cls, nullptr, out);
  t.runFieldInit(f);
  return out;
}

}  // namespace minij
