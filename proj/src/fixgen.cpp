#include "minij/fixgen.hpp"

#include <algorithm>
#include <set>

namespace minij {

namespace {

QualifiedType untop(const QualifiedType& t) { return with_qual(t, Qualifier::Untainted); }

const QualifiedType* type_of(const MethodRef& in, const Expr* e) {
  auto it = in.typed->exprTypes.find(e);
  return it == in.typed->exprTypes.end() ? nullptr : &it->second;
}

bool raw_named(const DBView& v, const ParsedType& p) {
  if (p.isArray()) return false;
  const ClassInfo* ci = v.db().find_class(p.name);
  return ci && !ci->typeParams.empty() && p.args.empty();
}

void collect_vars(const QualifiedType& t, std::set<std::string>& out) {
  if (t.isTypeVar()) out.insert(t.name);
  for (const auto& a : t.args) collect_vars(a, out);
}

std::vector<std::string> decl_tvars(const ClassInfo& cls, const MethodInfo* m) {
  std::vector<std::string> tv = cls.typeParams;
  if (m) tv.insert(tv.end(), m->typeParams.begin(), m->typeParams.end());
  return tv;
}

// One position of the update walk. A needed change is refused where the
// declaration already carries an annotation (source or overlay), where there
// is no insertion point (array references, raw generics), and at type
// variable occurrences, whose written qualifier would not survive
// substitution.
bool walk_update(FixCtx& ctx, const ClassInfo& ownerCls, AnnotationSite& site,
                 const ParsedType& parsed, const QualifiedType& cur, const QualifiedType& target,
                 FixOrigin origin, const std::vector<std::string>& tvars, FixSet& out) {
  const DBView& v = *ctx.view;
  if (cur.qual != target.qual) {
    if (parsed.ann) return false;
    if (v.overlay() && v.overlay()->get(site)) return false;
    if (parsed.isArray()) return false;
    if (raw_named(v, parsed)) return false;
    if (cur.isTypeVar()) return false;
    if (std::find(tvars.begin(), tvars.end(), parsed.name) != tvars.end()) return false;
    Fix f;
    f.site = site;
    f.site.file = v.file_of(ownerCls);
    f.site.line = parsed.annPos.line;
    f.site.col = parsed.annPos.col;
    f.site.offset = parsed.annPos.offset;
    f.ann = target.qual;
    f.origin = origin;
    out.add(f);
    if (out.isBottom()) return false;
  }
  if (cur.args.size() != target.args.size() || cur.args.size() != parsed.args.size())
    return cur.args.empty() && target.args.empty();
  for (size_t i = 0; i < cur.args.size(); ++i) {
    site.path.push_back((int)i);
    bool ok = walk_update(ctx, ownerCls, site, parsed.args[i], cur.args[i], target.args[i],
                          origin, tvars, out);
    site.path.pop_back();
    if (!ok) return false;
  }
  return true;
}

}  // namespace

std::optional<QualifiedType> set_qual_at_path(const QualifiedType& t, const std::vector<int>& path,
                                              Qualifier q) {
  QualifiedType r = t;
  QualifiedType* cur = &r;
  for (int step : path) {
    if (step < 0 || step >= (int)cur->args.size()) return std::nullopt;
    cur = &cur->args[step];
  }
  cur->qual = q;
  return r;
}

const TypedMethod& typed_body(FixCtx& ctx, const ClassInfo& cls, const MethodInfo& m) {
  std::string key = cls.name + "#" + m.name;
  auto it = ctx.typedCache->find(key);
  if (it != ctx.typedCache->end()) return it->second;
  TypedMethod tm = type_method(*ctx.view, cls, m);
  return ctx.typedCache->emplace(key, std::move(tm)).first->second;
}

FixSet update_type(FixCtx& ctx, const ClassInfo& ownerCls, const AnnotationSite& base,
                   const ParsedType& parsed, const QualifiedType& current,
                   const QualifiedType& target, FixOrigin origin,
                   const std::vector<std::string>& tvars) {
  if (ownerCls.isBuiltin()) return FixSet::bottom();
  if (!ctx.view->class_annotated(ownerCls)) return FixSet::bottom();
  if (!same_shape(current, target)) return FixSet::bottom();
  AnnotationSite site = base;
  FixSet out;
  if (!walk_update(ctx, ownerCls, site, parsed, current, target, origin, tvars, out))
    return FixSet::bottom();
  return out;
}

FixSet make_untainted(FixCtx& ctx, const MethodRef& in, const Expr* e, int depth,
                      FixOrigin origin) {
  const QualifiedType* t = type_of(in, e);
  if (!t) return FixSet::bottom();
  return find_annots(ctx, in, e, untop(*t), depth, origin);
}

FixSet generics_annots(FixCtx& ctx, const MethodRef& in, const CallExpr* call,
                       const CallInfo& info, const QualifiedType& target, int depth) {
  const DBView& v = *ctx.view;
  // Method-level variables cannot be pinned by re-instantiating the receiver.
  std::set<std::string> vars;
  collect_vars(info.sig.returnType, vars);
  for (const auto& mv : info.method->typeParams)
    if (vars.count(mv)) return FixSet::bottom();
  auto sb = find_type_subst(info.sig.returnType, target);
  if (!sb) return FixSet::bottom();
  const Expr* recvE = call->recv.get();
  if (!recvE) return FixSet::bottom();
  const QualifiedType* recvCur = type_of(in, recvE);
  if (!recvCur) return FixSet::bottom();
  auto up = upcast_type(v, *recvCur, info.owner->name);
  if (!up || up->args.size() != info.owner->typeParams.size()) return FixSet::bottom();
  QualifiedType req = *up;
  for (size_t i = 0; i < info.owner->typeParams.size(); ++i) {
    auto it = sb->find(info.owner->typeParams[i]);
    if (it != sb->end()) req.args[i] = it->second;
  }
  auto tgt = fix_target(v, *recvCur, req);
  if (!tgt) return FixSet::bottom();
  return find_annots(ctx, in, recvE, *tgt, depth, FixOrigin::Generics);
}

FixSet polytaint_annots(FixCtx& ctx, const MethodRef& in, const CallExpr* call,
                        const CallInfo& info, const QualifiedType& target, int depth) {
  (void)target;
  const DBView& v = *ctx.view;
  if (depth >= ctx.search->polyDepth) return FixSet::bottom();
  const ClassInfo& callee = *info.owner;
  const MethodInfo& mi = *info.method;
  MethodRef ref;
  ref.cls = &callee;
  ref.method = &mi;
  ref.typed = &typed_body(ctx, callee, mi);
  std::vector<std::string> tv = decl_tvars(callee, &mi);
  QualifiedType declRet = v.return_type(callee, mi);

  // Make every returned value untainted, chasing fixes on locals through
  // the assignments that feed them.
  FixSet f;
  for (const auto& pa : ref.typed->assigns) {
    if (pa.flavor != AssignFlavor::Return) continue;
    const QualifiedType* rt = type_of(ref, pa.rhsExpr);
    if (!rt) {
      f = FixSet::bottom();
      break;
    }
    f = f.combine(find_annots(ctx, ref, pa.rhsExpr, untop(*rt), depth + 1));
    if (f.isBottom()) break;
  }
  std::set<int> processed;
  while (!f.isBottom()) {
    const Fix* localFix = nullptr;
    for (const auto& fx : f.fixes()) {
      if (fx.site.kind == AnnotationSite::Kind::LocalType && fx.site.owner == callee.name &&
          fx.site.member == mi.name && !processed.count(fx.site.localId)) {
        localFix = &fx;
        break;
      }
    }
    if (!localFix) break;
    Fix fx = *localFix;
    processed.insert(fx.site.localId);
    FixSet rest;
    for (const auto& other : f.fixes())
      if (!(other.site == fx.site && other.ann == fx.ann)) rest.add(other);
    f = rest;
    for (const auto& pa : ref.typed->assigns) {
      if (pa.flavor != AssignFlavor::LocalAssign || pa.localId != fx.site.localId) continue;
      const QualifiedType* rt = type_of(ref, pa.rhsExpr);
      auto want = rt ? set_qual_at_path(*rt, fx.site.path, fx.ann) : std::nullopt;
      if (!want) {
        f = FixSet::bottom();
        break;
      }
      f = f.combine(find_annots(ctx, ref, pa.rhsExpr, *want, depth + 1));
      if (f.isBottom()) break;
    }
  }

  std::set<int> ptIndices;
  FixSet nonParams;
  if (!f.isBottom()) {
    for (const auto& fx : f.fixes()) {
      if (fx.site.kind == AnnotationSite::Kind::ParamType && fx.site.owner == callee.name &&
          fx.site.member == mi.name && fx.site.path.empty()) {
        ptIndices.insert(fx.site.index);
      } else {
        nonParams.add(fx);
      }
    }
  }

  if (f.isBottom() || ptIndices.empty()) {
    // No parameter dependence found: force the return itself untainted.
    return update_type(ctx, callee, return_site(callee, mi), mi.returnType, declRet,
                       untop(declRet), FixOrigin::PolyFallback, tv);
  }

  FixSet out = update_type(ctx, callee, return_site(callee, mi), mi.returnType, declRet,
                           with_qual(declRet, Qualifier::PolyTaint), FixOrigin::PolyParams, tv);
  for (int pi : ptIndices) {
    if (pi < 0 || pi >= (int)mi.params.size()) return FixSet::bottom();
    QualifiedType declP = v.param_type(callee, mi, pi);
    out = out.combine(update_type(ctx, callee, param_site(callee, mi, pi), mi.params[pi].type,
                                  declP, with_qual(declP, Qualifier::PolyTaint),
                                  FixOrigin::PolyParams, tv));
    if (out.isBottom()) return out;
  }
  out = out.combine(nonParams);
  for (int pi : ptIndices) {
    if (pi >= (int)call->args.size()) return FixSet::bottom();
    out = out.combine(make_untainted(ctx, in, call->args[pi].get(), depth + 1));
    if (out.isBottom()) return out;
  }
  return out;
}

FixSet find_annots(FixCtx& ctx, const MethodRef& in, const Expr* e, const QualifiedType& target,
                   int depth, FixOrigin origin) {
  const DBView& v = *ctx.view;
  const QualifiedType* curP = type_of(in, e);
  if (!curP) return FixSet::bottom();
  const QualifiedType cur = *curP;
  if (same_shape(cur, target) && is_subtype(cur, target)) return FixSet();

  switch (e->kind) {
    case ExprKind::IntLit:
    case ExprKind::StringLit:
    case ExprKind::ClassLit:
    case ExprKind::Lambda:
      return FixSet::bottom();

    case ExprKind::Name: {
      auto* n = static_cast<const NameExpr*>(e);
      auto tgt = fix_target(v, cur, target);
      if (!tgt) return FixSet::bottom();
      switch (n->ref) {
        case RefKind::Local: {
          if (!in.method) return FixSet::bottom();
          const auto& locals = v.db().locals_of(in.cls->name, in.method->name);
          if (n->localId < 0 || n->localId >= (int)locals.size()) return FixSet::bottom();
          return update_type(ctx, *in.cls, local_site(*in.cls, *in.method, n->localId),
                             locals[n->localId].decl->type, cur, *tgt, origin,
                             decl_tvars(*in.cls, in.method));
        }
        case RefKind::Param:
          if (!in.method) return FixSet::bottom();
          return update_type(ctx, *in.cls, param_site(*in.cls, *in.method, n->paramIndex),
                             in.method->params[n->paramIndex].type, cur, *tgt, origin,
                             decl_tvars(*in.cls, in.method));
        case RefKind::Field: {
          const ClassInfo* def = v.db().find_class(n->ownerClass);
          const FieldInfo* f = def ? def->field(n->name) : nullptr;
          if (!f) return FixSet::bottom();
          return update_type(ctx, *def, field_site(*def, *f), f->type, cur, *tgt, origin,
                             def->typeParams);
        }
        default:
          return FixSet::bottom();
      }
    }

    case ExprKind::FieldGet: {
      auto* g = static_cast<const FieldGetExpr*>(e);
      if (g->ref == RefKind::EnumConst) return FixSet::bottom();
      const ClassInfo* def = v.db().find_class(g->ownerClass);
      const FieldInfo* f = def ? def->field(g->name) : nullptr;
      if (!f) return FixSet::bottom();
      auto tgt = fix_target(v, cur, target);
      if (!tgt) return FixSet::bottom();
      return update_type(ctx, *def, field_site(*def, *f), f->type, cur, *tgt, origin,
                         def->typeParams);
    }

    case ExprKind::Binary: {
      auto* b = static_cast<const BinaryExpr*>(e);
      if (target.qual != Qualifier::Untainted) return FixSet::bottom();
      FixSet out = make_untainted(ctx, in, b->lhs.get(), depth, origin);
      if (out.isBottom()) return out;
      return out.combine(make_untainted(ctx, in, b->rhs.get(), depth, origin));
    }

    case ExprKind::Cast: {
      auto* c = static_cast<const CastExpr*>(e);
      if (has_explicit_ann(c->type)) return FixSet::bottom();
      if (!v.cfg().constructDefaulting) return FixSet::bottom();
      const QualifiedType* innerT = type_of(in, c->inner.get());
      if (!innerT) return FixSet::bottom();
      if (same_shape(*innerT, target))
        return find_annots(ctx, in, c->inner.get(), target, depth, origin);
      // Only the top level mirrors the casted expression.
      if (!(with_qual(cur, target.qual) == target)) return FixSet::bottom();
      return find_annots(ctx, in, c->inner.get(), with_qual(*innerT, target.qual), depth, origin);
    }

    case ExprKind::NewObject: {
      auto* nw = static_cast<const NewObjectExpr*>(e);
      const ClassInfo* ci = v.db().find_class(nw->type.name);
      bool mirror = ci && ci->isBuiltin() && !nw->args.empty() && nw->type.args.empty() &&
                    v.cfg().constructDefaulting && v.db().is_subclass(ci->name, "Collection");
      if (!mirror) return FixSet::bottom();
      const QualifiedType* srcT = type_of(in, nw->args[0].get());
      auto upT = upcast_type(v, target, "Collection");
      if (!srcT || !upT || upT->args.size() != 1) return FixSet::bottom();
      auto upSrc = upcast_type(v, *srcT, "Collection");
      if (!upSrc || upSrc->args.size() != 1) return FixSet::bottom();
      QualifiedType want = *upSrc;
      want.args[0] = upT->args[0];
      auto tgt = fix_target(v, *srcT, want);
      if (!tgt) return FixSet::bottom();
      return find_annots(ctx, in, nw->args[0].get(), *tgt, depth, origin);
    }

    case ExprKind::NewArray: {
      auto* na = static_cast<const NewArrayExpr*>(e);
      if (has_explicit_ann(na->elemType)) return FixSet::bottom();
      if (!v.cfg().constructDefaulting) return FixSet::bottom();
      if (!target.isArray() || !cur.isArray()) return FixSet::bottom();
      FixSet out;
      for (const auto& el : na->elems) {
        const QualifiedType* et = type_of(in, el.get());
        if (!et) return FixSet::bottom();
        auto tgt = fix_target(v, *et, target.elem());
        if (!tgt) return FixSet::bottom();
        out = out.combine(find_annots(ctx, in, el.get(), *tgt, depth, origin));
        if (out.isBottom()) return out;
      }
      return out;
    }

    case ExprKind::Call: {
      auto* c = static_cast<const CallExpr*>(e);
      QualifiedType recvT;
      const QualifiedType* recvPtr = nullptr;
      if (c->recv) {
        const QualifiedType* rt = type_of(in, c->recv.get());
        if (!rt) return FixSet::bottom();
        recvT = *rt;
        recvPtr = &recvT;
      } else if (!c->staticCall) {
        recvT = v.this_type(*in.cls);
        recvPtr = &recvT;
      }
      CallInfo info = analyze_call(v, *in.cls, *c, recvPtr);
      if (!info.owner || !info.method) return FixSet::bottom();
      switch (info.branch) {
        case CallInfo::Branch::Source:
        case CallInfo::Branch::Sanitizer:
        case CallInfo::Branch::Stub:
          return FixSet::bottom();
        default:
          break;
      }
      if (info.branch == CallInfo::Branch::Generics && ctx.search->genericsFix)
        return generics_annots(ctx, in, c, info, target, depth);

      bool polyEligible = ctx.search->polyFix && !info.owner->isBuiltin() &&
                          v.class_annotated(*info.owner) && info.method->decl &&
                          info.sig.returnType.qual != Qualifier::PolyTaint &&
                          !contains_typevar(info.sig.returnType);
      if (polyEligible) return polytaint_annots(ctx, in, c, info, target, depth);

      if (info.treatAsPoly || info.branch == CallInfo::Branch::PolyDefault) {
        // The result is the join over receiver and poly arguments; only a
        // fully untainted instantiation can be forced from the call site.
        if (target.qual != Qualifier::Untainted) return FixSet::bottom();
        if (!(with_qual(cur, target.qual) == target)) return FixSet::bottom();
        FixSet out;
        if (info.receiverInPolySet) {
          if (!c->recv) return FixSet::bottom();
          out = out.combine(make_untainted(ctx, in, c->recv.get(), depth, origin));
          if (out.isBottom()) return out;
        }
        for (int pi : info.ptArgs) {
          if (pi < 0 || pi >= (int)c->args.size()) return FixSet::bottom();
          out = out.combine(make_untainted(ctx, in, c->args[pi].get(), depth, origin));
          if (out.isBottom()) return out;
        }
        return out;
      }

      QualifiedType declRet = v.return_type(*info.owner, *info.method);
      auto tgt = fix_target(v, declRet, target);
      if (!tgt) return FixSet::bottom();
      return update_type(ctx, *info.owner, return_site(*info.owner, *info.method),
                         info.method->returnType, declRet, *tgt, origin,
                         decl_tvars(*info.owner, info.method));
    }
  }
  return FixSet::bottom();
}

std::vector<FixSet> candidate_fixes(FixCtx& ctx, const MethodRef& in, const PseudoAssign& pa) {
  std::vector<FixSet> out;
  if (pa.flavor == AssignFlavor::Override || !pa.rhsExpr) return out;
  const QualifiedType* cur = type_of(in, pa.rhsExpr);
  if (!cur) return out;
  auto tgt = fix_target(*ctx.view, *cur, pa.required);
  if (!tgt) return out;
  FixSet fs = find_annots(ctx, in, pa.rhsExpr, *tgt, 0);
  if (fs.isBottom() || fs.empty()) return out;
  int cap = ctx.search->maxAnnsPerWarning;
  if (cap > 0 && (int)fs.fixes().size() > cap) return out;
  out.push_back(std::move(fs));
  return out;
}

}  // namespace minij
