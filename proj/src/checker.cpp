#include "minij/checker.hpp"

#include <json.hpp>

#include <algorithm>
#include <thread>

namespace minij {

namespace {

// Inherited methods participate in override checks with the superclass's type
// parameters instantiated through the extends chain.
Substitution super_subst(const DBView& v, const ClassInfo& sub, const ClassInfo& super) {
  Substitution s;
  if (super.typeParams.empty()) return s;
  auto up = upcast_type(v, v.this_type(sub), super.name);
  if (up && up->args.size() == super.typeParams.size())
    for (size_t i = 0; i < super.typeParams.size(); ++i) s[super.typeParams[i]] = up->args[i];
  return s;
}

void check_overrides(const DBView& v, const ClassInfo& cls, const std::string& file,
                     std::vector<Diagnostic>& out) {
  for (const auto& m : cls.methods) {
    const ClassInfo* sup = v.db().find_class(cls.superName);
    while (sup) {
      const MethodInfo* sm = sup->method(m.name);
      if (sm && sm->params.size() == m.params.size()) {
        if (sup->isBuiltin() || !v.class_annotated(*sup)) break;
        Substitution s = super_subst(v, cls, *sup);
        QualifiedType superRet = apply_subst(s, v.return_type(*sup, *sm));
        QualifiedType subRet = v.return_type(cls, m);
        bool bad = !subtype_ok(subRet, superRet);
        QualifiedType lhs = superRet, rhs = subRet;
        for (size_t i = 0; !bad && i < m.params.size(); ++i) {
          QualifiedType superP = apply_subst(s, v.param_type(*sup, *sm, (int)i));
          QualifiedType subP = v.param_type(cls, m, (int)i);
          if (!subtype_ok(superP, subP)) {  // contravariance
            bad = true;
            lhs = subP;
            rhs = superP;
          }
        }
        if (bad) {
          Diagnostic d;
          d.kind = Diagnostic::Kind::OverrideIncompat;
          d.flavor = AssignFlavor::Override;
          d.file = file;
          d.line = m.nameSpan.line;
          d.col = m.nameSpan.col;
          d.span = m.nameSpan;
          d.lhs = lhs;
          d.rhs = rhs;
          d.ownerClass = cls.name;
          out.push_back(std::move(d));
        }
        break;
      }
      sup = v.db().find_class(sup->superName);
    }
  }
}

}  // namespace

std::string diag_kind_name(Diagnostic::Kind k) {
  return k == Diagnostic::Kind::AssignmentIncompat ? "AssignmentIncompat" : "OverrideIncompat";
}

bool diag_less(const Diagnostic& a, const Diagnostic& b) {
  auto key = [](const Diagnostic& d) {
    return std::tuple<const std::string&, int, int, int, int, std::string, std::string>(
        d.file, d.line, d.col, (int)d.kind, (int)d.flavor, render_type(d.lhs),
        render_type(d.rhs));
  };
  return key(a) < key(b);
}

std::vector<Diagnostic> check_class(const DBView& view, const ClassInfo& cls,
                                    const SearchConfig* searchCfg,
                                    std::map<std::string, TypedMethod>* typedCache) {
  std::vector<Diagnostic> out;
  if (cls.isBuiltin() || !view.class_annotated(cls)) return out;
  std::string file = view.file_of(cls);

  static const SearchConfig kDefaultSearch;
  FixCtx fc;
  fc.view = &view;
  fc.search = searchCfg ? searchCfg : &kDefaultSearch;
  std::map<std::string, TypedMethod> localCache;
  fc.typedCache = typedCache ? typedCache : &localCache;

  auto collect = [&](const TypedMethod& tm, const MethodInfo* m) {
    MethodRef ref;
    ref.cls = &cls;
    ref.method = m;
    ref.typed = &tm;
    for (const auto& pa : tm.assigns) {
      if (pa.ok) continue;
      Diagnostic d;
      d.kind = Diagnostic::Kind::AssignmentIncompat;
      d.flavor = pa.flavor;
      d.file = file;
      d.line = pa.span.line;
      d.col = pa.span.col;
      d.span = pa.span;
      d.lhs = pa.required;
      d.rhs = pa.actual;
      d.ownerClass = cls.name;
      if (view.cfg().emitFixes) d.fixes = candidate_fixes(fc, ref, pa);
      out.push_back(std::move(d));
    }
  };

  for (const auto& f : cls.fields) {
    if (!f.init) continue;
    TypedMethod tm = type_field_init(view, cls, f);
    collect(tm, nullptr);
  }
  for (const auto& m : cls.methods) {
    auto& slot = (*fc.typedCache)[cls.name + "#" + m.name];
    slot = type_method(view, cls, m);
    collect(slot, &m);
  }
  check_overrides(view, cls, file, out);
  return out;
}

std::vector<Diagnostic> check_program(const DBView& view, int jobs,
                                      const SearchConfig* searchCfg) {
  view.precompute_static_finals();

  std::vector<const ClassInfo*> order;
  for (const auto& [name, cls] : view.db().classes)
    if (!cls.isBuiltin()) order.push_back(&cls);

  std::vector<std::vector<Diagnostic>> per(order.size());
  unsigned hw = std::thread::hardware_concurrency();
  size_t nthreads = jobs > 0 ? (size_t)jobs : (hw ? hw : 1);
  nthreads = std::min(nthreads, order.size());

  if (nthreads <= 1 || order.size() <= 1) {
    std::map<std::string, TypedMethod> cache;
    for (size_t i = 0; i < order.size(); ++i)
      per[i] = check_class(view, *order[i], searchCfg, &cache);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      std::map<std::string, TypedMethod> cache;
      for (size_t i = next.fetch_add(1); i < order.size(); i = next.fetch_add(1))
        per[i] = check_class(view, *order[i], searchCfg, &cache);
    };
    std::vector<std::thread> pool;
    for (size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<Diagnostic> all;
  for (auto& v : per)
    for (auto& d : v) all.push_back(std::move(d));
  finalize_diagnostics(all);
  return all;
}

void finalize_diagnostics(std::vector<Diagnostic>& diags) {
  std::stable_sort(diags.begin(), diags.end(), diag_less);
  diags.erase(std::unique(diags.begin(), diags.end(),
                          [](const Diagnostic& a, const Diagnostic& b) {
                            return a.file == b.file && a.line == b.line && a.col == b.col &&
                                   a.kind == b.kind && render_type(a.lhs) == render_type(b.lhs) &&
                                   render_type(a.rhs) == render_type(b.rhs);
                          }),
              diags.end());
}

std::string diag_json(const Diagnostic& d) {
  nlohmann::json j;
  j["file"] = d.file;
  j["line"] = d.line;
  j["col"] = d.col;
  j["kind"] = diag_kind_name(d.kind);
  j["lhs"] = render_type(d.lhs);
  j["rhs"] = render_type(d.rhs);
  nlohmann::json fixes = nlohmann::json::array();
  for (const auto& fs : d.fixes) {
    nlohmann::json set = nlohmann::json::array();
    for (const auto& f : fs.fixes()) {
      nlohmann::json site;
      site["file"] = f.site.file;
      site["line"] = f.site.line;
      site["col"] = f.site.col;
      site["kind"] = site_kind_name(f.site.kind);
      site["owner"] = f.site.owner;
      site["member"] = f.site.member;
      site["index"] = f.site.index;
      site["localId"] = f.site.localId;
      site["path"] = f.site.path;
      set.push_back({{"site", site}, {"ann", qualifier_name(f.ann)}});
    }
    fixes.push_back(set);
  }
  j["fixes"] = fixes;
  return j.dump();
}

std::string diag_human(const Diagnostic& d) {
  std::string loc = d.file + ":" + std::to_string(d.line) + ":" + std::to_string(d.col);
  if (d.kind == Diagnostic::Kind::OverrideIncompat)
    return loc + ": error: invalid override: " + render_type(d.rhs) + " is incompatible with " +
           render_type(d.lhs);
  std::string verb;
  switch (d.flavor) {
    case AssignFlavor::CallArg:
      verb = "passed to";
      break;
    case AssignFlavor::Return:
      verb = "returned as";
      break;
    case AssignFlavor::ArrayElem:
    case AssignFlavor::CtorArg:
      verb = "stored into";
      break;
    default:
      verb = "assigned to";
      break;
  }
  return loc + ": error: " + render_type(d.rhs) + " " + verb + " " + render_type(d.lhs);
}

}  // namespace minij
