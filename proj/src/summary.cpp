#include "minij/summary.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "minij/parser.hpp"
#include "minij/typing.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace minij {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string surface_of(const ClassSummary& s) {
  std::ostringstream os;
  os << s.name << '|' << s.pkg << '|' << (s.isEnum ? "enum" : "class") << '|'
     << join(s.typeParams, ",") << '|' << s.extendsType << '|' << join(s.enumConsts, ",")
     << '\n';
  for (const auto& f : s.fields)
    os << "f " << f.name << ' ' << f.isStatic << f.isFinal << ' ' << f.type << '\n';
  for (const auto& m : s.methods)
    os << "m " << m.name << ' ' << m.isStatic << " <" << join(m.typeParams, ",") << "> " << m.ret
       << " (" << join(m.paramTypes, ",") << ") (" << join(m.paramNames, ",") << ")\n";
  for (const auto& [f, q] : s.staticFinalQuals) os << "sf " << f << ' ' << q << '\n';
  return os.str();
}

json to_json(const ClassSummary& s) {
  json j;
  j["class"] = s.name;
  j["pkg"] = s.pkg;
  j["unit"] = s.unitPath;
  j["unitHash"] = s.unitHash;
  j["enum"] = s.isEnum;
  j["typeParams"] = s.typeParams;
  j["extends"] = s.extendsType;
  j["enumConsts"] = s.enumConsts;
  json fields = json::array();
  for (const auto& f : s.fields)
    fields.push_back(
        {{"name", f.name}, {"static", f.isStatic}, {"final", f.isFinal}, {"type", f.type}});
  j["fields"] = fields;
  json methods = json::array();
  for (const auto& m : s.methods)
    methods.push_back({{"name", m.name},
                       {"static", m.isStatic},
                       {"typeParams", m.typeParams},
                       {"ret", m.ret},
                       {"paramTypes", m.paramTypes},
                       {"paramNames", m.paramNames}});
  j["methods"] = methods;
  j["staticFinalQuals"] = s.staticFinalQuals;
  json diags = json::array();
  for (const auto& d : s.diags)
    diags.push_back({{"file", d.file},
                     {"line", d.line},
                     {"col", d.col},
                     {"kind", d.kind},
                     {"flavor", d.flavor},
                     {"lhs", d.lhs},
                     {"rhs", d.rhs},
                     {"owner", d.owner}});
  j["diags"] = diags;
  j["sigHash"] = s.sigHash;
  return j;
}

ClassSummary from_json(const json& j) {
  ClassSummary s;
  s.name = j.at("class").get<std::string>();
  s.pkg = j.value("pkg", "");
  s.unitPath = j.value("unit", "");
  s.unitHash = j.value("unitHash", "");
  s.isEnum = j.value("enum", false);
  s.typeParams = j.value("typeParams", std::vector<std::string>{});
  s.extendsType = j.value("extends", "");
  s.enumConsts = j.value("enumConsts", std::vector<std::string>{});
  for (const auto& f : j.value("fields", json::array()))
    s.fields.push_back(FieldSummary{f.at("name").get<std::string>(), f.value("static", false),
                                    f.value("final", false), f.at("type").get<std::string>()});
  for (const auto& m : j.value("methods", json::array())) {
    MethodSummary ms;
    ms.name = m.at("name").get<std::string>();
    ms.isStatic = m.value("static", false);
    ms.typeParams = m.value("typeParams", std::vector<std::string>{});
    ms.ret = m.at("ret").get<std::string>();
    ms.paramTypes = m.value("paramTypes", std::vector<std::string>{});
    ms.paramNames = m.value("paramNames", std::vector<std::string>{});
    s.methods.push_back(std::move(ms));
  }
  if (j.contains("staticFinalQuals"))
    s.staticFinalQuals = j.at("staticFinalQuals").get<std::map<std::string, std::string>>();
  for (const auto& d : j.value("diags", json::array())) {
    DiagSummary ds;
    ds.file = d.at("file").get<std::string>();
    ds.line = d.at("line").get<int>();
    ds.col = d.at("col").get<int>();
    ds.kind = d.at("kind").get<int>();
    ds.flavor = d.at("flavor").get<int>();
    ds.lhs = d.at("lhs").get<std::string>();
    ds.rhs = d.at("rhs").get<std::string>();
    ds.owner = d.value("owner", "");
    s.diags.push_back(std::move(ds));
  }
  s.sigHash = j.value("sigHash", "");
  return s;
}

}  // namespace

std::string config_fingerprint(const CheckConfig& cfg) {
  std::ostringstream os;
  os << cfg.annotatedPackages << '\n';
  for (const auto& s : cfg.sources) os << "src " << s << '\n';
  for (const auto& [id, ix] : cfg.sinks) os << "snk " << id << ' ' << ix << '\n';
  for (const auto& s : cfg.sanitizers) os << "san " << s << '\n';
  os << "cd " << cfg.constructDefaulting << '\n';
  // Stub semantics live in the files, so their contents participate.
  for (const auto& p : cfg.stubPaths) os << "stub " << p << ' ' << content_hash(read_file(p)) << '\n';
  return content_hash(os.str());
}

bool SummaryStore::load(const std::string& cfgHash) {
  classes_.clear();
  cfgHash_ = cfgHash;
  if (dir_.empty()) return false;
  fs::path d(dir_);
  std::error_code ec;
  if (!fs::exists(d, ec)) return false;
  fs::path meta = d / "store.json";
  if (!fs::exists(meta, ec)) return false;
  try {
    json mj = json::parse(read_file(meta.string()));
    if (mj.value("cfg", "") != cfgHash) return false;
    for (const auto& entry : fs::directory_iterator(d)) {
      if (!entry.is_regular_file()) continue;
      if (entry.path().extension() != ".json" || entry.path().filename() == "store.json") continue;
      ClassSummary s = from_json(json::parse(read_file(entry.path().string())));
      classes_[s.name] = std::move(s);
    }
  } catch (const std::exception&) {
    classes_.clear();
    return false;
  }
  return !classes_.empty();
}

void SummaryStore::save() const {
  if (dir_.empty()) return;
  fs::path d(dir_);
  std::error_code ec;
  fs::create_directories(d, ec);
  for (const auto& entry : fs::directory_iterator(d, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      fs::remove(entry.path(), ec);
  }
  {
    std::ofstream out(d / "store.json", std::ios::binary);
    json mj;
    mj["cfg"] = cfgHash_;
    out << mj.dump(2) << '\n';
  }
  for (const auto& [name, s] : classes_) {
    std::ofstream out(d / (name + ".json"), std::ios::binary);
    out << to_json(s).dump(2) << '\n';
  }
}

const ClassSummary* SummaryStore::find(const std::string& cls) const {
  auto it = classes_.find(cls);
  return it == classes_.end() ? nullptr : &it->second;
}

void SummaryStore::put(ClassSummary s) { classes_[s.name] = std::move(s); }

void SummaryStore::remove_class(const std::string& cls) { classes_.erase(cls); }

void SummaryStore::remove_unit(const std::string& unitPath, const std::vector<std::string>& keep) {
  for (auto it = classes_.begin(); it != classes_.end();) {
    if (it->second.unitPath == unitPath &&
        std::find(keep.begin(), keep.end(), it->first) == keep.end())
      it = classes_.erase(it);
    else
      ++it;
  }
}

std::vector<std::pair<std::string, std::string>> SummaryStore::synthesize_units(
    const std::string& excludePath, bool pinStaticFinals) const {
  std::map<std::string, std::vector<const ClassSummary*>> byUnit;
  for (const auto& [name, s] : classes_) {
    if (s.unitPath == excludePath) continue;
    byUnit[s.unitPath].push_back(&s);
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [path, members] : byUnit) {
    std::ostringstream os;
    if (!members.empty() && !members.front()->pkg.empty())
      os << "package " << members.front()->pkg << ";\n\n";
    for (const ClassSummary* s : members) {
      if (s->isEnum) {
        os << "enum " << s->name << " { " << join(s->enumConsts, ", ") << " }\n\n";
        continue;
      }
      os << "class " << s->name;
      if (!s->typeParams.empty()) os << "<" << join(s->typeParams, ", ") << ">";
      if (!s->extendsType.empty()) os << " extends " << s->extendsType;
      os << " {\n";
      for (const auto& f : s->fields) {
        std::string t = f.type;
        if (pinStaticFinals && f.isStatic && f.isFinal) {
          auto it = s->staticFinalQuals.find(f.name);
          // The initializer is gone, so its derived qualifier is pinned as an
          // explicit annotation. Arrays have no spelling for the reference
          // qualifier and keep the conservative default.
          if (it != s->staticFinalQuals.end() && it->second == "Untainted" && !t.empty() &&
              t[0] != '@' && t.find("[]") == std::string::npos)
            t = "@Untainted " + t;
        }
        os << "  " << (f.isStatic ? "static " : "") << (f.isFinal ? "final " : "") << t << ' '
           << f.name << ";\n";
      }
      for (const auto& m : s->methods) {
        os << "  " << (m.isStatic ? "static " : "");
        if (!m.typeParams.empty()) os << "<" << join(m.typeParams, ", ") << "> ";
        os << m.ret << ' ' << m.name << "(";
        for (size_t i = 0; i < m.paramTypes.size(); ++i) {
          if (i) os << ", ";
          os << m.paramTypes[i] << ' '
             << (i < m.paramNames.size() ? m.paramNames[i] : "a" + std::to_string(i));
        }
        os << ") { }\n";
      }
      os << "}\n\n";
    }
    out.emplace_back(path, os.str());
  }
  return out;
}

ClassSummary build_class_summary(const DBView& view, const ClassInfo& cls,
                                 const std::vector<Diagnostic>& classDiags) {
  ClassSummary s;
  s.name = cls.name;
  s.pkg = cls.pkg;
  s.isEnum = cls.kind == ClassInfo::Kind::Enum;
  const SourceUnit* unit = view.unit_of(cls);
  s.unitPath = unit ? unit->path : "";
  if (cls.unitIndex >= 0) s.unitHash = view.db().unit_hash(cls.unitIndex);
  s.typeParams = cls.typeParams;
  if (cls.extends) s.extendsType = unparse_type(*cls.extends);
  s.enumConsts = cls.enumConsts;
  for (const FieldInfo& f : cls.fields) {
    s.fields.push_back(FieldSummary{f.name, f.isStatic, f.isFinal, unparse_type(f.type)});
    if (f.isStatic && f.isFinal)
      s.staticFinalQuals[f.name] = qualifier_name(view.static_final_qual(cls, f));
  }
  for (const MethodInfo& m : cls.methods) {
    MethodSummary ms;
    ms.name = m.name;
    ms.isStatic = m.isStatic;
    ms.typeParams = m.typeParams;
    ms.ret = unparse_type(m.returnType);
    for (const ParamInfo& p : m.params) {
      ms.paramTypes.push_back(unparse_type(p.type));
      ms.paramNames.push_back(p.name);
    }
    s.methods.push_back(std::move(ms));
  }
  for (const Diagnostic& d : classDiags)
    if (d.ownerClass == cls.name)
      s.diags.push_back(DiagSummary{d.file, d.line, d.col, (int)d.kind, (int)d.flavor,
                                    render_type(d.lhs), render_type(d.rhs), d.ownerClass});
  s.sigHash = content_hash(surface_of(s));
  return s;
}

Diagnostic diag_from_summary(const DiagSummary& s) {
  Diagnostic d;
  d.kind = (Diagnostic::Kind)s.kind;
  d.flavor = (AssignFlavor)s.flavor;
  d.file = s.file;
  d.line = s.line;
  d.col = s.col;
  d.lhs = parse_rendered_type(s.lhs);
  d.rhs = parse_rendered_type(s.rhs);
  d.ownerClass = s.owner;
  return d;
}

namespace {

// Grammar of render_type: "Qual core" where core is "(elem)[]" for arrays or
// "Name<arg, arg>" otherwise.
QualifiedType parse_rendered(const std::string& s, size_t& pos) {
  size_t sp = s.find(' ', pos);
  Qualifier q = Qualifier::Tainted;
  if (sp != std::string::npos) {
    auto qn = qualifier_from_name(s.substr(pos, sp - pos));
    if (qn) q = *qn;
    pos = sp + 1;
  }
  if (pos < s.size() && s[pos] == '(') {
    ++pos;
    QualifiedType elem = parse_rendered(s, pos);
    if (pos < s.size() && s[pos] == ')') ++pos;
    if (pos + 1 < s.size() && s[pos] == '[' && s[pos + 1] == ']') pos += 2;
    return make_array(q, std::move(elem));
  }
  size_t start = pos;
  while (pos < s.size() && s[pos] != '<' && s[pos] != '>' && s[pos] != ',' && s[pos] != ')')
    ++pos;
  std::string name = s.substr(start, pos - start);
  while (!name.empty() && name.back() == ' ') name.pop_back();
  std::vector<QualifiedType> args;
  if (pos < s.size() && s[pos] == '<') {
    ++pos;
    while (pos < s.size() && s[pos] != '>') {
      args.push_back(parse_rendered(s, pos));
      if (pos < s.size() && s[pos] == ',') {
        ++pos;
        if (pos < s.size() && s[pos] == ' ') ++pos;
      }
    }
    if (pos < s.size() && s[pos] == '>') ++pos;
  }
  if (is_primitive_name(name)) return make_primitive(q, name);
  return make_named(q, std::move(name), std::move(args));
}

}  // namespace

QualifiedType parse_rendered_type(const std::string& s) {
  size_t pos = 0;
  return parse_rendered(s, pos);
}

UnitCheckResult check_unit_incremental(const std::string& path, const std::string& text,
                                       SummaryStore& store, const CheckConfig& cfg,
                                       const StubSet& stubs) {
  UnitCheckResult res;
  auto pr = parse_unit(path, text);
  if (!pr.ok()) {
    std::string msg = "parse failed for " + path;
    if (!pr.errors.empty()) msg += ": " + pr.errors.front().message;
    res.stale = StaleStore{msg};
    return res;
  }
  std::vector<SourceUnit> units;
  units.push_back(std::move(*pr.unit));
  for (auto& [spath, stext] : store.synthesize_units(path, cfg.constructDefaulting)) {
    auto sp = parse_unit(spath, stext);
    if (!sp.ok()) {
      res.stale = StaleStore{"stored summary for " + spath + " no longer parses"};
      return res;
    }
    units.push_back(std::move(*sp.unit));
  }
  auto rr = resolve(std::move(units), stubs);
  if (!rr.ok()) {
    std::string msg = "store is missing a referenced class";
    if (!rr.errors.empty()) msg += ": " + rr.errors.front().message;
    res.stale = StaleStore{msg};
    return res;
  }
  DBView view(rr.db.get(), &cfg, nullptr);
  view.precompute_static_finals();
  std::vector<Diagnostic> diags;
  for (const auto& [name, ci] : rr.db->classes) {
    if (ci.isBuiltin() || ci.unitIndex != 0) continue;
    auto ds = check_class(view, ci, nullptr, nullptr);
    for (auto& d : ds) diags.push_back(std::move(d));
  }
  finalize_diagnostics(diags);

  std::vector<std::string> keep;
  for (const auto& [name, ci] : rr.db->classes) {
    if (ci.isBuiltin() || ci.unitIndex != 0) continue;
    ClassSummary ns = build_class_summary(view, ci, diags);
    const ClassSummary* old = store.find(name);
    if (!old || old->sigHash != ns.sigHash) res.changedSignatures.push_back(name);
    keep.push_back(name);
    store.put(std::move(ns));
  }
  store.remove_unit(path, keep);
  res.diags = std::move(diags);
  return res;
}

IncrementalOutcome incremental_check(const ProgramDB& db, const CheckConfig& cfg,
                                     SummaryStore& store, int jobs) {
  (void)jobs;
  IncrementalOutcome out;
  DBView view(&db, &cfg, nullptr);
  view.precompute_static_finals();

  std::map<std::string, ClassSummary> fresh;
  for (const auto& [name, ci] : db.classes)
    if (!ci.isBuiltin()) fresh[name] = build_class_summary(view, ci, {});

  std::set<std::string> dirty;
  std::set<std::string> sigChanged;
  for (const auto& [name, cur] : fresh) {
    const ClassSummary* old = store.find(name);
    if (!old || old->unitHash != cur.unitHash || old->unitPath != cur.unitPath) {
      dirty.insert(name);
      if (!old || old->sigHash != cur.sigHash) sigChanged.insert(name);
    }
  }
  auto rev = reverse_dependencies(db);
  std::set<std::string> recheck = dirty;
  for (const auto& name : sigChanged) {
    auto clo = dependency_closure(name, rev);
    recheck.insert(clo.begin(), clo.end());
  }

  std::vector<Diagnostic> diags;
  for (const auto& [name, ci] : db.classes) {
    if (ci.isBuiltin()) continue;
    if (recheck.count(name)) {
      auto ds = check_class(view, ci, nullptr, nullptr);
      for (auto& d : ds) diags.push_back(std::move(d));
      ++out.recheckedClasses;
    } else {
      for (const DiagSummary& d : store.find(name)->diags)
        diags.push_back(diag_from_summary(d));
      ++out.replayedClasses;
    }
  }
  finalize_diagnostics(diags);

  std::set<std::string> keep;
  for (auto& [name, cur] : fresh) {
    for (const Diagnostic& d : diags)
      if (d.ownerClass == name)
        cur.diags.push_back(DiagSummary{d.file, d.line, d.col, (int)d.kind, (int)d.flavor,
                                        render_type(d.lhs), render_type(d.rhs), d.ownerClass});
    keep.insert(name);
    store.put(std::move(cur));
  }
  std::vector<std::string> gone;
  for (const auto& [name, s] : store.classes())
    if (!keep.count(name)) gone.push_back(name);
  for (const auto& name : gone) store.remove_class(name);

  out.diags = std::move(diags);
  return out;
}

}  // namespace minij
