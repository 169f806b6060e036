#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "minij/bench.hpp"
#include "minij/checker.hpp"
#include "minij/config.hpp"
#include "minij/infer.hpp"
#include "minij/parser.hpp"
#include "minij/summary.hpp"

namespace fs = std::filesystem;
using namespace minij;

namespace {

constexpr int kExitClean = 0;
constexpr int kExitFindings = 1;
constexpr int kExitError = 2;

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ok = false;
    return "";
  }
  std::ostringstream os;
  os << in.rdbuf();
  ok = true;
  return os.str();
}

std::string join_path(const std::string& base, const std::string& rel) {
  if (rel.empty() || rel.front() == '/' || base.empty()) return rel;
  return base + "/" + rel;
}

// Paths written in a config file are relative to that file.
void anchor_config_paths(ToolConfig& tc) {
  if (tc.configDir.empty()) return;
  for (auto& d : tc.srcDirs) d = join_path(tc.configDir, d);
  for (auto& p : tc.check.stubPaths) p = join_path(tc.configDir, p);
  if (!tc.cacheDir.empty()) tc.cacheDir = join_path(tc.configDir, tc.cacheDir);
}

std::vector<std::string> collect_sources(const std::vector<std::string>& roots,
                                         std::string& err) {
  std::vector<std::string> files;
  for (const std::string& root : roots) {
    std::error_code ec;
    if (fs::is_regular_file(root, ec)) {
      files.push_back(root);
      continue;
    }
    if (fs::is_directory(root, ec)) {
      for (const auto& e : fs::recursive_directory_iterator(root, ec))
        if (e.is_regular_file() && e.path().extension() == ".mj")
          files.push_back(e.path().string());
      continue;
    }
    err = "no such file or directory: " + root;
    return {};
  }
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  return files;
}

bool load_units(const std::vector<std::string>& files, std::vector<SourceUnit>& units) {
  bool ok = true;
  for (const std::string& f : files) {
    bool readOk = false;
    std::string text = read_file(f, readOk);
    if (!readOk) {
      std::cerr << "error: cannot read " << f << "\n";
      ok = false;
      continue;
    }
    auto pr = parse_unit(f, text);
    if (!pr.ok()) {
      for (const auto& e : pr.errors)
        std::cerr << f << ":" << e.span.line << ":" << e.span.col << ": error: " << e.message
                  << "\n";
      ok = false;
      continue;
    }
    units.push_back(std::move(*pr.unit));
  }
  return ok;
}

struct LoadedProgram {
  std::shared_ptr<ProgramDB> db;
  StubSet stubs;
};

// Parses and resolves everything under srcDirs plus extra paths; null db on
// any error (already reported).
LoadedProgram load_program(const ToolConfig& tc, const std::vector<std::string>& extraPaths) {
  LoadedProgram lp;
  std::vector<std::string> roots = tc.srcDirs;
  for (const auto& p : extraPaths) roots.push_back(p);
  if (roots.empty()) {
    std::cerr << "error: no sources; pass paths or set srcDirs\n";
    return lp;
  }
  std::string err;
  auto files = collect_sources(roots, err);
  if (!err.empty()) {
    std::cerr << "error: " << err << "\n";
    return lp;
  }
  if (files.empty()) {
    std::cerr << "error: no .mj sources found\n";
    return lp;
  }
  std::vector<SourceUnit> units;
  if (!load_units(files, units)) return lp;
  lp.stubs = load_stub_files(tc.check.stubPaths);
  auto rr = resolve(std::move(units), lp.stubs);
  if (!rr.ok()) {
    for (const auto& e : rr.errors) std::cerr << e.file << ": error: " << e.message << "\n";
    return lp;
  }
  lp.db = rr.db;
  return lp;
}

void print_diags(const std::vector<Diagnostic>& diags, const std::string& format) {
  for (const Diagnostic& d : diags)
    std::cout << (format == "json" ? diag_json(d) : diag_human(d)) << "\n";
}

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return true;
}

int cmd_check(const ToolConfig& tc, const std::vector<std::string>& paths,
              const std::vector<std::string>& changed) {
  auto lp = load_program(tc, paths);
  if (!lp.db) return kExitError;
  CheckConfig cfg = tc.check;
  cfg.emitFixes = false;

  if (!changed.empty() && tc.cacheDir.empty()) {
    std::cerr << "error: --changed needs cacheDir\n";
    return kExitError;
  }

  if (!changed.empty()) {
    SummaryStore store(tc.cacheDir);
    std::string fp = config_fingerprint(cfg);
    if (store.load(fp)) {
      auto out = incremental_check(*lp.db, cfg, store, tc.jobs);
      store.save();
      print_diags(out.diags, tc.format);
      return out.diags.empty() ? kExitClean : kExitFindings;
    }
    // Cold or mismatched store: fall through to a full check that seeds it.
  }

  DBView view(lp.db.get(), &cfg);
  auto diags = check_program(view, tc.jobs);
  if (!tc.cacheDir.empty()) {
    SummaryStore store(tc.cacheDir);
    store.set_cfg_hash(config_fingerprint(cfg));
    for (const auto& [name, ci] : lp.db->classes)
      if (!ci.isBuiltin()) store.put(build_class_summary(view, ci, diags));
    store.save();
  }
  print_diags(diags, tc.format);
  return diags.empty() ? kExitClean : kExitFindings;
}

nlohmann::json patch_json(const InferResult& res) {
  nlohmann::json j;
  nlohmann::json edits = nlohmann::json::array();
  auto accepted = res.accepted;
  std::sort(accepted.begin(), accepted.end(), [](const AcceptedFix& a, const AcceptedFix& b) {
    if (a.fix.site.file != b.fix.site.file) return a.fix.site.file < b.fix.site.file;
    return a.fix.site.offset > b.fix.site.offset;
  });
  for (const AcceptedFix& af : accepted) {
    const AnnotationSite& s = af.fix.site;
    nlohmann::json e;
    e["file"] = s.file;
    e["line"] = s.line;
    e["col"] = s.col;
    e["offset"] = s.offset;
    e["insert"] = std::string(qualifier_name(af.fix.ann)) + " ";
    nlohmann::json site;
    site["kind"] = site_kind_name(s.kind);
    site["owner"] = s.owner;
    site["member"] = s.member;
    site["index"] = s.index;
    site["localId"] = s.localId;
    site["path"] = s.path;
    e["site"] = site;
    switch (af.fix.origin) {
      case FixOrigin::Direct: e["origin"] = "direct"; break;
      case FixOrigin::Generics: e["origin"] = "generics"; break;
      case FixOrigin::PolyParams: e["origin"] = "polyParams"; break;
      case FixOrigin::PolyFallback: e["origin"] = "polyFallback"; break;
    }
    e["from"] = {{"file", af.fromFile}, {"line", af.fromLine}, {"col", af.fromCol}};
    edits.push_back(e);
  }
  j["edits"] = edits;
  j["report"] = {{"initialErrors", res.report.initialErrors},
                 {"finalErrors", res.report.finalErrors},
                 {"annotations", res.report.annotations},
                 {"checkerRuns", res.report.checkerRuns},
                 {"budgetExceeded", res.report.budgetExceeded}};
  return j;
}

int cmd_infer(const ToolConfig& tc, const std::vector<std::string>& paths) {
  auto lp = load_program(tc, paths);
  if (!lp.db) return kExitError;

  InferResult res = run_inference(*lp.db, tc.check, tc.search, tc.jobs);

  std::error_code ec;
  fs::create_directories(tc.outDir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << tc.outDir << "\n";
    return kExitError;
  }
  if (!write_text(tc.outDir + "/patch.diff", res.unifiedDiff) ||
      !write_text(tc.outDir + "/patch.json", patch_json(res).dump(2) + "\n")) {
    std::cerr << "error: cannot write patch under " << tc.outDir << "\n";
    return kExitError;
  }
  nlohmann::json rep = patch_json(res)["report"];
  if (!write_text(tc.outDir + "/report.json", rep.dump(2) + "\n")) {
    std::cerr << "error: cannot write report under " << tc.outDir << "\n";
    return kExitError;
  }

  if (tc.search.inPlace) {
    for (const auto& [path, text] : res.patchedFiles) {
      const SourceUnit* unit = nullptr;
      for (const auto& u : lp.db->units)
        if (u.path == path) unit = &u;
      bool ok = false;
      std::string disk = read_file(path, ok);
      if (!ok || !unit || content_hash(disk) != content_hash(unit->text)) {
        std::cerr << "error: " << path << " changed since analysis; not rewriting\n";
        return kExitError;
      }
    }
    for (const auto& [path, text] : res.patchedFiles)
      if (!write_text(path, text)) {
        std::cerr << "error: cannot write " << path << "\n";
        return kExitError;
      }
  }

  if (res.report.budgetExceeded)
    std::cerr << "warning: checker-run budget exhausted; result may be partial\n";
  if (tc.format == "json") {
    std::cout << patch_json(res).dump(2) << "\n";
  } else {
    std::cout << "errors: " << res.report.initialErrors << " -> " << res.report.finalErrors
              << ", annotations: " << res.report.annotations
              << ", checker runs: " << res.report.checkerRuns << "\n";
    for (const AcceptedFix& af : res.accepted) {
      const AnnotationSite& s = af.fix.site;
      std::cout << "insert " << qualifier_name(af.fix.ann) << " at " << s.file << ":" << s.line
                << ":" << s.col << "\n";
    }
    for (const Diagnostic& d : res.finalDiags) std::cout << diag_human(d) << "\n";
  }
  return res.report.finalErrors > 0 ? kExitFindings : kExitClean;
}

struct BenchProgram {
  std::string name;
  std::vector<std::string> files;
};

std::vector<BenchProgram> bench_programs(const std::string& root, std::string& err) {
  std::vector<BenchProgram> out;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    err = "bench needs a corpus directory, got " + root;
    return out;
  }
  std::vector<fs::path> entries;
  for (const auto& e : fs::directory_iterator(root, ec)) entries.push_back(e.path());
  std::sort(entries.begin(), entries.end());
  for (const auto& p : entries) {
    if (fs::is_regular_file(p) && p.extension() == ".mj") {
      out.push_back({p.stem().string(), {p.string()}});
    } else if (fs::is_directory(p)) {
      BenchProgram bp;
      bp.name = p.filename().string();
      for (const auto& e : fs::recursive_directory_iterator(p, ec))
        if (e.is_regular_file() && e.path().extension() == ".mj")
          bp.files.push_back(e.path().string());
      std::sort(bp.files.begin(), bp.files.end());
      if (!bp.files.empty()) out.push_back(std::move(bp));
    }
  }
  if (out.empty()) err = "no corpus programs under " + root;
  return out;
}

int cmd_bench(const ToolConfig& tc, const std::string& corpusArg, bool preOnly) {
  std::string root = corpusArg;
  if (root.empty() && tc.srcDirs.size() == 1) root = tc.srcDirs[0];
  if (root.empty()) {
    std::cerr << "error: bench needs a corpus directory\n";
    return kExitError;
  }
  std::string err;
  auto programs = bench_programs(root, err);
  if (!err.empty()) {
    std::cerr << "error: " << err << "\n";
    return kExitError;
  }
  StubSet stubs = load_stub_files(tc.check.stubPaths);

  std::vector<BenchRow> rows;
  for (const BenchProgram& bp : programs) {
    std::vector<SourceUnit> units;
    if (!load_units(bp.files, units)) return kExitError;
    std::vector<Expectation> exps;
    std::vector<ExpectationError> eerrs;
    for (const SourceUnit& u : units) {
      auto es = scan_expectations(u.path, u.text, eerrs);
      exps.insert(exps.end(), es.begin(), es.end());
    }
    if (!eerrs.empty()) {
      for (const auto& e : eerrs)
        std::cerr << e.file << ":" << e.line << ": error: " << e.message << "\n";
      return kExitError;
    }
    auto rr = resolve(std::move(units), stubs);
    if (!rr.ok()) {
      for (const auto& e : rr.errors) std::cerr << e.file << ": error: " << e.message << "\n";
      return kExitError;
    }
    CheckConfig preCfg = tc.check;
    preCfg.emitFixes = true;  // candidate fix sites participate in matching
    DBView view(rr.db.get(), &preCfg);
    auto diags = check_program(view, tc.jobs, &tc.search);
    rows.push_back({bp.name, "pre", score_program(diags, exps, nullptr)});
    if (!preOnly) {
      InferResult res = run_inference(*rr.db, tc.check, tc.search, tc.jobs);
      rows.push_back({bp.name, "post", score_program(res.finalDiags, exps, &res.accepted)});
    }
  }

  std::cout << bench_table(rows);
  std::error_code ec;
  fs::create_directories(tc.outDir, ec);
  if (!write_text(tc.outDir + "/report.json", bench_json(rows) + "\n")) {
    std::cerr << "error: cannot write report under " << tc.outDir << "\n";
    return kExitError;
  }
  return kExitClean;
}

// Named flags override the config file; leftover --key=value arguments reach
// the same switchboard as the file's keys.
int apply_overrides(ToolConfig& tc, const std::vector<std::string>& extras) {
  for (const std::string& raw : extras) {
    std::string s = raw;
    if (s.rfind("--", 0) == 0) s = s.substr(2);
    size_t eq = s.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: unrecognized argument " << raw << " (expected --key=value)\n";
      return kExitError;
    }
    if (auto e = apply_config_kv(s.substr(0, eq), s.substr(eq + 1), tc)) {
      std::cerr << "error: " << e->message << "\n";
      return kExitError;
    }
  }
  return kExitClean;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"taint qualifier checker and annotation inference for MiniJ"};
  app.require_subcommand(1);

  ToolConfig tc;
  std::string configPath;
  std::string format;
  int jobs = -1;
  std::string outDir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", configPath, "config file (key = value lines)");
    sub->add_option("--format", format, "human or json")
        ->check(CLI::IsMember({"human", "json"}));
    sub->add_option("--jobs", jobs, "checker worker threads (0 = hardware)");
    sub->add_option("--out", outDir, "output directory for reports and patches");
    sub->allow_extras();
  };

  auto* check = app.add_subcommand("check", "type-check sources and report taint errors");
  std::vector<std::string> checkPaths;
  std::vector<std::string> changed;
  check->add_option("paths", checkPaths, "source files or directories");
  check->add_option("--changed", changed, "changed files; re-check those plus dependents");
  add_common(check);

  auto* infer = app.add_subcommand("infer", "search for annotations that minimize errors");
  std::vector<std::string> inferPaths;
  bool inPlace = false, noLocalOpt = false, noBatching = false;
  bool noConstructDefaulting = false, noGenericsFix = false, noPolyFix = false;
  int polyDepth = -1, searchDepth = -1, maxAnns = -1, budget = -1;
  infer->add_option("paths", inferPaths, "source files or directories");
  infer->add_flag("--in-place", inPlace, "rewrite the source files with the patch");
  infer->add_flag("--no-local-opt", noLocalOpt, "evaluate local-variable fixes by checker runs");
  infer->add_flag("--no-batching", noBatching, "evaluate every candidate individually");
  infer->add_flag("--no-construct-defaulting", noConstructDefaulting,
                  "treat the known-safe constructs as tainted");
  infer->add_flag("--no-generics-fix", noGenericsFix, "disable type-argument fix generation");
  infer->add_flag("--no-poly-fix", noPolyFix, "disable polymorphic fix generation");
  infer->add_option("--poly-depth", polyDepth, "polymorphic derivation depth");
  infer->add_option("--search-depth", searchDepth, "cascade exploration depth");
  infer->add_option("--max-anns-per-warning", maxAnns, "drop larger candidates (0 = unlimited)");
  infer->add_option("--budget", budget, "checker runs allowed per inference");
  add_common(infer);

  auto* bench = app.add_subcommand("bench", "score the checker against labeled programs");
  std::string corpusArg;
  bool preOnly = false;
  bench->add_option("corpus", corpusArg, "corpus directory");
  bench->add_flag("--pre-only", preOnly, "skip the post-inference phase");
  add_common(bench);

  CLI11_PARSE(app, argc, argv);

  if (!configPath.empty()) {
    if (auto e = load_config_file(configPath, tc)) {
      std::cerr << "error: " << e->message << "\n";
      return kExitError;
    }
    anchor_config_paths(tc);
  }

  CLI::App* sub = app.get_subcommands().front();
  if (int rc = apply_overrides(tc, sub->remaining()); rc != kExitClean) return rc;

  if (!format.empty()) tc.format = format;
  if (jobs >= 0) tc.jobs = jobs;
  if (!outDir.empty()) tc.outDir = outDir;
  if (sub == infer) {
    if (inPlace) tc.search.inPlace = true;
    if (noLocalOpt) tc.search.localOpt = false;
    if (noBatching) tc.search.batching = false;
    if (noConstructDefaulting) tc.check.constructDefaulting = false;
    if (noGenericsFix) tc.search.genericsFix = false;
    if (noPolyFix) tc.search.polyFix = false;
    if (polyDepth >= 1) tc.search.polyDepth = polyDepth;
    if (searchDepth >= 1) tc.search.searchDepth = searchDepth;
    if (maxAnns >= 0) tc.search.maxAnnsPerWarning = maxAnns;
    if (budget >= 1) tc.search.budget = budget;
  }

  if (sub == check) return cmd_check(tc, checkPaths, changed);
  if (sub == infer) return cmd_infer(tc, inferPaths);
  return cmd_bench(tc, corpusArg, preOnly);
}
