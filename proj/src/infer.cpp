#include "minij/infer.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "minij/typing.hpp"

namespace minij {

namespace {

std::string diag_key(const Diagnostic& d) {
  std::ostringstream os;
  os << d.file << ';' << d.line << ';' << d.col << ';' << diag_kind_name(d.kind) << ';'
     << render_type(d.lhs) << ';' << render_type(d.rhs);
  return os.str();
}

std::set<std::string> diag_keys(const std::vector<Diagnostic>& ds) {
  std::set<std::string> out;
  for (const auto& d : ds) out.insert(diag_key(d));
  return out;
}

AnnotationOverlay overlay_with(const AnnotationOverlay& base, const FixSet& fs) {
  AnnotationOverlay ov = base;
  for (const Fix& f : fs.fixes()) ov.set(f.site, f.ann);
  return ov;
}

FixSet resolve_local_rec(FixCtx& ctx, const Fix& fix, std::set<std::string>& guard);

// Non-local fixes pass through; local fixes are replaced by the fixes
// retyping their assignments. Any failure keeps the raw set so the checker
// run evaluates it as-is.
FixSet expand_locals(FixCtx& ctx, const FixSet& fs) {
  FixSet out;
  std::set<std::string> guard;
  for (const Fix& f : fs.fixes()) {
    if (f.site.kind == AnnotationSite::Kind::LocalType) {
      FixSet sub = resolve_local_rec(ctx, f, guard);
      if (sub.isBottom())
        out.add(f);
      else
        out = out.combine(sub);
    } else {
      out.add(f);
    }
    if (out.isBottom()) return fs;
  }
  return out;
}

FixSet resolve_local_rec(FixCtx& ctx, const Fix& fix, std::set<std::string>& guard) {
  std::string gk = fix.site.key();
  gk += '#';
  gk += qualifier_name(fix.ann);
  if (!guard.insert(gk).second) return FixSet::bottom();
  const ClassInfo* cls = ctx.view->db().find_class(fix.site.owner);
  if (!cls) return FixSet::bottom();
  const MethodInfo* m = cls->method(fix.site.member);
  if (!m || !m->decl) return FixSet::bottom();
  const TypedMethod& typed = typed_body(ctx, *cls, *m);
  MethodRef in{cls, m, &typed};
  FixSet out;
  for (const PseudoAssign& pa : typed.assigns) {
    if (pa.flavor != AssignFlavor::LocalAssign || pa.localId != fix.site.localId) continue;
    if (!pa.rhsExpr) return FixSet::bottom();
    // The pinned declaration would require every assigned value to carry the
    // annotation; retyping each right-hand side reproduces that exactly.
    auto want = set_qual_at_path(pa.actual, fix.site.path, fix.ann);
    if (!want) return FixSet::bottom();
    FixSet sub = find_annots(ctx, in, pa.rhsExpr, *want, 0, fix.origin);
    if (sub.isBottom()) return FixSet::bottom();
    out = out.combine(sub);
    if (out.isBottom()) return FixSet::bottom();
  }
  // Chase locals the expansion itself produced; an unexpandable one stays.
  FixSet flat;
  for (const Fix& f2 : out.fixes()) {
    if (f2.site.kind == AnnotationSite::Kind::LocalType) {
      FixSet sub = resolve_local_rec(ctx, f2, guard);
      if (sub.isBottom())
        flat.add(f2);
      else
        flat = flat.combine(sub);
    } else {
      flat.add(f2);
    }
    if (flat.isBottom()) return FixSet::bottom();
  }
  return flat;
}

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const auto& x : a)
    if (b.count(x)) return false;
  return true;
}

struct Root {
  FixSet fs;                      // expanded candidate
  bool polyFallback = false;      // origin of the raw candidate
  std::string fromFile;
  int fromLine = 0;
  int fromCol = 0;
  std::set<std::string> foot;     // union of fix owners' dependency closures
  bool evaluated = false;
  int count = 0;
  std::vector<Diagnostic> diags;
};

struct SearchNode {
  FixSet applied;
  std::vector<Diagnostic> diags;
  std::vector<FixSet> frontier;  // raw candidates from diags new vs the parent
  int count = 0;
  int depth = 1;
};

std::vector<FixSet> make_frontier(const std::set<std::string>& parentKeys,
                                  const std::vector<Diagnostic>& diags, int maxAnns) {
  std::vector<FixSet> out;
  for (const Diagnostic& d : diags) {
    if (parentKeys.count(diag_key(d))) continue;
    for (const FixSet& fs : d.fixes) {
      if (fs.isBottom() || fs.empty()) continue;
      if (maxAnns > 0 && (int)fs.fixes().size() > maxAnns) continue;
      out.push_back(fs);
    }
  }
  return out;
}

// Ordering among equally-sized chains: lexicographic over the insertion
// points, then the full structural key.
std::string chain_lex(const FixSet& fs) {
  std::vector<std::string> parts;
  for (const Fix& f : fs.fixes()) {
    std::ostringstream os;
    os << f.site.file << ':' << f.site.line << ':' << f.site.col;
    parts.push_back(os.str());
  }
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) {
    out += p;
    out += ';';
  }
  return out + '|' + fs.key();
}

struct BestChain {
  bool valid = false;
  int count = 0;
  size_t anns = 0;
  std::string lex;
  FixSet applied;
  std::vector<Diagnostic> diags;
  const Root* root = nullptr;
};

void consider(BestChain& best, const SearchNode& node, const Root& root) {
  size_t anns = node.applied.fixes().size();
  std::string lex = chain_lex(node.applied);
  bool better = !best.valid || node.count < best.count ||
                (node.count == best.count &&
                 (anns < best.anns || (anns == best.anns && lex < best.lex)));
  if (!better) return;
  best.valid = true;
  best.count = node.count;
  best.anns = anns;
  best.lex = lex;
  best.applied = node.applied;
  best.diags = node.diags;
  best.root = &root;
}

void build_patch(const ProgramDB& db, InferResult& res) {
  std::map<std::string, std::vector<PatchEdit>> byFile;
  for (const AcceptedFix& af : res.accepted) {
    const AnnotationSite& s = af.fix.site;
    std::string text = std::string(qualifier_name(af.fix.ann)) + " ";
    byFile[s.file].push_back(PatchEdit{s.file, s.offset, s.line, s.col, text});
  }
  for (auto& [file, edits] : byFile) {
    std::sort(edits.begin(), edits.end(), [](const PatchEdit& a, const PatchEdit& b) {
      if (a.offset != b.offset) return a.offset > b.offset;
      return a.text < b.text;
    });
    const SourceUnit* unit = nullptr;
    for (const auto& u : db.units)
      if (u.path == file) {
        unit = &u;
        break;
      }
    if (!unit) continue;
    std::string text = unit->text;
    for (const PatchEdit& e : edits) {
      if (e.offset < 0 || e.offset > (int)text.size()) continue;
      text.insert((size_t)e.offset, e.text);
    }
    res.patchedFiles[file] = text;
    for (const PatchEdit& e : edits) res.edits.push_back(e);
    res.unifiedDiff += render_unified_diff(file, unit->text, text);
  }
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t nl = s.find('\n', pos);
    if (nl == std::string::npos) {
      if (pos < s.size()) out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

std::string render_unified_diff(const std::string& path, const std::string& before,
                                const std::string& after) {
  if (before == after) return "";
  std::vector<std::string> a = split_lines(before);
  std::vector<std::string> b = split_lines(after);
  std::ostringstream os;
  os << "--- a/" << path << "\n+++ b/" << path << "\n";
  if (a.size() != b.size()) {
    // Annotation insertion never changes line structure; anything else is
    // rendered as a whole-file replacement.
    os << "@@ -1," << a.size() << " +1," << b.size() << " @@\n";
    for (const auto& l : a) os << '-' << l << '\n';
    for (const auto& l : b) os << '+' << l << '\n';
    return os.str();
  }
  std::vector<size_t> changed;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) changed.push_back(i);
  if (changed.empty()) return "";
  const size_t ctx = 3;
  size_t gi = 0;
  while (gi < changed.size()) {
    size_t gj = gi;
    while (gj + 1 < changed.size() && changed[gj + 1] - changed[gj] <= 2 * ctx) ++gj;
    size_t lo = changed[gi] >= ctx ? changed[gi] - ctx : 0;
    size_t hi = std::min(changed[gj] + ctx, a.size() - 1);
    os << "@@ -" << (lo + 1) << ',' << (hi - lo + 1) << " +" << (lo + 1) << ',' << (hi - lo + 1)
       << " @@\n";
    size_t i = lo;
    while (i <= hi) {
      if (a[i] == b[i]) {
        os << ' ' << a[i] << '\n';
        ++i;
        continue;
      }
      size_t k = i;
      while (k <= hi && a[k] != b[k]) ++k;
      for (size_t j = i; j < k; ++j) os << '-' << a[j] << '\n';
      for (size_t j = i; j < k; ++j) os << '+' << b[j] << '\n';
      i = k;
    }
    gi = gj + 1;
  }
  return os.str();
}

FixSet resolve_local_fix(FixCtx& ctx, const Fix& fix) {
  std::set<std::string> guard;
  return resolve_local_rec(ctx, fix, guard);
}

std::pair<int, std::vector<Diagnostic>> evaluate_fix(const ProgramDB& db,
                                                     const CheckConfig& checkCfg,
                                                     const SearchConfig& searchCfg,
                                                     const AnnotationOverlay& accepted,
                                                     const FixSet& applied, int jobs) {
  CheckConfig cfg = checkCfg;
  cfg.emitFixes = true;
  AnnotationOverlay ov = overlay_with(accepted, applied);
  DBView view(&db, &cfg, &ov);
  auto diags = check_program(view, jobs, &searchCfg);
  return {(int)diags.size(), std::move(diags)};
}

InferResult run_inference(const ProgramDB& db, const CheckConfig& checkCfg,
                          const SearchConfig& searchCfg, int jobs) {
  CheckConfig cfg = checkCfg;
  cfg.emitFixes = true;

  InferResult res;
  AnnotationOverlay accepted;
  int runs = 0;
  bool budgetHit = false;

  auto run_check = [&](const AnnotationOverlay& ov) {
    DBView view(&db, &cfg, &ov);
    ++runs;
    return check_program(view, jobs, &searchCfg);
  };
  auto budget_left = [&]() { return runs < searchCfg.budget; };

  std::vector<Diagnostic> diags = run_check(accepted);
  int current = (int)diags.size();
  res.report.initialErrors = current;

  std::vector<AcceptedFix> acceptedFixes;
  auto revDeps = reverse_dependencies(db);

  while (current > 0) {
    if (!budget_left()) {
      budgetHit = true;
      break;
    }
    std::set<std::string> baselineKeys = diag_keys(diags);

    // Candidate roots: every distinct fix set attached to a current
    // diagnostic, with local fixes expanded to the sites they stand for.
    std::vector<Root> roots;
    std::map<std::string, size_t> seen;
    std::map<std::string, TypedMethod> rootCache;
    DBView acceptedView(&db, &cfg, &accepted);
    FixCtx rootCtx{&acceptedView, &searchCfg, &rootCache};
    for (const Diagnostic& d : diags) {
      for (const FixSet& fs : d.fixes) {
        if (fs.isBottom() || fs.empty()) continue;
        if (searchCfg.maxAnnsPerWarning > 0 &&
            (int)fs.fixes().size() > searchCfg.maxAnnsPerWarning)
          continue;
        FixSet efs = searchCfg.localOpt ? expand_locals(rootCtx, fs) : fs;
        if (efs.isBottom() || efs.empty()) continue;
        auto [it, fresh] = seen.emplace(efs.key(), roots.size());
        if (!fresh) {
          // Two diagnostics proposing the same sites collapse to one root;
          // the fallback flag survives if either proposal carries it.
          roots[it->second].polyFallback |= fs.hasOrigin(FixOrigin::PolyFallback);
          continue;
        }
        Root r;
        r.fs = efs;
        r.polyFallback = fs.hasOrigin(FixOrigin::PolyFallback);
        r.fromFile = d.file;
        r.fromLine = d.line;
        r.fromCol = d.col;
        roots.push_back(std::move(r));
      }
    }
    if (roots.empty()) break;

    // Level 0: evaluate each root once. Batching folds roots whose
    // dependency closures are disjoint into one checker run; the per-root
    // view is reassembled from the group run plus the untouched baseline.
    for (Root& r : roots) {
      r.foot.clear();
      for (const Fix& f : r.fs.fixes()) {
        auto clo = dependency_closure(f.site.owner, revDeps);
        r.foot.insert(clo.begin(), clo.end());
      }
    }
    auto eval_root = [&](Root& r) {
      if (!budget_left()) {
        budgetHit = true;
        return;
      }
      auto ds = run_check(overlay_with(accepted, r.fs));
      r.count = (int)ds.size();
      r.diags = std::move(ds);
      r.evaluated = true;
    };
    if (searchCfg.batching && roots.size() > 1) {
      std::vector<std::vector<int>> groups;
      for (int i = 0; i < (int)roots.size(); ++i) {
        bool placed = false;
        for (auto& g : groups) {
          bool ok = true;
          for (int j : g)
            if (!disjoint(roots[i].foot, roots[j].foot)) {
              ok = false;
              break;
            }
          if (ok) {
            g.push_back(i);
            placed = true;
            break;
          }
        }
        if (!placed) groups.push_back({i});
      }
      for (auto& g : groups) {
        if (budgetHit) break;
        if (g.size() == 1) {
          eval_root(roots[g[0]]);
          continue;
        }
        FixSet unionFs;
        for (int i : g) unionFs = unionFs.combine(roots[i].fs);
        if (unionFs.isBottom()) {
          for (int i : g) eval_root(roots[i]);
          continue;
        }
        if (!budget_left()) {
          budgetHit = true;
          break;
        }
        auto gdiags = run_check(overlay_with(accepted, unionFs));
        std::set<std::string> unionFoot;
        for (int i : g) unionFoot.insert(roots[i].foot.begin(), roots[i].foot.end());
        auto outside_keys = [&](const std::vector<Diagnostic>& ds) {
          std::set<std::string> out;
          for (const auto& d : ds)
            if (!unionFoot.count(d.ownerClass)) out.insert(diag_key(d));
          return out;
        };
        if (outside_keys(gdiags) != outside_keys(diags)) {
          // Interference outside every member's footprint: attribution is
          // ambiguous, so the group is re-evaluated one by one.
          for (int i : g) eval_root(roots[i]);
          continue;
        }
        for (int i : g) {
          Root& r = roots[i];
          std::vector<Diagnostic> iso;
          for (const auto& d : gdiags)
            if (r.foot.count(d.ownerClass)) iso.push_back(d);
          for (const auto& d : diags)
            if (!r.foot.count(d.ownerClass)) iso.push_back(d);
          std::stable_sort(iso.begin(), iso.end(), diag_less);
          r.count = (int)iso.size();
          r.diags = std::move(iso);
          r.evaluated = true;
        }
      }
    } else {
      for (Root& r : roots) {
        if (budgetHit) break;
        eval_root(r);
      }
    }

    // Cascade: breadth-first over the errors each chain newly causes.
    BestChain best;
    for (Root& root : roots) {
      if (!root.evaluated) continue;
      std::set<std::string> visited{root.fs.key()};
      SearchNode first;
      first.applied = root.fs;
      first.count = root.count;
      first.frontier = make_frontier(baselineKeys, root.diags, searchCfg.maxAnnsPerWarning);
      first.diags = std::move(root.diags);
      consider(best, first, root);
      std::deque<SearchNode> queue;
      queue.push_back(std::move(first));
      while (!queue.empty() && !budgetHit) {
        SearchNode cur = std::move(queue.front());
        queue.pop_front();
        if (cur.depth >= searchCfg.searchDepth || cur.frontier.empty()) continue;
        AnnotationOverlay curOv = overlay_with(accepted, cur.applied);
        DBView curView(&db, &cfg, &curOv);
        std::map<std::string, TypedMethod> curCache;
        FixCtx curCtx{&curView, &searchCfg, &curCache};
        std::set<std::string> curKeys = diag_keys(cur.diags);
        for (const FixSet& raw : cur.frontier) {
          FixSet efs = searchCfg.localOpt ? expand_locals(curCtx, raw) : raw;
          if (efs.isBottom() || efs.empty()) continue;
          FixSet next = cur.applied.combine(efs);
          if (next.isBottom() || next.key() == cur.applied.key()) continue;
          if (!visited.insert(next.key()).second) continue;
          if (!budget_left()) {
            budgetHit = true;
            break;
          }
          SearchNode child;
          child.applied = std::move(next);
          child.diags = run_check(overlay_with(accepted, child.applied));
          child.count = (int)child.diags.size();
          child.depth = cur.depth + 1;
          child.frontier = make_frontier(curKeys, child.diags, searchCfg.maxAnnsPerWarning);
          consider(best, child, root);
          queue.push_back(std::move(child));
        }
      }
    }

    if (!best.valid) break;
    bool improves = best.count < current;
    // An equal count is still progress when the root merely forced a return
    // Untainted as a stand-in for the real dependency: the error moves into
    // the callee where later iterations can address it.
    bool equalOk = best.count == current && best.root->polyFallback;
    if (!improves && !equalOk) break;
    bool changed = false;
    for (const Fix& f : best.applied.fixes()) {
      auto existing = accepted.get(f.site);
      if (existing && *existing == f.ann) continue;
      accepted.set(f.site, f.ann);
      acceptedFixes.push_back(AcceptedFix{f, best.root->fromFile, best.root->fromLine,
                                          best.root->fromCol});
      changed = true;
    }
    if (!changed) break;
    diags = std::move(best.diags);
    current = best.count;
  }

  // Local annotations that other accepted fixes made redundant are dropped;
  // this is what keeps the patch independent of the local-expansion flag.
  std::vector<AcceptedFix> localFixes;
  for (const AcceptedFix& af : acceptedFixes)
    if (af.fix.site.kind == AnnotationSite::Kind::LocalType) localFixes.push_back(af);
  std::sort(localFixes.begin(), localFixes.end(), [](const AcceptedFix& a, const AcceptedFix& b) {
    return a.fix.site.key() < b.fix.site.key();
  });
  for (const AcceptedFix& af : localFixes) {
    if (!budget_left()) {
      budgetHit = true;
      break;
    }
    AnnotationOverlay trial = accepted;
    trial.remove(af.fix.site);
    auto tdiags = run_check(trial);
    if ((int)tdiags.size() == current) {
      accepted = std::move(trial);
      diags = std::move(tdiags);
      std::string key = af.fix.site.key();
      acceptedFixes.erase(std::remove_if(acceptedFixes.begin(), acceptedFixes.end(),
                                         [&](const AcceptedFix& x) {
                                           return x.fix.site.key() == key;
                                         }),
                          acceptedFixes.end());
    }
  }

  res.report.finalErrors = current;
  res.report.annotations = (int)acceptedFixes.size();
  res.report.checkerRuns = runs;
  res.report.budgetExceeded = budgetHit;
  res.accepted = std::move(acceptedFixes);
  res.finalDiags = std::move(diags);
  build_patch(db, res);
  return res;
}

}  // namespace minij
