#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "minij/checker.hpp"

namespace minij {

struct PatchEdit {
  std::string file;
  int offset = 0;
  int line = 0;
  int col = 0;
  std::string text;  // inserted annotation plus a trailing space
};

// An accepted annotation together with the diagnostic whose candidate chain
// produced it.
struct AcceptedFix {
  Fix fix;
  std::string fromFile;
  int fromLine = 0;
  int fromCol = 0;
};

struct InferReport {
  int initialErrors = 0;
  int finalErrors = 0;
  int annotations = 0;
  int checkerRuns = 0;
  bool budgetExceeded = false;
};

struct InferResult {
  std::vector<AcceptedFix> accepted;
  std::vector<PatchEdit> edits;                     // per file, offsets descending
  std::map<std::string, std::string> patchedFiles;  // path -> rewritten content
  std::string unifiedDiff;
  std::vector<Diagnostic> finalDiags;
  InferReport report;
};

// The search loop: evaluates candidate fix sets by re-running the checker,
// cascades the errors a candidate induces, keeps the best improving chain,
// and repeats until nothing improves or the run budget is spent. The
// accepted annotations are rendered as insertion-only source edits.
InferResult run_inference(const ProgramDB& db, const CheckConfig& checkCfg,
                          const SearchConfig& searchCfg, int jobs = 0);

// One candidate applied on top of an already-accepted overlay; returns the
// checker's full error count and diagnostics on that snapshot.
std::pair<int, std::vector<Diagnostic>> evaluate_fix(const ProgramDB& db,
                                                     const CheckConfig& checkCfg,
                                                     const SearchConfig& searchCfg,
                                                     const AnnotationOverlay& accepted,
                                                     const FixSet& applied, int jobs = 0);

// Expands a local-variable fix into fixes retyping every right-hand side
// assigned to that local. Bottom means the expansion failed and the local
// fix itself must be evaluated by a checker run.
FixSet resolve_local_fix(FixCtx& ctx, const Fix& fix);

std::string render_unified_diff(const std::string& path, const std::string& before,
                                const std::string& after);

}  // namespace minij
