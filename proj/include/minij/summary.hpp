#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minij/checker.hpp"

namespace minij {

// Per-class signature surface plus the class's last diagnostics, enough to
// re-check one unit without re-typing the rest of the program. Types are the
// declared source spellings (unparsed), so re-parsing them reproduces the
// original qualification exactly.
struct FieldSummary {
  std::string name;
  bool isStatic = false;
  bool isFinal = false;
  std::string type;
};

struct MethodSummary {
  std::string name;
  bool isStatic = false;
  std::vector<std::string> typeParams;
  std::string ret;
  std::vector<std::string> paramTypes;
  std::vector<std::string> paramNames;
};

struct DiagSummary {
  std::string file;
  int line = 0;
  int col = 0;
  int kind = 0;
  int flavor = 0;
  std::string lhs;  // render_type output
  std::string rhs;
  std::string owner;
};

struct ClassSummary {
  std::string name;
  std::string pkg;
  std::string unitPath;
  std::string unitHash;
  bool isEnum = false;
  std::vector<std::string> typeParams;
  std::string extendsType;  // empty: none
  std::vector<std::string> enumConsts;
  std::vector<FieldSummary> fields;
  std::vector<MethodSummary> methods;
  // Resolved read qualifiers of static finals: initializer results are part
  // of the externally visible surface.
  std::map<std::string, std::string> staticFinalQuals;
  std::vector<DiagSummary> diags;
  std::string sigHash;
};

struct StaleStore {
  std::string message;
};

class SummaryStore {
 public:
  SummaryStore() = default;
  explicit SummaryStore(std::string dir) : dir_(std::move(dir)) {}

  // Reads every class file; false when the directory is absent, empty, or
  // was written under a different configuration (callers fall back to a
  // full check).
  bool load(const std::string& cfgHash);
  void save() const;

  const ClassSummary* find(const std::string& cls) const;
  void put(ClassSummary s);
  void remove_class(const std::string& cls);
  void remove_unit(const std::string& unitPath, const std::vector<std::string>& keep);
  const std::map<std::string, ClassSummary>& classes() const { return classes_; }
  void set_cfg_hash(const std::string& h) { cfgHash_ = h; }
  bool empty() const { return classes_.empty(); }

  // Source text for every stored class outside excludePath, grouped back
  // into units: signatures verbatim, bodies empty, static finals pinned to
  // their resolved qualifiers.
  std::vector<std::pair<std::string, std::string>> synthesize_units(
      const std::string& excludePath, bool pinStaticFinals) const;

 private:
  std::string dir_;
  std::string cfgHash_;
  std::map<std::string, ClassSummary> classes_;
};

// Fingerprint of everything summaries depend on besides the sources.
std::string config_fingerprint(const CheckConfig& cfg);

ClassSummary build_class_summary(const DBView& view, const ClassInfo& cls,
                                 const std::vector<Diagnostic>& classDiags);

Diagnostic diag_from_summary(const DiagSummary& s);

// Parses render_type output back into a type (for replayed diagnostics).
QualifiedType parse_rendered_type(const std::string& s);

// Checks one unit's classes against the store: other classes come from
// synthesized signature-only units. On success the store entries for this
// unit are replaced and classes whose surface changed are reported.
struct UnitCheckResult {
  std::vector<Diagnostic> diags;
  std::vector<std::string> changedSignatures;
  std::optional<StaleStore> stale;
};

UnitCheckResult check_unit_incremental(const std::string& path, const std::string& text,
                                       SummaryStore& store, const CheckConfig& cfg,
                                       const StubSet& stubs);

// Whole-program incremental driver: classes whose unit is byte-identical to
// the stored state replay their stored diagnostics; everything else (and the
// dependents of signature changes) is re-checked. The store is refreshed.
struct IncrementalOutcome {
  std::vector<Diagnostic> diags;
  int recheckedClasses = 0;
  int replayedClasses = 0;
  std::optional<StaleStore> stale;
};

IncrementalOutcome incremental_check(const ProgramDB& db, const CheckConfig& cfg,
                                     SummaryStore& store, int jobs = 0);

}  // namespace minij
