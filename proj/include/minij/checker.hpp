#pragma once

#include <map>
#include <string>
#include <vector>

#include "minij/fixgen.hpp"
#include "minij/typing.hpp"

namespace minij {

struct Diagnostic {
  enum class Kind { AssignmentIncompat, OverrideIncompat };

  Kind kind = Kind::AssignmentIncompat;
  AssignFlavor flavor = AssignFlavor::LocalAssign;
  std::string file;
  int line = 0;
  int col = 0;
  Span span;
  QualifiedType lhs;  // required
  QualifiedType rhs;  // actual
  std::vector<FixSet> fixes;
  std::string ownerClass;
};

std::string diag_kind_name(Diagnostic::Kind k);
bool diag_less(const Diagnostic& a, const Diagnostic& b);

// Sorts and deduplicates a merged diagnostic list in place.
void finalize_diagnostics(std::vector<Diagnostic>& diags);

// Diagnostics for one class body (assignments, field initializers, overrides).
// typedCache, when given, collects method typings for reuse by fix generation.
std::vector<Diagnostic> check_class(const DBView& view, const ClassInfo& cls,
                                    const SearchConfig* searchCfg,
                                    std::map<std::string, TypedMethod>* typedCache);

// Whole-program check over every annotated source class; deterministic order.
std::vector<Diagnostic> check_program(const DBView& view, int jobs = 0,
                                      const SearchConfig* searchCfg = nullptr);

std::string diag_json(const Diagnostic& d);
std::string diag_human(const Diagnostic& d);

}  // namespace minij
