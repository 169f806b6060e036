#pragma once

// Qualification of declared types and flow-sensitive typing of method bodies.
// Both the checker and the fix generator work through a DBView so that
// overlay annotations (the inference search's candidates) behave exactly like
// annotations written in source.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "minij/config.hpp"
#include "minij/resolve.hpp"
#include "minij/sites.hpp"
#include "minij/types.hpp"

namespace minij {

// Structural sites for the four declaration kinds. file/line/col/offset are
// filled in from the declared type's annotation anchor.
AnnotationSite field_site(const ClassInfo& cls, const FieldInfo& f);
AnnotationSite param_site(const ClassInfo& cls, const MethodInfo& m, int index);
AnnotationSite return_site(const ClassInfo& cls, const MethodInfo& m);
AnnotationSite local_site(const ClassInfo& cls, const MethodInfo& m, int localId);

// Navigates a parsed type along a site path (type-argument index; array
// element = 0). Null when the path leaves the declared structure.
const ParsedType* parsed_at_path(const ParsedType& t, const std::vector<int>& path);
bool has_explicit_ann(const ParsedType& t);  // at any level

class DBView {
 public:
  DBView(const ProgramDB* db, const CheckConfig* cfg, const AnnotationOverlay* overlay = nullptr);

  const ProgramDB& db() const { return *db_; }
  const CheckConfig& cfg() const { return *cfg_; }
  const AnnotationOverlay* overlay() const { return overlay_; }

  // A class is annotated code when it comes from source and its package
  // matches annotatedPackages (empty pattern: all source packages).
  bool class_annotated(const ClassInfo& ci) const;

  const SourceUnit* unit_of(const ClassInfo& cls) const;
  std::string file_of(const ClassInfo& cls) const;

  // Declared-position qualification: explicit annotation, else overlay entry
  // at the same site, else the context default (Tainted except for the
  // known-safe constructs). `base` carries the site identity for overlay
  // lookup; positions extend base.path. tvars are in-scope type variables.
  QualifiedType qualify(const ParsedType& t, TypeContext topCtx, const AnnotationSite& base,
                        const std::vector<std::string>& tvars) const;

  QualifiedType field_declared(const ClassInfo& cls, const FieldInfo& f) const;
  // Read type of a field: static finals take the initializer's qualifier.
  QualifiedType field_read_type(const ClassInfo& cls, const FieldInfo& f) const;
  QualifiedType param_type(const ClassInfo& cls, const MethodInfo& m, int index) const;
  QualifiedType return_type(const ClassInfo& cls, const MethodInfo& m) const;
  // Declared local type with annotated (or overlaid) positions kept and all
  // others Tainted; the flow analysis refines from here.
  QualifiedType local_conservative(const ClassInfo& cls, const MethodInfo& m,
                                   const LocalDeclStmt& d) const;

  // Effective signature: receiver with the class's own variables, params and
  // return qualified (overlay applied), ptParams from @PolyTaint positions.
  // Stub signatures shadow builtin and source declarations.
  MethodSig method_sig(const ClassInfo& owner, const MethodInfo& m) const;

  QualifiedType this_type(const ClassInfo& cls) const;

  // Static finals resolve their qualifier from the initializer (explicit
  // annotation wins; missing initializer or a cycle is Tainted). Memoized;
  // call precompute_static_finals before checking classes concurrently.
  Qualifier static_final_qual(const ClassInfo& cls, const FieldInfo& f) const;
  void precompute_static_finals() const;

 private:
  const ProgramDB* db_;
  const CheckConfig* cfg_;
  const AnnotationOverlay* overlay_;
  mutable std::map<std::string, Qualifier> sfMemo_;
  mutable std::set<std::string> sfInFlight_;
};

// One required-subtype check discovered while typing a body.
enum class AssignFlavor { CallArg, LocalAssign, FieldAssign, Return, ArrayElem, CtorArg, Override };

struct PseudoAssign {
  AssignFlavor flavor = AssignFlavor::CallArg;
  Span span;
  QualifiedType required;  // lhs
  QualifiedType actual;    // rhs, upcast to the lhs class
  const Expr* rhsExpr = nullptr;
  int localId = -1;  // LocalAssign: which local, for assignment chasing
  bool ok = true;
};

struct TypedMethod {
  std::map<const Expr*, QualifiedType> exprTypes;
  std::vector<PseudoAssign> assigns;
};

// Call-site analysis: which typing rule applies, the effective signature, the
// computed result type, and which arguments require checks. Shared between
// the checker and the fix generator so both see identical call semantics.
struct CallInfo {
  enum class Branch { Source, Sanitizer, Generics, Stub, Annotated, PolyDefault };

  const ClassInfo* owner = nullptr;
  const MethodInfo* method = nullptr;
  MethodSig sig;  // effective declared signature (not substituted)
  Branch branch = Branch::PolyDefault;
  Substitution subst;  // class type parameters -> call-site bindings
  std::vector<std::optional<QualifiedType>> argRequired;  // check targets; nullopt = unchecked
  std::vector<QualifiedType> argDeclared;                 // substituted declared params
  bool treatAsPoly = false;   // declared @PolyTaint or unannotated poly-by-default
  bool receiverInPolySet = false;
  std::vector<int> ptArgs;    // argument indices in the poly set
};

// Everything about a call that does not depend on argument types; argument
// types only feed the result joins, computed separately by call_result.
CallInfo analyze_call(const DBView& v, const ClassInfo& ctxClass, const CallExpr& call,
                      const QualifiedType* recvType);

QualifiedType call_result(const DBView& v, const CallInfo& info, const QualifiedType* recvType,
                          const std::vector<QualifiedType>& argTypes);

TypedMethod type_method(const DBView& v, const ClassInfo& cls, const MethodInfo& m);
TypedMethod type_field_init(const DBView& v, const ClassInfo& cls, const FieldInfo& f);

// Upcasts a Named type to the given superclass, mapping type arguments
// through the extends chain. nullopt when target is not reachable.
std::optional<QualifiedType> upcast_type(const DBView& v, const QualifiedType& t,
                                         const std::string& target);

// Restates `required` (given in the lhs's class) in the shape of the rhs's
// own type so fixes aim at the expression's declaration. nullopt when the
// classes don't align positionally.
std::optional<QualifiedType> fix_target(const DBView& v, const QualifiedType& rhsType,
                                        const QualifiedType& required);

// Variables that survive substitution erase to Tainted Object.
QualifiedType erase_typevars(const QualifiedType& t);

// Subtype check that treats shape disagreement (raw types, unrelated classes)
// as vacuously satisfied; qualifier errors only.
bool subtype_ok(const QualifiedType& actual, const QualifiedType& required);

}  // namespace minij
