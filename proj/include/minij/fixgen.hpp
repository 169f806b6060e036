#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "minij/typing.hpp"

namespace minij {

// Shared state for one fix-generation pass over a fixed overlay snapshot.
struct FixCtx {
  const DBView* view = nullptr;
  const SearchConfig* search = nullptr;
  std::map<std::string, TypedMethod>* typedCache = nullptr;  // "Owner#method"
};

// The code context an expression was typed in; method is null inside a field
// initializer.
struct MethodRef {
  const ClassInfo* cls = nullptr;
  const MethodInfo* method = nullptr;
  const TypedMethod* typed = nullptr;
};

const TypedMethod& typed_body(FixCtx& ctx, const ClassInfo& cls, const MethodInfo& m);

// Annotation set that retypes e to target, or bottom when impossible.
FixSet find_annots(FixCtx& ctx, const MethodRef& in, const Expr* e, const QualifiedType& target,
                   int depth, FixOrigin origin = FixOrigin::Direct);

// find_annots toward Untainted at the top level of e's current type.
FixSet make_untainted(FixCtx& ctx, const MethodRef& in, const Expr* e, int depth,
                      FixOrigin origin = FixOrigin::Direct);

// Retype a generic call's result by re-instantiating the receiver's type
// arguments and recursing on the receiver expression.
FixSet generics_annots(FixCtx& ctx, const MethodRef& in, const CallExpr* call,
                       const CallInfo& info, const QualifiedType& target, int depth);

// Make the callee polymorphic: scan its returns, chase locals through their
// assignments, then either poly-annotate return+parameters (fixing call-site
// actuals) or fall back to an Untainted return.
FixSet polytaint_annots(FixCtx& ctx, const MethodRef& in, const CallExpr* call,
                        const CallInfo& info, const QualifiedType& target, int depth);

// Per-position diff of target against the declaration's current type; all or
// nothing: any pinned, raw, array-reference or type-variable position that
// must change fails the whole set.
FixSet update_type(FixCtx& ctx, const ClassInfo& ownerCls, const AnnotationSite& base,
                   const ParsedType& parsed, const QualifiedType& current,
                   const QualifiedType& target, FixOrigin origin,
                   const std::vector<std::string>& tvars);

// Candidate fix sets for one failed pseudo-assignment: zero or one entries.
std::vector<FixSet> candidate_fixes(FixCtx& ctx, const MethodRef& in, const PseudoAssign& pa);

// t with the qualifier at path replaced; nullopt when the path is invalid.
std::optional<QualifiedType> set_qual_at_path(const QualifiedType& t, const std::vector<int>& path,
                                              Qualifier q);

}  // namespace minij
