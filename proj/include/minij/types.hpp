#pragma once

// Qualified types: a taint qualifier at every level of a type, plus the
// operations the checker and inferencer need (subtyping, joins, defaulting,
// type-variable substitution).

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace minij {

enum class Qualifier { Untainted, PolyTaint, Tainted };

const char* qualifier_name(Qualifier q);
std::optional<Qualifier> qualifier_from_name(const std::string& name);

// Untainted <= PolyTaint <= Tainted. PolyTaint sits in the middle: a
// polymorphic value may be tainted, so it flows into Tainted slots but not
// into Untainted ones.
bool qual_leq(Qualifier a, Qualifier b);
Qualifier qual_join(Qualifier a, Qualifier b);

struct QualifiedType {
  enum class Kind { Named, TypeVar, Array, Primitive };

  Qualifier qual = Qualifier::Tainted;
  Kind kind = Kind::Named;
  std::string name;                  // class name, type-variable name, or primitive name
  std::vector<QualifiedType> args;   // Named: type arguments; Array: single element type

  bool isNamed() const { return kind == Kind::Named; }
  bool isTypeVar() const { return kind == Kind::TypeVar; }
  bool isArray() const { return kind == Kind::Array; }
  bool isPrimitive() const { return kind == Kind::Primitive; }

  const QualifiedType& elem() const { return args.at(0); }

  bool operator==(const QualifiedType& o) const;
  bool operator!=(const QualifiedType& o) const { return !(*this == o); }
};

QualifiedType make_named(Qualifier q, std::string name, std::vector<QualifiedType> args = {});
QualifiedType make_typevar(Qualifier q, std::string name);
QualifiedType make_array(Qualifier q, QualifiedType elem);
QualifiedType make_primitive(Qualifier q, std::string name);

// Canonical rendering: every qualifier explicit.
//   @Tainted Map<@Tainted String, @Untainted String>
//   @Tainted (@Untainted String)[]
std::string render_type(const QualifiedType& t);

// Same underlying (erased) shape: kinds, names, and arities agree recursively.
bool same_shape(const QualifiedType& a, const QualifiedType& b);

struct ShapeMismatchError : std::runtime_error {
  ShapeMismatchError(const std::string& a, const std::string& b)
      : std::runtime_error("erased base types differ: " + a + " vs " + b) {}
};

// Subtype check for types of identical erased shape. The top-level qualifier
// is compared by qual_leq; type arguments and array contents are invariant
// (must be equal at every level). Throws ShapeMismatchError when the erased
// shapes differ.
bool is_subtype(const QualifiedType& t1, const QualifiedType& t2);

// Elementwise qualifier join over the same shape (used for flow merges of
// local-variable types).
QualifiedType join_types(const QualifiedType& a, const QualifiedType& b);

bool contains_typevar(const QualifiedType& t);

// Returns a copy of t with the top-level qualifier replaced.
QualifiedType with_qual(const QualifiedType& t, Qualifier q);

// The declaration context an unannotated type position appears in. Most
// contexts default to Tainted; a handful of constructs are known-safe and
// default to Untainted. Locals have no default at all (their qualifiers are
// flow-inferred), so they never go through default_type.
enum class TypeContext {
  Field,
  Param,
  Return,
  TypeArg,
  EnumConst,
  ClassLiteral,
  Lambda,
  StaticFinalField,  // resolved lazily from the initializer; the fallback here is Tainted
  Cast,
  ArrayInit,
};

Qualifier default_qual(TypeContext ctx);

using Substitution = std::map<std::string, QualifiedType>;

// Matches `declared` (which may contain type variables) against `desired` and
// returns the substitution that maps declared onto desired exactly, or
// nullopt when no such substitution exists (shape conflict, or a fixed
// qualifier in declared disagrees with desired). A variable bound twice must
// bind to identical types.
std::optional<Substitution> find_type_subst(const QualifiedType& declared,
                                            const QualifiedType& desired);

// Replaces type variables in t by their bindings. Variables not covered by
// the substitution are left in place.
QualifiedType apply_subst(const Substitution& s, const QualifiedType& t);

// Method signature as the checker consumes it: fully qualified types at every
// position. ptParams lists the parameter indices declared @PolyTaint; the
// return's PolyTaint-ness is carried by returnType itself.
struct MethodSig {
  std::string owner;
  std::string name;
  std::string pkg;
  bool isStatic = false;
  QualifiedType receiverType;  // Named(owner, class type params as vars); meaningless for statics
  std::vector<QualifiedType> paramTypes;
  QualifiedType returnType;
  std::vector<int> ptParams;

  std::string id() const { return pkg + "." + owner + "#" + name; }
};

}  // namespace minij
