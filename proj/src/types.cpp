#include "minij/types.hpp"

#include <cassert>

namespace minij {

const char* qualifier_name(Qualifier q) {
  switch (q) {
    case Qualifier::Untainted: return "@Untainted";
    case Qualifier::PolyTaint: return "@PolyTaint";
    case Qualifier::Tainted: return "@Tainted";
  }
  return "@Tainted";
}

std::optional<Qualifier> qualifier_from_name(const std::string& name) {
  if (name == "@Untainted" || name == "Untainted") return Qualifier::Untainted;
  if (name == "@PolyTaint" || name == "PolyTaint") return Qualifier::PolyTaint;
  if (name == "@Tainted" || name == "Tainted") return Qualifier::Tainted;
  return std::nullopt;
}

static int rank(Qualifier q) {
  switch (q) {
    case Qualifier::Untainted: return 0;
    case Qualifier::PolyTaint: return 1;
    case Qualifier::Tainted: return 2;
  }
  return 2;
}

bool qual_leq(Qualifier a, Qualifier b) { return rank(a) <= rank(b); }

Qualifier qual_join(Qualifier a, Qualifier b) { return rank(a) >= rank(b) ? a : b; }

bool QualifiedType::operator==(const QualifiedType& o) const {
  return qual == o.qual && kind == o.kind && name == o.name && args == o.args;
}

QualifiedType make_named(Qualifier q, std::string name, std::vector<QualifiedType> args) {
  QualifiedType t;
  t.qual = q;
  t.kind = QualifiedType::Kind::Named;
  t.name = std::move(name);
  t.args = std::move(args);
  return t;
}

QualifiedType make_typevar(Qualifier q, std::string name) {
  QualifiedType t;
  t.qual = q;
  t.kind = QualifiedType::Kind::TypeVar;
  t.name = std::move(name);
  return t;
}

QualifiedType make_array(Qualifier q, QualifiedType elem) {
  QualifiedType t;
  t.qual = q;
  t.kind = QualifiedType::Kind::Array;
  t.name = "[]";
  t.args.push_back(std::move(elem));
  return t;
}

QualifiedType make_primitive(Qualifier q, std::string name) {
  QualifiedType t;
  t.qual = q;
  t.kind = QualifiedType::Kind::Primitive;
  t.name = std::move(name);
  return t;
}

std::string render_type(const QualifiedType& t) {
  std::string q = qualifier_name(t.qual);
  switch (t.kind) {
    case QualifiedType::Kind::Array:
      return q + " (" + render_type(t.elem()) + ")[]";
    case QualifiedType::Kind::Named: {
      std::string s = q + " " + t.name;
      if (!t.args.empty()) {
        s += "<";
        for (size_t i = 0; i < t.args.size(); ++i) {
          if (i) s += ", ";
          s += render_type(t.args[i]);
        }
        s += ">";
      }
      return s;
    }
    case QualifiedType::Kind::TypeVar:
    case QualifiedType::Kind::Primitive:
      return q + " " + t.name;
  }
  return q + " " + t.name;
}

bool same_shape(const QualifiedType& a, const QualifiedType& b) {
  if (a.kind != b.kind || a.name != b.name || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!same_shape(a.args[i], b.args[i])) return false;
  return true;
}

static bool invariant_equal(const QualifiedType& a, const QualifiedType& b) {
  if (a.qual != b.qual) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!invariant_equal(a.args[i], b.args[i])) return false;
  return true;
}

bool is_subtype(const QualifiedType& t1, const QualifiedType& t2) {
  if (!same_shape(t1, t2)) throw ShapeMismatchError(render_type(t1), render_type(t2));
  if (!qual_leq(t1.qual, t2.qual)) return false;
  // Arguments and array contents are invariant.
  for (size_t i = 0; i < t1.args.size(); ++i)
    if (!invariant_equal(t1.args[i], t2.args[i])) return false;
  return true;
}

QualifiedType join_types(const QualifiedType& a, const QualifiedType& b) {
  assert(same_shape(a, b));
  QualifiedType r = a;
  r.qual = qual_join(a.qual, b.qual);
  for (size_t i = 0; i < a.args.size(); ++i) r.args[i] = join_types(a.args[i], b.args[i]);
  return r;
}

bool contains_typevar(const QualifiedType& t) {
  if (t.isTypeVar()) return true;
  for (const auto& a : t.args)
    if (contains_typevar(a)) return true;
  return false;
}

QualifiedType with_qual(const QualifiedType& t, Qualifier q) {
  QualifiedType r = t;
  r.qual = q;
  return r;
}

Qualifier default_qual(TypeContext ctx) {
  switch (ctx) {
    case TypeContext::EnumConst:
    case TypeContext::ClassLiteral:
    case TypeContext::Lambda:
      return Qualifier::Untainted;
    case TypeContext::Field:
    case TypeContext::Param:
    case TypeContext::Return:
    case TypeContext::TypeArg:
    case TypeContext::StaticFinalField:
    case TypeContext::Cast:
    case TypeContext::ArrayInit:
      return Qualifier::Tainted;
  }
  return Qualifier::Tainted;
}

static bool unify(const QualifiedType& declared, const QualifiedType& desired, Substitution& s) {
  if (declared.isTypeVar()) {
    auto it = s.find(declared.name);
    if (it != s.end()) return it->second == desired;
    s.emplace(declared.name, desired);
    return true;
  }
  if (declared.kind != desired.kind || declared.name != desired.name ||
      declared.args.size() != desired.args.size())
    return false;
  // Non-variable positions cannot absorb a qualifier change.
  if (declared.qual != desired.qual) return false;
  for (size_t i = 0; i < declared.args.size(); ++i)
    if (!unify(declared.args[i], desired.args[i], s)) return false;
  return true;
}

std::optional<Substitution> find_type_subst(const QualifiedType& declared,
                                            const QualifiedType& desired) {
  Substitution s;
  if (!unify(declared, desired, s)) return std::nullopt;
  return s;
}

QualifiedType apply_subst(const Substitution& s, const QualifiedType& t) {
  if (t.isTypeVar()) {
    auto it = s.find(t.name);
    if (it != s.end()) return it->second;
    return t;
  }
  QualifiedType r = t;
  for (auto& a : r.args) a = apply_subst(s, a);
  return r;
}

}  // namespace minij
