#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "minij/ast.hpp"
#include "minij/builtins.hpp"
#include "minij/stubs.hpp"

namespace minij {

struct FieldInfo {
  std::string name;
  std::string owner;
  ParsedType type;
  bool isStatic = false;
  bool isFinal = false;
  const Expr* init = nullptr;
  Span span;
};

struct ParamInfo {
  ParsedType type;
  std::string name;
  Span span;
};

struct MethodInfo {
  std::string name;
  std::string owner;
  bool isStatic = false;
  std::vector<std::string> typeParams;
  ParsedType returnType;
  std::vector<ParamInfo> params;
  const MethodDecl* decl = nullptr;  // null for builtins
  Span span;
  Span nameSpan;
};

struct ClassInfo {
  enum class Kind { Class, Enum };
  enum class Origin { Source, Builtin };

  std::string name;
  std::string pkg;
  Kind kind = Kind::Class;
  Origin origin = Origin::Source;
  std::vector<std::string> typeParams;
  std::optional<ParsedType> extends;
  std::string superName;  // convenience copy of extends base name
  std::vector<FieldInfo> fields;
  std::vector<MethodInfo> methods;
  std::vector<std::string> enumConsts;
  int unitIndex = -1;

  const FieldInfo* field(const std::string& n) const;
  const MethodInfo* method(const std::string& n) const;
  bool isBuiltin() const { return origin == Origin::Builtin; }
};

struct ResolveError {
  std::string file;
  std::string message;
  Span span;
};

// Local variable metadata collected during resolution. Locals are numbered
// per method in declaration order.
struct LocalInfo {
  std::string name;
  const LocalDeclStmt* decl = nullptr;
};

class ProgramDB {
 public:
  std::vector<SourceUnit> units;
  std::map<std::string, ClassInfo> classes;  // by simple class name
  StubSet stubs;
  // per (owner, method name): locals in declaration order
  std::map<std::string, std::vector<LocalInfo>> methodLocals;

  const ClassInfo* find_class(const std::string& name) const;
  // Climb the extends chain; returns the defining class as well.
  const FieldInfo* find_field(const std::string& cls, const std::string& name,
                              const ClassInfo** definingOut = nullptr) const;
  const MethodInfo* find_method(const std::string& cls, const std::string& name,
                                const ClassInfo** definingOut = nullptr) const;
  bool is_subclass(const std::string& sub, const std::string& super) const;
  std::vector<std::string> super_chain(const std::string& cls) const;  // cls first

  const std::vector<LocalInfo>& locals_of(const std::string& owner,
                                          const std::string& method) const;

  std::string unit_hash(int unitIndex) const;

  // Deterministic JSON rendering of the resolved program surface.
  std::string serialize() const;
};

struct ResolveResult {
  std::shared_ptr<ProgramDB> db;  // null when errors are present
  std::vector<ResolveError> errors;

  bool ok() const { return errors.empty() && db != nullptr; }
};

ResolveResult resolve(std::vector<SourceUnit> units, const StubSet& stubs = {});

// FNV-1a over the text; used for cache keys and patch drift detection.
std::string content_hash(const std::string& text);

// class -> source classes whose checking can observe it (anything mentioning
// it in a signature or body). Builtin targets are omitted: they never change.
std::map<std::string, std::set<std::string>> reverse_dependencies(const ProgramDB& db);

// The class itself plus everything reachable over reverse dependency edges.
std::set<std::string> dependency_closure(const std::string& cls,
                                         const std::map<std::string, std::set<std::string>>& rev);

bool is_primitive_name(const std::string& name);

}  // namespace minij
