#pragma once

// Built-in library surface. Everything here lives in lib.* packages, which
// the checker treats as unannotated third-party code unless a stub or config
// entry says otherwise.

#include <vector>

#include "minij/ast.hpp"

namespace minij {

struct BuiltinMethod {
  std::string owner;
  std::string name;
  bool isStatic = false;
  ParsedType returnType;
  std::vector<ParsedType> paramTypes;
};

struct BuiltinClass {
  std::string name;
  std::string pkg;
  std::vector<std::string> typeParams;
  std::string superName;  // empty if none
  std::vector<BuiltinMethod> methods;
};

const std::vector<BuiltinClass>& load_builtins();

}  // namespace minij
