#pragma once

// Stub files supply trusted signatures for library methods, one per line:
//
//   lib.net.Fetcher#fetch(String) : @Untainted String (@Untainted String)
//
// The part before ':' selects the method; after it come the annotated return
// type and the annotated parameter types. Blank lines and '#'-initial lines
// are ignored.

#include <map>
#include <string>
#include <vector>

#include "minij/ast.hpp"

namespace minij {

struct StubSig {
  std::string pkg;
  std::string owner;
  std::string method;
  ParsedType returnType;
  std::vector<ParsedType> paramTypes;
};

struct StubError {
  std::string file;
  int line = 0;
  std::string message;
};

struct StubSet {
  // keyed by "pkg.Owner#method"
  std::map<std::string, StubSig> sigs;
  std::vector<StubError> errors;

  const StubSig* find(const std::string& id) const {
    auto it = sigs.find(id);
    return it == sigs.end() ? nullptr : &it->second;
  }
};

StubSet parse_stub_text(const std::string& file, const std::string& text);
StubSet load_stub_files(const std::vector<std::string>& paths);

}  // namespace minij
