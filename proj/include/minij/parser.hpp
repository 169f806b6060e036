#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minij/ast.hpp"

namespace minij {

struct ParseError {
  std::string message;
  Span span;
};

// On any error the unit is absent: a malformed input never yields a partial
// tree. All diagnosable errors are collected before giving up.
struct ParseResult {
  std::optional<SourceUnit> unit;
  std::vector<ParseError> errors;

  bool ok() const { return errors.empty() && unit.has_value(); }
};

ParseResult parse_unit(const std::string& path, const std::string& text);

}  // namespace minij
