#pragma once

#include <string>

namespace minij {

// Half-open source range. Lines and columns are 1-based; offsets are byte
// offsets into the unit text.
struct Span {
  int line = 0;
  int col = 0;
  int endLine = 0;
  int endCol = 0;
  int offset = 0;
  int endOffset = 0;

  bool valid() const { return line > 0; }
};

struct SrcPos {
  int line = 0;
  int col = 0;
  int offset = 0;
};

inline Span span_between(const Span& a, const Span& b) {
  Span s = a;
  s.endLine = b.endLine;
  s.endCol = b.endCol;
  s.endOffset = b.endOffset;
  return s;
}

}  // namespace minij
