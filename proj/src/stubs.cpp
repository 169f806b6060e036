#include "minij/stubs.hpp"

#include <fstream>
#include <sstream>

#include "minij/lexer.hpp"
#include "minij/parser.hpp"

namespace minij {

namespace {

// Parses an annotated type from a fragment by piggybacking on the statement
// parser: wrap it as a parameter declaration.
std::optional<ParsedType> parse_type_fragment(const std::string& fragment) {
  std::string program = "package stub; class S { void m(" + fragment + " x) { } }";
  ParseResult r = parse_unit("<stub>", program);
  if (!r.ok()) return std::nullopt;
  const auto& cls = r.unit->classes.at(0);
  if (cls.methods.size() != 1 || cls.methods[0].params.size() != 1) return std::nullopt;
  return cls.methods[0].params[0].type;
}

// Splits a comma-separated list at depth 0 with respect to <> nesting.
std::vector<std::string> split_types(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '<') ++depth;
    if (c == '>') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
      continue;
    }
    cur += c;
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

StubSet parse_stub_text(const std::string& file, const std::string& text) {
  StubSet out;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;

    auto fail = [&](const std::string& msg) { out.errors.push_back({file, lineNo, msg}); };

    size_t hash = t.find('#');
    size_t selOpen = t.find('(', hash == std::string::npos ? 0 : hash);
    size_t selClose = t.find(')', selOpen == std::string::npos ? 0 : selOpen);
    size_t colon = t.find(':', selClose == std::string::npos ? 0 : selClose);
    if (hash == std::string::npos || selOpen == std::string::npos ||
        selClose == std::string::npos || colon == std::string::npos) {
      fail("expected 'pkg.Class#method(params) : return (params)'");
      continue;
    }

    StubSig sig;
    std::string qualified = trim(t.substr(0, hash));
    size_t lastDot = qualified.rfind('.');
    if (lastDot == std::string::npos) {
      fail("expected package-qualified class before '#'");
      continue;
    }
    sig.pkg = qualified.substr(0, lastDot);
    sig.owner = qualified.substr(lastDot + 1);
    sig.method = trim(t.substr(hash + 1, selOpen - hash - 1));

    std::string selParams = trim(t.substr(selOpen + 1, selClose - selOpen - 1));
    size_t nSel = selParams.empty() ? 0 : split_types(selParams).size();

    std::string rest = trim(t.substr(colon + 1));
    size_t parOpen = std::string::npos;
    int depth = 0;
    for (size_t i = 0; i < rest.size(); ++i) {
      if (rest[i] == '<') ++depth;
      if (rest[i] == '>') --depth;
      if (rest[i] == '(' && depth == 0) {
        parOpen = i;
        break;
      }
    }
    if (parOpen == std::string::npos || rest.back() != ')') {
      fail("expected return type followed by '(param types)'");
      continue;
    }
    auto ret = parse_type_fragment(trim(rest.substr(0, parOpen)));
    if (!ret) {
      fail("unparseable return type");
      continue;
    }
    sig.returnType = *ret;

    std::string paramList = trim(rest.substr(parOpen + 1, rest.size() - parOpen - 2));
    bool bad = false;
    if (!paramList.empty()) {
      for (const auto& frag : split_types(paramList)) {
        auto pt = parse_type_fragment(trim(frag));
        if (!pt) {
          fail("unparseable parameter type '" + trim(frag) + "'");
          bad = true;
          break;
        }
        sig.paramTypes.push_back(*pt);
      }
    }
    if (bad) continue;
    if (nSel != sig.paramTypes.size()) {
      fail("selector arity differs from annotated parameter list");
      continue;
    }

    out.sigs[sig.pkg + "." + sig.owner + "#" + sig.method] = std::move(sig);
  }
  return out;
}

StubSet load_stub_files(const std::vector<std::string>& paths) {
  StubSet all;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) {
      all.errors.push_back({p, 0, "cannot open stub file"});
      continue;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    StubSet one = parse_stub_text(p, buf.str());
    for (auto& [k, v] : one.sigs) all.sigs[k] = std::move(v);
    for (auto& e : one.errors) all.errors.push_back(std::move(e));
  }
  return all;
}

}  // namespace minij
