#pragma once

// Shared corpus plumbing for the test binaries. Loading mirrors the CLI
// driver (config anchoring, stub loading, parse + resolve) so library-level
// assertions see exactly what the tool sees.

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "minij/checker.hpp"
#include "minij/config.hpp"
#include "minij/infer.hpp"
#include "minij/parser.hpp"
#include "minij/resolve.hpp"

namespace testutil {

using namespace minij;

inline std::string corpus_path(const std::string& rel) {
  return std::string(CORPUS_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline ToolConfig corpus_config() {
  ToolConfig tc;
  if (auto err = load_config_file(corpus_path("taint.cfg"), tc))
    throw std::runtime_error(err->message);
  for (auto& p : tc.check.stubPaths)
    if (!p.empty() && p.front() != '/') p = tc.configDir + "/" + p;
  return tc;
}

struct Program {
  std::shared_ptr<ProgramDB> db;
  StubSet stubs;
};

inline Program program_from_units(std::vector<std::pair<std::string, std::string>> srcs,
                                  const StubSet& stubs = {}) {
  std::vector<SourceUnit> units;
  for (auto& [path, text] : srcs) {
    auto pr = parse_unit(path, text);
    if (!pr.ok()) {
      std::string msg = "parse failed for " + path;
      for (const auto& e : pr.errors)
        msg += "\n  " + std::to_string(e.span.line) + ":" + std::to_string(e.span.col) + " " +
               e.message;
      throw std::runtime_error(msg);
    }
    units.push_back(std::move(*pr.unit));
  }
  Program p;
  p.stubs = stubs;
  auto rr = resolve(std::move(units), p.stubs);
  if (!rr.ok()) {
    std::string msg = "resolve failed";
    for (const auto& e : rr.errors) msg += "\n  " + e.file + ": " + e.message;
    throw std::runtime_error(msg);
  }
  p.db = rr.db;
  return p;
}

inline Program load_files(const std::vector<std::string>& files, const ToolConfig& tc) {
  std::vector<std::pair<std::string, std::string>> srcs;
  for (const std::string& f : files) srcs.emplace_back(f, read_file(f));
  return program_from_units(std::move(srcs), load_stub_files(tc.check.stubPaths));
}

// A corpus program is either one .mj file or a directory of them.
inline std::vector<std::string> program_files(const std::string& name) {
  namespace fs = std::filesystem;
  fs::path p = corpus_path(name);
  if (fs::is_regular_file(p)) return {p.string()};
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(p))
    if (e.is_regular_file() && e.path().extension() == ".mj") files.push_back(e.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no sources for corpus program " + name);
  return files;
}

inline std::vector<std::string> all_program_names() {
  namespace fs = std::filesystem;
  std::vector<std::string> names;
  for (const auto& e : fs::directory_iterator(corpus_path(""))) {
    if (e.is_regular_file() && e.path().extension() == ".mj")
      names.push_back(e.path().filename().string());
    else if (e.is_directory())
      names.push_back(e.path().filename().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

inline Program load_corpus_program(const std::string& name, const ToolConfig& tc) {
  return load_files(program_files(name), tc);
}

inline std::vector<Diagnostic> run_check(const Program& p, const CheckConfig& cfg, int jobs = 0) {
  DBView view(p.db.get(), &cfg);
  return check_program(view, jobs);
}

// Diagnostics carrying candidate fixes, as the inference loop sees them.
inline std::vector<Diagnostic> run_check_fixes(const Program& p, CheckConfig cfg,
                                               const SearchConfig& search) {
  cfg.emitFixes = true;
  DBView view(p.db.get(), &cfg);
  return check_program(view, 0, &search);
}

// Location-and-shape fingerprint, enough to compare two diagnostic lists.
inline std::string diag_fingerprint(const Diagnostic& d) {
  return d.file + ":" + std::to_string(d.line) + ":" + std::to_string(d.col) + "|" +
         diag_kind_name(d.kind) + "|" + std::to_string((int)d.flavor) + "|" + render_type(d.lhs) +
         "|" + render_type(d.rhs);
}

inline std::vector<std::string> fingerprints(const std::vector<Diagnostic>& ds) {
  std::vector<std::string> out;
  for (const auto& d : ds) out.push_back(diag_fingerprint(d));
  return out;
}

inline std::string insertion_line(const AcceptedFix& af) {
  return std::string(qualifier_name(af.fix.ann)) + " " + af.fix.site.file + ":" +
         std::to_string(af.fix.site.line) + ":" + std::to_string(af.fix.site.col);
}

inline std::vector<std::string> insertion_lines(const InferResult& res) {
  std::vector<std::string> out;
  for (const auto& af : res.accepted) out.push_back(insertion_line(af));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testutil
