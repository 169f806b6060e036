#pragma once

#include <string>
#include <vector>

#include "minij/infer.hpp"

namespace minij {

// Ground-truth labels parsed from trailing `//!flow` / `//!benign` comments.
struct Expectation {
  enum class Kind { Flow, Benign };
  Kind kind = Kind::Flow;
  std::string file;
  int line = 0;
  std::string label;
};

struct ExpectationError {
  std::string file;
  int line = 0;
  std::string message;
};

std::vector<Expectation> scan_expectations(const std::string& path, const std::string& text,
                                           std::vector<ExpectationError>& errors);

struct BenchScore {
  int detected = 0;
  int missed = 0;
  int falsePositives = 0;
  int diagnostics = 0;
  std::vector<Expectation> unmatched;  // missed flows, always reported

  double precision() const;
  double recall() const;
};

// Line-level matching: a diagnostic covers an expectation when it sits on the
// labeled line or proposes a fix there; an inference-inserted annotation also
// counts, through its own site or the diagnostic it descends from.
BenchScore score_program(const std::vector<Diagnostic>& diags,
                         const std::vector<Expectation>& exps,
                         const std::vector<AcceptedFix>* inferred);

struct BenchRow {
  std::string program;
  std::string phase;  // "pre" or "post"
  BenchScore score;
};

BenchScore aggregate_scores(const std::vector<BenchRow>& rows, const std::string& phase);
std::string bench_table(const std::vector<BenchRow>& rows);
std::string bench_json(const std::vector<BenchRow>& rows);

}  // namespace minij
