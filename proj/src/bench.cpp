#include "minij/bench.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

using nlohmann::json;

namespace minij {

std::vector<Expectation> scan_expectations(const std::string& path, const std::string& text,
                                           std::vector<ExpectationError>& errors) {
  std::vector<Expectation> out;
  int line = 1;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string_view lv(text.data() + pos,
                        (nl == std::string::npos ? text.size() : nl) - pos);
    int markers = 0;
    size_t at = lv.find("//!");
    while (at != std::string_view::npos) {
      ++markers;
      size_t w = at + 3;
      size_t we = w;
      while (we < lv.size() && std::isalpha((unsigned char)lv[we])) ++we;
      std::string word(lv.substr(w, we - w));
      if (markers > 1) {
        errors.push_back({path, line, "multiple expectation markers on one line"});
      } else if (word == "flow" || word == "benign") {
        Expectation e;
        e.kind = word == "flow" ? Expectation::Kind::Flow : Expectation::Kind::Benign;
        e.file = path;
        e.line = line;
        std::string label(lv.substr(we));
        size_t b = label.find_first_not_of(" \t");
        e.label = b == std::string::npos ? "" : label.substr(b);
        out.push_back(std::move(e));
      } else {
        errors.push_back({path, line, "unknown expectation marker '//!" + word + "'"});
      }
      at = lv.find("//!", we);
    }
    if (nl == std::string::npos) break;
    pos = nl + 1;
    ++line;
  }
  return out;
}

double BenchScore::precision() const {
  int denom = detected + falsePositives;
  return denom == 0 ? 1.0 : (double)detected / denom;
}

double BenchScore::recall() const {
  int denom = detected + missed;
  return denom == 0 ? 1.0 : (double)detected / denom;
}

namespace {

struct LinePoint {
  std::string file;
  int line;
  bool operator<(const LinePoint& o) const {
    return file < o.file || (file == o.file && line < o.line);
  }
};

std::set<LinePoint> diag_points(const Diagnostic& d) {
  std::set<LinePoint> pts{{d.file, d.line}};
  for (const FixSet& fs : d.fixes)
    for (const Fix& f : fs.fixes()) pts.insert({f.site.file, f.site.line});
  return pts;
}

}  // namespace

BenchScore score_program(const std::vector<Diagnostic>& diags,
                         const std::vector<Expectation>& exps,
                         const std::vector<AcceptedFix>* inferred) {
  BenchScore s;
  s.diagnostics = (int)diags.size();

  std::set<LinePoint> covered;
  std::vector<bool> diagMatched(diags.size(), false);

  auto flows = std::vector<const Expectation*>();
  std::set<LinePoint> flowPoints;
  for (const Expectation& e : exps)
    if (e.kind == Expectation::Kind::Flow) {
      flows.push_back(&e);
      flowPoints.insert({e.file, e.line});
    }

  for (size_t i = 0; i < diags.size(); ++i) {
    auto pts = diag_points(diags[i]);
    for (const auto& p : pts)
      if (flowPoints.count(p)) {
        diagMatched[i] = true;
        covered.insert(p);
      }
  }
  if (inferred) {
    for (const AcceptedFix& af : *inferred) {
      LinePoint site{af.fix.site.file, af.fix.site.line};
      LinePoint from{af.fromFile, af.fromLine};
      if (flowPoints.count(site)) covered.insert(site);
      if (flowPoints.count(from)) covered.insert(from);
    }
  }

  for (const Expectation* e : flows) {
    if (covered.count({e->file, e->line}))
      ++s.detected;
    else {
      ++s.missed;
      s.unmatched.push_back(*e);
    }
  }
  for (size_t i = 0; i < diags.size(); ++i)
    if (!diagMatched[i]) ++s.falsePositives;
  return s;
}

BenchScore aggregate_scores(const std::vector<BenchRow>& rows, const std::string& phase) {
  BenchScore total;
  for (const BenchRow& r : rows) {
    if (r.phase != phase) continue;
    total.detected += r.score.detected;
    total.missed += r.score.missed;
    total.falsePositives += r.score.falsePositives;
    total.diagnostics += r.score.diagnostics;
    for (const auto& u : r.score.unmatched) total.unmatched.push_back(u);
  }
  return total;
}

static void table_line(std::ostringstream& os, const std::string& prog, const std::string& phase,
                       const BenchScore& s) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%-18s %-5s %8d %8d %8d %8d %10.3f %10.3f\n", prog.c_str(),
                phase.c_str(), s.detected, s.missed, s.falsePositives, s.diagnostics,
                s.precision(), s.recall());
  os << buf;
}

std::string bench_table(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  char hdr[160];
  std::snprintf(hdr, sizeof(hdr), "%-18s %-5s %8s %8s %8s %8s %10s %10s\n", "program", "phase",
                "found", "missed", "extra", "diags", "precision", "recall");
  os << hdr;
  for (const BenchRow& r : rows) table_line(os, r.program, r.phase, r.score);
  for (const std::string& phase : {std::string("pre"), std::string("post")}) {
    bool any = std::any_of(rows.begin(), rows.end(),
                           [&](const BenchRow& r) { return r.phase == phase; });
    if (any) table_line(os, "TOTAL", phase, aggregate_scores(rows, phase));
  }
  bool unmatched = false;
  for (const BenchRow& r : rows)
    if (!r.score.unmatched.empty()) unmatched = true;
  if (unmatched) {
    os << "\nunmatched expectations:\n";
    for (const BenchRow& r : rows)
      for (const Expectation& e : r.score.unmatched)
        os << "  [" << r.phase << "] " << e.file << ":" << e.line << " flow " << e.label << "\n";
  }
  return os.str();
}

std::string bench_json(const std::vector<BenchRow>& rows) {
  json j;
  json arr = json::array();
  for (const BenchRow& r : rows) {
    json row;
    row["program"] = r.program;
    row["phase"] = r.phase;
    row["detected"] = r.score.detected;
    row["missed"] = r.score.missed;
    row["falsePositives"] = r.score.falsePositives;
    row["diagnostics"] = r.score.diagnostics;
    row["precision"] = r.score.precision();
    row["recall"] = r.score.recall();
    json un = json::array();
    for (const Expectation& e : r.score.unmatched)
      un.push_back({{"file", e.file}, {"line", e.line}, {"label", e.label}});
    row["unmatched"] = un;
    arr.push_back(row);
  }
  j["programs"] = arr;
  for (const std::string& phase : {std::string("pre"), std::string("post")}) {
    BenchScore t = aggregate_scores(rows, phase);
    json agg;
    agg["detected"] = t.detected;
    agg["missed"] = t.missed;
    agg["falsePositives"] = t.falsePositives;
    agg["diagnostics"] = t.diagnostics;
    agg["precision"] = t.precision();
    agg["recall"] = t.recall();
    j["aggregate"][phase] = agg;
  }
  return j.dump(2);
}

}  // namespace minij
