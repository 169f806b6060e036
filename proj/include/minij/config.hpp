#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace minij {

// Checker-side configuration. Method ids are "pkg.Class#method".
struct CheckConfig {
  // Regex over package names treated as annotated code. Empty means: every
  // package that has source in the corpus is annotated (library packages are
  // not).
  std::string annotatedPackages;
  std::vector<std::string> sources;                    // return always Tainted
  std::vector<std::pair<std::string, int>> sinks;      // (id, param index) requires Untainted
  std::vector<std::string> sanitizers;                 // return always Untainted
  std::vector<std::string> stubPaths;
  bool emitFixes = false;
  bool constructDefaulting = true;

  bool is_source(const std::string& id) const;
  bool is_sanitizer(const std::string& id) const;
  std::vector<int> sink_params(const std::string& id) const;
};

// Inference-side knobs.
struct SearchConfig {
  int searchDepth = 15;
  int polyDepth = 5;
  bool localOpt = true;
  bool batching = true;
  bool genericsFix = true;
  bool polyFix = true;
  int maxAnnsPerWarning = 0;  // 0 = unlimited
  int budget = 1000;          // checker runs per inference
  bool inPlace = false;
};

struct ToolConfig {
  CheckConfig check;
  SearchConfig search;
  std::vector<std::string> srcDirs;
  std::string stubDir;
  std::string cacheDir;
  std::string outDir = "out";
  std::string format = "human";  // or "json"
  int jobs = 0;                  // 0 = hardware concurrency
  std::string configDir;         // directory of the config file, for relative paths
};

struct ConfigError {
  std::string message;
};

// Flat key/value file: one `key = value` per line, `#` comments, arrays are
// comma separated. Returns error for unknown keys or bad values.
std::optional<ConfigError> load_config_file(const std::string& path, ToolConfig& out);

// Applies a single `key=value` override (same keys as the file).
std::optional<ConfigError> apply_config_kv(const std::string& key, const std::string& value,
                                           ToolConfig& out);

}  // namespace minij
