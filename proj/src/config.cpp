#include "minij/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace minij {

bool CheckConfig::is_source(const std::string& id) const {
  return std::find(sources.begin(), sources.end(), id) != sources.end();
}

bool CheckConfig::is_sanitizer(const std::string& id) const {
  return std::find(sanitizers.begin(), sanitizers.end(), id) != sanitizers.end();
}

std::vector<int> CheckConfig::sink_params(const std::string& id) const {
  std::vector<int> out;
  for (const auto& [sid, idx] : sinks)
    if (sid == id) out.push_back(idx);
  return out;
}

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(v);
  while (std::getline(ss, cur, ',')) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::optional<ConfigError> parse_bool(const std::string& key, const std::string& v, bool& out) {
  if (v == "true" || v == "on" || v == "1") {
    out = true;
    return std::nullopt;
  }
  if (v == "false" || v == "off" || v == "0") {
    out = false;
    return std::nullopt;
  }
  return ConfigError{"bad boolean for " + key + ": " + v};
}

std::optional<ConfigError> parse_int(const std::string& key, const std::string& v, int& out) {
  try {
    size_t pos = 0;
    out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
  } catch (...) {
    return ConfigError{"bad integer for " + key + ": " + v};
  }
  return std::nullopt;
}

}  // namespace

std::optional<ConfigError> apply_config_kv(const std::string& key, const std::string& value,
                                           ToolConfig& out) {
  if (key == "srcDirs") {
    out.srcDirs = split_list(value);
    return std::nullopt;
  }
  if (key == "stubDir") {
    out.stubDir = value;
    return std::nullopt;
  }
  if (key == "cacheDir") {
    out.cacheDir = value;
    return std::nullopt;
  }
  if (key == "outDir") {
    out.outDir = value;
    return std::nullopt;
  }
  if (key == "format") {
    if (value != "human" && value != "json") return ConfigError{"format must be human or json"};
    out.format = value;
    return std::nullopt;
  }
  if (key == "jobs") return parse_int(key, value, out.jobs);
  if (key == "annotatedPackages") {
    out.check.annotatedPackages = value;
    return std::nullopt;
  }
  if (key == "sources") {
    out.check.sources = split_list(value);
    return std::nullopt;
  }
  if (key == "sanitizers") {
    out.check.sanitizers = split_list(value);
    return std::nullopt;
  }
  if (key == "sinks") {
    out.check.sinks.clear();
    for (const auto& item : split_list(value)) {
      size_t c = item.rfind(':');
      if (c == std::string::npos) return ConfigError{"sink needs id:paramIndex, got " + item};
      int idx = 0;
      if (auto e = parse_int("sinks", item.substr(c + 1), idx)) return e;
      out.check.sinks.emplace_back(trim(item.substr(0, c)), idx);
    }
    return std::nullopt;
  }
  if (key == "stubs") {
    out.check.stubPaths = split_list(value);
    return std::nullopt;
  }
  if (key == "constructDefaulting") return parse_bool(key, value, out.check.constructDefaulting);
  if (key == "searchDepth") return parse_int(key, value, out.search.searchDepth);
  if (key == "polyDepth") return parse_int(key, value, out.search.polyDepth);
  if (key == "localOpt") return parse_bool(key, value, out.search.localOpt);
  if (key == "batching") return parse_bool(key, value, out.search.batching);
  if (key == "genericsFix") return parse_bool(key, value, out.search.genericsFix);
  if (key == "polyFix") return parse_bool(key, value, out.search.polyFix);
  if (key == "maxAnnsPerWarning") return parse_int(key, value, out.search.maxAnnsPerWarning);
  if (key == "budget") return parse_int(key, value, out.search.budget);
  return ConfigError{"unknown config key: " + key};
}

std::optional<ConfigError> load_config_file(const std::string& path, ToolConfig& out) {
  std::ifstream in(path);
  if (!in) return ConfigError{"cannot open config file " + path};
  size_t slash = path.find_last_of('/');
  out.configDir = slash == std::string::npos ? "." : path.substr(0, slash);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      return ConfigError{path + ":" + std::to_string(lineNo) + ": expected key = value"};
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (auto e = apply_config_kv(key, value, out))
      return ConfigError{path + ":" + std::to_string(lineNo) + ": " + e->message};
  }
  return std::nullopt;
}

}  // namespace minij
