#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "noisyldpc/degree.hpp"

namespace noisyldpc {

/// Configuration problem tied to one key (or to a line when the key is unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what);
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Flat "key = value" configuration. Blank lines and text after '#' are
/// ignored; "[section]" headers prefix the following keys with "section.".
class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }
  const std::string& source() const { return source_; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  /// Comma-separated numbers; "a:step:b" expands to an inclusive range.
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;

  /// Throws ConfigError naming the first key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

 private:
  std::map<std::string, std::string> values_;
  std::string source_;
};

/// "2:0.5, 4:0.5" -> {{2, 0.5}, {4, 0.5}}.
EdgePolynomial parse_polynomial(std::string_view text);

/// Degree distribution from "distribution" (JSON file), "lambda"/"rho"
/// polynomials, or "dv"/"dc" for a regular code.
DegreeDistribution distribution_from(const Config& cfg);

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string cache_dir;
  std::string out;
};

struct RunOutputs {
  std::vector<std::filesystem::path> files;
  std::filesystem::path manifest;
};

/// Runs the experiment named by the "kind" key (threshold, exit, design, ber
/// or construct) and writes its outputs plus a JSON manifest into the "out"
/// directory. Options given in `overrides` replace the matching keys.
RunOutputs run_experiment(Config cfg, const RunOptions& overrides = {});

RunOutputs run_config(const std::filesystem::path& path, const RunOptions& overrides = {});

}  // namespace noisyldpc
