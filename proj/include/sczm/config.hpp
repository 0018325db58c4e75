#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sczm/solver.hpp"

namespace sczm {

/// Flat dotted-key configuration text: one `key = value` per line, `#`
/// comments. Every key must be consumed; unknown keys are rejected.
class Config {
 public:
  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key);
  double get_double(const std::string& key);
  int get_int(const std::string& key);
  bool get_bool(const std::string& key);
  std::string get_string_or(const std::string& key, const std::string& fallback);
  double get_double_or(const std::string& key, double fallback);
  int get_int_or(const std::string& key, int fallback);
  bool get_bool_or(const std::string& key, bool fallback);

  /// Keys beginning with `prefix.`, in file order.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  /// Throws ConfigError naming any key never read.
  void reject_unconsumed() const;

 private:
  std::string raw(const std::string& key);
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, int> index_;
  mutable std::vector<bool> consumed_;
};

/// Schedule literal: comma-separated `t:value` pairs.
Schedule parse_schedule(const std::string& text);

struct SolveSetup {
  Problem problem;
  std::string output_dir;
  std::vector<double> field_output_times;
};

/// Builds a solve problem from a configuration file: mesh generation or
/// file, interface (segment / grains / fitted split), materials, TSL,
/// boundary condition schedules and solver options.
SolveSetup build_solve_setup(Config& cfg);

}  // namespace sczm
