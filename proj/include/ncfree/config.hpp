#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ncfree/experiments.hpp"

namespace ncfree {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ConfigValue {
  using List = std::vector<ConfigValue>;
  std::variant<bool, long long, double, std::string, List> v;

  bool is_list() const { return std::holds_alternative<List>(v); }
  std::string to_text() const;
};

/// Sectioned key-value text:
///   # comment
///   [section]
///   key = 42 | 2.5 | true | "text" | [1, 2, [3, "x"]]
/// Keys are addressed as "section.key".
class RunConfig {
 public:
  static RunConfig parse(std::string_view text, const std::string& source = "<string>");

  const std::string& text() const { return text_; }
  /// FNV-1a over the raw bytes.
  std::uint64_t hash() const { return hash_; }
  const std::map<std::string, ConfigValue>& values() const { return values_; }

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, ConfigValue v);
  void set_default(const std::string& key, ConfigValue v);

  long long get_int(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;
  const ConfigValue& get(const std::string& key) const;

 private:
  std::string text_;
  std::uint64_t hash_ = 0;
  std::map<std::string, ConfigValue> values_;
};

std::uint64_t fnv1a(std::string_view bytes);

/// Reads, schema-checks and fills defaults (experiment.quadrature_order = 21,
/// grid.samples = 200, ...). Errors name the offending key.
RunConfig load_config(const std::string& path);
RunConfig validate_config(RunConfig cfg);

/// Builds the experiment description; enforces required keys for the kind
/// named in experiment.kind and the surrogate divisibility rule.
ExperimentConfig experiment_config(const RunConfig& cfg);

}  // namespace ncfree
