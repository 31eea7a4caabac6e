#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cldp {

/// Configuration problem (syntax, unknown keys, invalid values). The CLI
/// maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed experiment configuration: a top-level seed plus flat key/value
/// sections [model], [experiment], [output]. Values stay raw strings until a
/// command extracts them through SectionReader, which tracks consumption so
/// unknown keys are rejected.
struct Config {
  std::uint64_t seed = 0;
  bool seed_present = false;
  std::map<std::string, std::string> model;
  std::map<std::string, std::string> experiment;
  std::map<std::string, std::string> output;

  bool operator==(const Config&) const = default;
};

Config parse_config_text(const std::string& text);
Config parse_config_file(const std::string& path);

/// Renders a configuration that parse_config_text maps back to an equal
/// Config (the "effective config" echo).
std::string render_config(const Config& config);

/// Typed, consumption-tracked view of one section.
class SectionReader {
 public:
  SectionReader(const std::map<std::string, std::string>& section,
                std::string name);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key);
  std::string get_string(const std::string& key, const std::string& fallback);
  double get_double(const std::string& key);
  double get_double(const std::string& key, double fallback);
  long get_long(const std::string& key);
  long get_long(const std::string& key, long fallback);
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
  std::vector<double> get_double_list(const std::string& key);
  std::optional<double> get_optional_double(const std::string& key);
  std::optional<long> get_optional_long(const std::string& key);

  /// Throws ConfigError if any key was never consumed.
  void reject_unknown() const;

 private:
  const std::string& raw(const std::string& key);
  const std::map<std::string, std::string>& section_;
  std::string name_;
  std::set<std::string> consumed_;
};

}  // namespace cldp
