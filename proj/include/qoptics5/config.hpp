#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qoptics5 {

/// Invalid configuration. Kept apart from qoptics5::Error so the CLI can map it to exit 1.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : std::runtime_error(key.empty() ? what : "config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ValueKind { real, positive_real, integer, positive_integer, text, real_list, int_list };

struct KeySpec {
  std::string key;  ///< "section.name"
  ValueKind kind;
  std::string default_value;
  std::vector<std::string> choices;  ///< allowed values for text keys; empty means free
  std::string help;
};

/// INI-style key = value configuration validated against a fixed schema. Sections listed
/// as passive (for example a manifest block) are accepted and ignored.
class Config {
 public:
  Config(std::vector<KeySpec> schema, std::vector<std::string> passive_sections = {});

  /// Parses text; unknown sections or keys and malformed values throw ConfigError.
  void parse(const std::string& text, const std::string& origin = "<config>");
  void parse_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  std::vector<double> real_list(const std::string& key) const;
  std::vector<long> int_list(const std::string& key) const;

  /// Effective configuration, every key with its value, grouped by section in schema order.
  std::string to_ini() const;
  const std::vector<KeySpec>& schema() const { return schema_; }

 private:
  const KeySpec& spec(const std::string& key) const;
  void validate(const KeySpec& s, const std::string& value) const;

  std::vector<KeySpec> schema_;
  std::vector<std::string> passive_;
  std::map<std::string, std::string> values_;
};

}  // namespace qoptics5
