#include "qoptics5/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace qoptics5 {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = first + s.size();
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && p == last;
}

bool parse_long(const std::string& s, long& out) {
  const char* first = s.data();
  const char* last = first + s.size();
  auto [p, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && p == last;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

Config::Config(std::vector<KeySpec> schema, std::vector<std::string> passive)
    : schema_(std::move(schema)), passive_(std::move(passive)) {
  for (const auto& s : schema_) {
    validate(s, s.default_value);
    values_[s.key] = s.default_value;
  }
}

const KeySpec& Config::spec(const std::string& key) const {
  for (const auto& s : schema_)
    if (s.key == key) return s;
  throw ConfigError(key, "unknown key");
}

void Config::validate(const KeySpec& s, const std::string& v) const {
  double d = 0.0;
  long l = 0;
  switch (s.kind) {
    case ValueKind::real:
      if (!parse_double(v, d)) throw ConfigError(s.key, "expected a number, got '" + v + "'");
      break;
    case ValueKind::positive_real:
      if (!parse_double(v, d) || !(d > 0.0)) throw ConfigError(s.key, "expected a positive number, got '" + v + "'");
      break;
    case ValueKind::integer:
      if (!parse_long(v, l)) throw ConfigError(s.key, "expected an integer, got '" + v + "'");
      break;
    case ValueKind::positive_integer:
      if (!parse_long(v, l) || l <= 0) throw ConfigError(s.key, "expected a positive integer, got '" + v + "'");
      break;
    case ValueKind::text:
      if (!s.choices.empty() && std::find(s.choices.begin(), s.choices.end(), v) == s.choices.end()) {
        std::string all;
        for (const auto& c : s.choices) all += (all.empty() ? "" : "|") + c;
        throw ConfigError(s.key, "expected one of " + all + ", got '" + v + "'");
      }
      break;
    case ValueKind::real_list:
      for (const auto& item : split_list(v))
        if (!parse_double(item, d)) throw ConfigError(s.key, "bad list entry '" + item + "'");
      break;
    case ValueKind::int_list:
      for (const auto& item : split_list(v))
        if (!parse_long(item, l)) throw ConfigError(s.key, "bad list entry '" + item + "'");
      break;
  }
}

void Config::set(const std::string& key, const std::string& value) {
  const auto& s = spec(key);
  validate(s, value);
  values_[key] = value;
}

void Config::parse(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line, section;
  bool passive = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("", origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      passive = std::find(passive_.begin(), passive_.end(), section) != passive_.end();
      if (!passive) {
        const bool known = std::any_of(schema_.begin(), schema_.end(), [&](const KeySpec& s) {
          return s.key.rfind(section + ".", 0) == 0;
        });
        if (!known) throw ConfigError(section, "unknown section");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", origin + ":" + std::to_string(lineno) + ": expected key = value");
    if (passive) continue;
    const std::string key = trim(t.substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    set(full, trim(t.substr(eq + 1)));
  }
}

void Config::parse_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("", "cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  parse(ss.str(), path);
}

double Config::real(const std::string& key) const {
  const auto& s = spec(key);
  double d = 0.0;
  if (!parse_double(values_.at(s.key), d)) throw ConfigError(key, "not a number");
  return d;
}

long Config::integer(const std::string& key) const {
  const auto& s = spec(key);
  long l = 0;
  if (!parse_long(values_.at(s.key), l)) throw ConfigError(key, "not an integer");
  return l;
}

const std::string& Config::text(const std::string& key) const { return values_.at(spec(key).key); }

std::vector<double> Config::real_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(values_.at(spec(key).key))) {
    double d = 0.0;
    parse_double(item, d);
    out.push_back(d);
  }
  return out;
}

std::vector<long> Config::int_list(const std::string& key) const {
  std::vector<long> out;
  for (const auto& item : split_list(values_.at(spec(key).key))) {
    long l = 0;
    parse_long(item, l);
    out.push_back(l);
  }
  return out;
}

std::string Config::to_ini() const {
  std::ostringstream os;
  std::string current;
  for (const auto& s : schema_) {
    const auto dot = s.key.find('.');
    const std::string sec = s.key.substr(0, dot);
    if (sec != current) {
      if (!current.empty()) os << '\n';
      os << '[' << sec << "]\n";
      current = sec;
    }
    os << s.key.substr(dot + 1) << " = " << values_.at(s.key) << '\n';
  }
  return os.str();
}

}  // namespace qoptics5
