#include "cldp/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace cldp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Strips a trailing comment ('#' outside double quotes).
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
    return v.substr(1, v.size() - 2);
  return v;
}

bool needs_quotes(const std::string& v) {
  return v.empty() || v.find_first_of(" \t#\"") != std::string::npos;
}

}  // namespace

Config parse_config_text(const std::string& text) {
  Config config;
  std::map<std::string, std::string>* section = nullptr;
  std::string section_name = "(top level)";
  std::istringstream in(text);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(line_no) +
                          ": malformed section header");
      section_name = trim(line.substr(1, line.size() - 2));
      if (section_name == "model")
        section = &config.model;
      else if (section_name == "experiment")
        section = &config.experiment;
      else if (section_name == "output")
        section = &config.output;
      else
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unknown section [" + section_name + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty())
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!section) {
      if (key != "seed")
        throw ConfigError("line " + std::to_string(line_no) + ": key '" + key +
                          "' outside any section (only 'seed' may be top level)");
      errno = 0;
      char* end = nullptr;
      const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
      if (errno != 0 || end == value.c_str() || *end != '\0' ||
          value.find('-') != std::string::npos)
        throw ConfigError("seed: expected an unsigned 64-bit integer");
      if (config.seed_present) throw ConfigError("seed: duplicate key");
      config.seed = v;
      config.seed_present = true;
      continue;
    }
    if (!section->emplace(key, value).second)
      throw ConfigError("duplicate key '" + key + "' in [" + section_name +
                        "]");
  }
  return config;
}

Config parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string render_config(const Config& config) {
  std::ostringstream out;
  if (config.seed_present) out << "seed = " << config.seed << "\n\n";
  const auto emit = [&](const char* name,
                        const std::map<std::string, std::string>& section) {
    out << '[' << name << "]\n";
    for (const auto& [key, value] : section) {
      out << key << " = ";
      if (needs_quotes(value))
        out << '"' << value << '"';
      else
        out << value;
      out << '\n';
    }
    out << '\n';
  };
  emit("model", config.model);
  emit("experiment", config.experiment);
  emit("output", config.output);
  return out.str();
}

SectionReader::SectionReader(const std::map<std::string, std::string>& section,
                             std::string name)
    : section_(section), name_(std::move(name)) {}

bool SectionReader::has(const std::string& key) const {
  return section_.count(key) != 0;
}

const std::string& SectionReader::raw(const std::string& key) {
  const auto it = section_.find(key);
  if (it == section_.end())
    throw ConfigError("[" + name_ + "]: missing required key '" + key + "'");
  consumed_.insert(key);
  return it->second;
}

std::string SectionReader::get_string(const std::string& key) {
  return raw(key);
}

std::string SectionReader::get_string(const std::string& key,
                                      const std::string& fallback) {
  return has(key) ? raw(key) : fallback;
}

double SectionReader::get_double(const std::string& key) {
  const std::string& v = raw(key);
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(v.c_str(), &end);
  if (errno != 0 || end == v.c_str() || *end != '\0')
    throw ConfigError("[" + name_ + "]: key '" + key + "' is not a number");
  return x;
}

double SectionReader::get_double(const std::string& key, double fallback) {
  return has(key) ? get_double(key) : fallback;
}

long SectionReader::get_long(const std::string& key) {
  const double x = get_double(key);
  const long v = static_cast<long>(x);
  if (static_cast<double>(v) != x)
    throw ConfigError("[" + name_ + "]: key '" + key + "' must be an integer");
  return v;
}

long SectionReader::get_long(const std::string& key, long fallback) {
  return has(key) ? get_long(key) : fallback;
}

std::uint64_t SectionReader::get_u64(const std::string& key,
                                     std::uint64_t fallback) {
  if (!has(key)) return fallback;
  const std::string& v = raw(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (errno != 0 || end == v.c_str() || *end != '\0' ||
      v.find('-') != std::string::npos)
    throw ConfigError("[" + name_ + "]: key '" + key +
                      "' is not an unsigned integer");
  return x;
}

std::vector<double> SectionReader::get_double_list(const std::string& key) {
  const std::string v = raw(key);
  std::vector<double> out;
  std::string token;
  std::istringstream in(v);
  while (std::getline(in, token, ',')) {
    token = trim(token);
    if (token.empty())
      throw ConfigError("[" + name_ + "]: key '" + key +
                        "' has an empty list entry");
    char* end = nullptr;
    errno = 0;
    const double x = std::strtod(token.c_str(), &end);
    if (errno != 0 || end == token.c_str() || *end != '\0')
      throw ConfigError("[" + name_ + "]: key '" + key +
                        "' has a non-numeric entry '" + token + "'");
    out.push_back(x);
  }
  if (out.empty())
    throw ConfigError("[" + name_ + "]: key '" + key + "' is an empty list");
  return out;
}

std::optional<double> SectionReader::get_optional_double(
    const std::string& key) {
  if (!has(key)) return std::nullopt;
  return get_double(key);
}

std::optional<long> SectionReader::get_optional_long(const std::string& key) {
  if (!has(key)) return std::nullopt;
  return get_long(key);
}

void SectionReader::reject_unknown() const {
  for (const auto& [key, value] : section_)
    if (!consumed_.count(key))
      throw ConfigError("[" + name_ + "]: unknown key '" + key + "'");
}

}  // namespace cldp
