#include "gcnsamp/config.hpp"

#include <charconv>
#include <istream>
#include <sstream>

#include "gcnsamp/csv.hpp"

namespace gcnsamp {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

Index parse_int(const std::string& text) {
  Index v = 0;
  const std::string t = trim(text);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw ConfigError("not an integer: '" + text + "'");
  return v;
}

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (cfg.values_.count(key)) throw ConfigError("config: duplicate key '" + key + "'");
    cfg.values_[key] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string KeyValueConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config: missing key '" + key + "'");
  used_.insert(key);
  return it->second;
}

std::string KeyValueConfig::get(const std::string& key, const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_double(get(key));
  } catch (const ConfigError&) {
    throw ConfigError("config: key '" + key + "' is not a number");
  }
}

Index KeyValueConfig::get_int(const std::string& key, Index fallback) const {
  if (!has(key)) return fallback;
  try {
    return parse_int(get(key));
  } catch (const ConfigError&) {
    throw ConfigError("config: key '" + key + "' is not an integer");
  }
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config: key '" + key + "' is not a boolean");
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key) const {
  if (!has(key)) return {};
  const std::string v = get(key);
  if (v.empty()) return {};
  return split(v, ',');
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key, std::vector<double> fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const auto& s : get_list(key)) out.push_back(parse_double(s));
  return out;
}

std::vector<Index> KeyValueConfig::get_ints(const std::string& key, std::vector<Index> fallback) const {
  if (!has(key)) return fallback;
  std::vector<Index> out;
  for (const auto& s : get_list(key)) out.push_back(parse_int(s));
  return out;
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { values_[key] = trim(value); }

std::vector<std::string> KeyValueConfig::unused_keys() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : values_)
    if (!used_.count(k)) out.push_back(k);
  return out;
}

}  // namespace gcnsamp
