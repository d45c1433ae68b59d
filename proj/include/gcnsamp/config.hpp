#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "gcnsamp/common.hpp"

namespace gcnsamp {

/// Flat "key = value" document. '#' starts a comment; blank lines are
/// ignored; keys are unique. Accessors record which keys were read so that
/// unknown keys can be reported.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  Index get_int(const std::string& key, Index fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated list; empty when the key is absent.
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<double> get_doubles(const std::string& key, std::vector<double> fallback) const;
  std::vector<Index> get_ints(const std::string& key, std::vector<Index> fallback) const;

  void set(const std::string& key, const std::string& value);
  // Keys present in the document that no accessor asked for.
  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

std::string trim(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);
Index parse_int(const std::string& text);

}  // namespace gcnsamp
