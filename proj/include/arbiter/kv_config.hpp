#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace arbiter {

// Flat `key = value` configuration. `#` starts a comment, values may be
// double-quoted, `[section]` headers prefix later keys with "section.".
class KvConfig {
 public:
  static KvConfig parse(std::string_view text);
  static KvConfig load(const std::filesystem::path& path);

  bool contains(const std::string& key) const { return values_.contains(key); }
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  // Comma-separated, trimmed, empty items dropped. Accepts a bracketed list.
  std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;

  // Throws ValidationError for keys outside `known`.
  void reject_unknown(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace arbiter
