#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace varicart {

// A small TOML subset: `key = value` lines, `# comments`, `[section]`
// headers (keys become "section.key"), double-quoted strings, bare
// numbers/booleans/words and single-line `[a, b, c]` arrays.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  // Entries of `other` replace ours.
  void merge(const KeyValueConfig& other);

  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<std::int64_t> get_int(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;
  std::optional<std::vector<std::string>> get_list(const std::string& key) const;
  std::optional<std::vector<std::int64_t>> get_int_list(const std::string& key) const;

  // Keys (optionally under `prefix`) never read through a getter.
  std::vector<std::string> unused_keys(const std::string& prefix = "") const;

  const std::map<std::string, std::string>& raw() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> used_;
};

}  // namespace varicart
