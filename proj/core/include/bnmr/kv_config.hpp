#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bnmr {

/// Flat `section.key=value` text configuration. Blank lines and lines
/// starting with '#' are ignored. Every accessor error names the source and
/// line of the offending entry.
class KvConfig {
 public:
  KvConfig() = default;

  static KvConfig parse(const std::string& text, const std::string& source = "<string>");
  static KvConfig load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  const std::string& source() const { return source_; }
  /// Directory relative paths in the file are resolved against.
  const std::filesystem::path& base_dir() const { return base_dir_; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::string> get_list(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::filesystem::path get_path(const std::string& key) const;

  /// Keys that start with `prefix`, in file order.
  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
  std::vector<std::string> keys() const;

  /// Throws ConfigError for any key not in `known` and not matching one of
  /// the `known_prefixes`.
  void reject_unknown(const std::set<std::string>& known,
                      const std::vector<std::string>& known_prefixes = {}) const;

  void set(const std::string& key, const std::string& value);

 private:
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string where(const std::string& key) const;
  const Entry& entry(const std::string& key) const;

  std::string source_ = "<string>";
  std::filesystem::path base_dir_;
  std::map<std::string, Entry> entries_;
  std::vector<std::string> order_;
};

}  // namespace bnmr
