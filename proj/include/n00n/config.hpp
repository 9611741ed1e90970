#pragma once

// Key-value configuration files.
//
//   # comment
//   rate          = 10000
//   offsets_deg   = 0, 90, 180, 270
//   hidden        = 20x10
//
// Keys are case-sensitive, values are trimmed; list values are comma separated.
// A key may appear once per file. Later overrides (command-line flags) go
// through set().

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace n00n {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text, const std::string& source = "<config>");
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, std::string value);
  bool has(const std::string& key) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

  std::optional<std::string> find(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::string> get_list(const std::string& key,
                                    const std::vector<std::string>& fallback) const;

  /// Render as "# key = value" lines, sorted by key, for CSV headers.
  std::string as_comment_block() const;

 private:
  std::map<std::string, std::string> entries_;
};

std::string trim(std::string_view s);
std::vector<std::string> split_list(std::string_view s, char sep = ',');
double parse_double(std::string_view s, const std::string& what);
std::int64_t parse_int(std::string_view s, const std::string& what);

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace n00n
