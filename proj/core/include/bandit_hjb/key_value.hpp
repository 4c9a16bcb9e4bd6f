#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bhjb {

/// Flat key=value text files: one `key = value` per line, `#` starts a comment,
/// blank lines ignored. The on-disk format for environment, prior and limit
/// model specs.
class KeyValueMap {
public:
  static KeyValueMap parse_file(const std::string& path);
  static KeyValueMap parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;

  std::string get_string_or(const std::string& key, const std::string& fallback) const;
  double get_double_or(const std::string& key, double fallback) const;
  long long get_int_or(const std::string& key, long long fallback) const;

  /// Comma-separated list of reals.
  std::vector<double> get_double_list(const std::string& key) const;

  std::vector<std::string> keys_with_prefix(const std::string& prefix) const;

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }

  const std::string& origin() const { return origin_; }

private:
  std::map<std::string, std::string> entries_;
  std::string origin_;
};

}  // namespace bhjb
