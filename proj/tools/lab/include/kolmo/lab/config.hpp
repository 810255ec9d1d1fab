#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace kolmo::lab {

// Flat `key = value` configuration. Blank lines and text after '#' are
// ignored. Values are kept as text and converted on access; every
// conversion failure throws Error{kConfigError} naming the key.
class Config {
 public:
  static Config parse(std::string_view text, std::string_view origin = "<text>");
  static Config load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  // Copies every entry of `other` over this one. Keys not already present
  // are rejected, so a typo in a config file fails loudly.
  void override_with(const Config& other, std::string_view origin);

  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::uint64_t unsigned_integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  // Comma-separated lists; empty text gives an empty list.
  std::vector<double> reals(const std::string& key) const;
  std::vector<int> integers(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }

  // One `key = value` line per entry in key order; parse() reads it back.
  std::string serialize() const;

  friend bool operator==(const Config&, const Config&) = default;

 private:
  std::map<std::string, std::string> values_;
};

std::vector<std::string> split_list(std::string_view text, char sep = ',');

}  // namespace kolmo::lab
