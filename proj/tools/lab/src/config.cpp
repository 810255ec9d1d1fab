#include "kolmo/lab/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "kolmo/error.hpp"

namespace kolmo::lab {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  for (char c : key) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    if (!ok) return false;
  }
  return true;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, std::string_view want) {
  throw Error(Errc::kConfigError, "config key '" + key + "': expected " + std::string(want) + ", got '" + value + "'");
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc{} && ptr == end && !s.empty();
}

}  // namespace

std::vector<std::string> split_list(std::string_view text, char sep) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = text.find(sep, pos);
    out.emplace_back(trim(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

Config Config::parse(std::string_view text, std::string_view origin) {
  Config cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto where = std::string(origin) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(Errc::kConfigError, where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw Error(Errc::kConfigError, where + ": invalid key '" + key + "'");
    if (cfg.has(key)) throw Error(Errc::kConfigError, where + ": duplicate key '" + key + "'");
    cfg.values_[key] = std::string(trim(line.substr(eq + 1)));
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kConfigError, "cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

void Config::set(const std::string& key, const std::string& value) {
  if (!valid_key(key)) throw Error(Errc::kConfigError, "invalid key '" + key + "'");
  if (value.find_first_of("#\n") != std::string::npos)
    throw Error(Errc::kConfigError, "config key '" + key + "': value may not contain '#' or newlines");
  values_[key] = std::string(trim(value));
}

void Config::override_with(const Config& other, std::string_view origin) {
  for (const auto& [k, v] : other.values_) {
    if (!has(k)) throw Error(Errc::kConfigError, std::string(origin) + ": unknown key '" + k + "'");
    values_[k] = v;
  }
}

const std::string& Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(Errc::kConfigError, "missing config key '" + key + "'");
  return it->second;
}

double Config::real(const std::string& key) const {
  const auto& v = text(key);
  double out = 0;
  if (!parse_number(v, out)) bad_value(key, v, "a number");
  return out;
}

std::int64_t Config::integer(const std::string& key) const {
  const auto& v = text(key);
  std::int64_t out = 0;
  if (!parse_number(v, out)) bad_value(key, v, "an integer");
  return out;
}

std::uint64_t Config::unsigned_integer(const std::string& key) const {
  const auto& v = text(key);
  std::uint64_t out = 0;
  if (!parse_number(v, out)) bad_value(key, v, "a non-negative integer");
  return out;
}

bool Config::boolean(const std::string& key) const {
  const auto& v = text(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v, "a boolean");
}

std::vector<double> Config::reals(const std::string& key) const {
  const auto& v = text(key);
  std::vector<double> out;
  for (const auto& item : split_list(v)) {
    double d = 0;
    if (!parse_number(item, d)) bad_value(key, v, "a comma-separated list of numbers");
    out.push_back(d);
  }
  return out;
}

std::vector<int> Config::integers(const std::string& key) const {
  const auto& v = text(key);
  std::vector<int> out;
  for (const auto& item : split_list(v)) {
    int i = 0;
    if (!parse_number(item, i)) bad_value(key, v, "a comma-separated list of integers");
    out.push_back(i);
  }
  return out;
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace kolmo::lab
