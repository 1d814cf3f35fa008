// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vqebo {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

/// Splits "k1=v1,k2=v2" into ordered pairs. Empty items are skipped.
inline std::vector<std::pair<std::string, std::string>> parse_options(std::string_view text, char item_sep,
                                                                      char kv_sep) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(item_sep, pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string item = trim(text.substr(pos, end - pos));
    if (!item.empty()) {
      const auto eq = item.find(kv_sep);
      if (eq == std::string::npos) throw std::invalid_argument("option '" + item + "' is not key" + kv_sep + "value");
      out.emplace_back(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
    }
    pos = end + 1;
  }
  return out;
}

inline double parse_double(std::string_view s, std::string_view what = "value") {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw std::invalid_argument(std::string(what) + ": not a number: '" + t + "'");
  return v;
}

inline long parse_int(std::string_view s, std::string_view what = "value") {
  const std::string t = trim(s);
  long v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty())
    throw std::invalid_argument(std::string(what) + ": not an integer: '" + t + "'");
  return v;
}

inline bool parse_bool(std::string_view s, std::string_view what = "value") {
  const std::string t = trim(s);
  if (t == "True" || t == "true" || t == "1" || t == "yes") return true;
  if (t == "False" || t == "false" || t == "0" || t == "no") return false;
  throw std::invalid_argument(std::string(what) + ": not a boolean: '" + t + "'");
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, p);
}

/// "(-1.0, 0.0, 0.0)" or "-1,0,0".
inline std::array<double, 3> parse_triple(std::string_view s) {
  std::string t = trim(s);
  if (!t.empty() && (t.front() == '(' || t.front() == '[')) t = t.substr(1);
  if (!t.empty() && (t.back() == ')' || t.back() == ']')) t.pop_back();
  std::array<double, 3> out{};
  std::size_t pos = 0;
  for (int k = 0; k < 3; ++k) {
    auto end = t.find(',', pos);
    if (k < 2 && end == std::string::npos) throw std::invalid_argument("expected three comma-separated reals: " + t);
    if (k == 2) {
      if (end != std::string::npos) throw std::invalid_argument("expected exactly three reals: " + t);
      end = t.size();
    }
    out[static_cast<std::size_t>(k)] = parse_double(t.substr(pos, end - pos), "coupling");
    pos = end + 1;
  }
  return out;
}

inline std::string format_triple(const std::array<double, 3>& v) {
  return "(" + format_double(v[0]) + ", " + format_double(v[1]) + ", " + format_double(v[2]) + ")";
}

}  // namespace vqebo
