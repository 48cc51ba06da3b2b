#pragma once

// Unit conversion at the configuration boundary. Internally storage is held
// in bytes and rates in bits/second. Storage prefixes are decimal (SI):
// 1 MB = 1e6 bytes, 1 TB = 1e12 bytes.

#include <cctype>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vcache::units {

inline constexpr double kB = 1e3;
inline constexpr double MB = 1e6;
inline constexpr double GB = 1e9;
inline constexpr double TB = 1e12;

inline constexpr double Kbps = 1e3;
inline constexpr double Mbps = 1e6;
inline constexpr double Gbps = 1e9;

namespace detail {

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Splits "1.2TB" into (1.2, "tb"). Returns nullopt when no number leads.
inline std::optional<std::pair<double, std::string>> split_quantity(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  std::size_t start = 0;
  while (start < s.size() && std::isspace(static_cast<unsigned char>(s[start]))) ++start;
  const char* begin = s.c_str() + start;
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin) return std::nullopt;
  std::string suffix(end);
  std::size_t k = 0;
  while (k < suffix.size() && std::isspace(static_cast<unsigned char>(suffix[k]))) ++k;
  return std::make_pair(value, lower(suffix.substr(k)));
}

}  // namespace detail

// Parses a storage quantity ("20MB", "1.2TB", "512") into bytes.
inline double parse_bytes(std::string_view text) {
  auto q = detail::split_quantity(text);
  if (!q) throw std::invalid_argument("not a storage quantity: '" + std::string(text) + "'");
  const auto& [v, u] = *q;
  if (u.empty() || u == "b") return v;
  if (u == "kb") return v * kB;
  if (u == "mb") return v * MB;
  if (u == "gb") return v * GB;
  if (u == "tb") return v * TB;
  throw std::invalid_argument("unknown storage unit '" + u + "' in '" + std::string(text) + "'");
}

// Parses a rate quantity ("128Kbps", "10Gbps", "1e9") into bits/second.
inline double parse_bps(std::string_view text) {
  auto q = detail::split_quantity(text);
  if (!q) throw std::invalid_argument("not a rate quantity: '" + std::string(text) + "'");
  const auto& [v, u] = *q;
  if (u.empty() || u == "bps") return v;
  if (u == "kbps") return v * Kbps;
  if (u == "mbps") return v * Mbps;
  if (u == "gbps") return v * Gbps;
  throw std::invalid_argument("unknown rate unit '" + u + "' in '" + std::string(text) + "'");
}

}  // namespace vcache::units
