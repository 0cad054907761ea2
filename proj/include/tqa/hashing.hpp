#pragma once

#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <string_view>

namespace tqa {

// FNV-1a. Cache keys have to be stable across platforms and processes, which
// rules out std::hash.
constexpr std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ull;
  for (char c : data) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buf, 16);
}

// Parts are joined with a unit separator before hashing so ("ab","c") and
// ("a","bc") key differently.
inline std::string content_key(std::initializer_list<std::string_view> parts) {
  std::string joined;
  for (auto part : parts) {
    if (!joined.empty()) joined.push_back('\x1f');
    joined.append(part);
  }
  return hex64(fnv1a64(joined));
}

}  // namespace tqa
