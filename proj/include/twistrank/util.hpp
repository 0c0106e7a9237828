#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

namespace twistrank {

/// 64-bit FNV-1a; stable across platforms and runs, unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

/// Bumped whenever a change could alter computed records.
inline constexpr std::string_view kCodeVersion = "twistrank-1.0";

}  // namespace twistrank
