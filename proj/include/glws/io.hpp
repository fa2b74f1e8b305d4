#pragma once

#include <charconv>
#include <cstdint>
#include <string>

namespace glws {

/// Shortest round-trip decimal form; stable across runs so CSV output is
/// byte-reproducible.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// FNV-1a, used to key ground-truth caches by parameter content.
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace glws
