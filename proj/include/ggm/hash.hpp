#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <string>
#include <string_view>

namespace ggm {

/// 64-bit FNV-1a. Used for config hashes and model fingerprints in run
/// manifests, not for anything security related.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL) noexcept {
  for (const char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::uint64_t fnv1a64(const double* values, std::size_t count, std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (std::size_t k = 0; k < count; ++k) {
    char raw[sizeof(double)];
    std::memcpy(raw, &values[k], sizeof(double));
    hash = fnv1a64(std::string_view(raw, sizeof(double)), hash);
  }
  return hash;
}

inline std::string hex64(std::uint64_t value) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

}  // namespace ggm
