#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace riskev {

// FNV-1a. Used for fingerprints and feature hashing where the value must be
// stable across platforms and standard library implementations.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

}  // namespace riskev
