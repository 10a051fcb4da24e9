#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace framecast {

// FNV-1a, 64 bit. Used for stable name-derived RNG streams and for
// fingerprinting files in run manifests. Not cryptographic.
constexpr uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr uint64_t fnv1a64(const void* data, size_t n, uint64_t h = kFnvOffset) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
  return h;
}

constexpr uint64_t fnv1a64(std::string_view s, uint64_t h = kFnvOffset) {
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= kFnvPrime;
  }
  return h;
}

// splitmix64 finalizer; decorrelates nearby integer seeds.
constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t combine_seed(uint64_t seed, std::string_view name) {
  return mix64(seed ^ fnv1a64(name));
}

constexpr uint64_t combine_seed(uint64_t seed, uint64_t salt) {
  return mix64(seed ^ mix64(salt));
}

std::string hex64(uint64_t v);

// Streaming hash of a file's bytes. Throws IoError if unreadable.
uint64_t hash_file(const std::string& path);

}  // namespace framecast
