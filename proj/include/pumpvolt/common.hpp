#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace pumpvolt {

// Phases are indexed 0,1,2 for a,b,c throughout.
constexpr int kNumPhases = 3;

inline char phase_name(int phase) { return static_cast<char>('a' + phase); }

inline int phase_from_name(char c) {
  if (c < 'a' || c > 'c') throw std::invalid_argument("unknown phase: " + std::string(1, c));
  return c - 'a';
}

using PhaseSet = std::array<bool, kNumPhases>;

inline PhaseSet phase_set_from_string(const std::string& s) {
  PhaseSet set{false, false, false};
  for (char c : s) set[phase_from_name(c)] = true;
  return set;
}

inline std::string phase_set_to_string(const PhaseSet& set) {
  std::string s;
  for (int p = 0; p < kNumPhases; ++p)
    if (set[p]) s.push_back(phase_name(p));
  return s;
}

// Thrown on malformed input files and inconsistent instance data.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when argument shapes do not match the model they are applied to.
class DimensionError : public std::runtime_error {
 public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic sub-stream seed used by chunked sampling and evaluation.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 1));
}

inline std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t hash = 0xcbf29ce484222325ULL) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

inline std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

}  // namespace pumpvolt
