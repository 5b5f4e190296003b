#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace mcb {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a; used only to turn stream names into stream ids.
inline constexpr std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

// Independent named stream derived from a master seed.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) {
  return mix(master, hash_name(stream));
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix(master, index);
}

inline double to_unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

// Stateless draws keyed by (stream, counter). Nature's draws use these so that
// the value at step t never depends on how many draws the agent made.
class CounterStream {
 public:
  explicit CounterStream(std::uint64_t stream_seed = 0) : seed_(stream_seed) {}

  std::uint64_t bits(std::uint64_t t, std::uint64_t j = 0) const { return mix(mix(seed_, t), j); }
  double uniform(std::uint64_t t, std::uint64_t j = 0) const { return to_unit(bits(t, j)); }
  std::uint64_t below(std::uint64_t t, std::uint64_t n, std::uint64_t j = 0) const {
    return static_cast<std::uint64_t>(uniform(t, j) * static_cast<double>(n)) % n;
  }
  // Standard normal via Box-Muller on draws (t, 2j) and (t, 2j+1).
  double normal(std::uint64_t t, std::uint64_t j = 0) const {
    double u1 = uniform(t, 2 * j);
    const double u2 = uniform(t, 2 * j + 1);
    if (u1 <= 0.0) u1 = 0x1.0p-60;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::uint64_t seed_;
};

// Sequential generator for everything that is not nature's per-step draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform() { return to_unit(engine_()); }
  std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n; }
  double normal() { return normal_(engine_); }
  bool bernoulli(double p) { return uniform() < p; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace mcb
