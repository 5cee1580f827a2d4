#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace steinlab {

inline constexpr std::uint64_t kDefaultSeed = 20240817u;

// Thin wrapper over mt19937_64 with the distributions used across the
// Monte Carlo layer. Sampling is single-threaded and sequenced, so a fixed
// seed gives byte-identical runs on a given standard library.
struct Rng {
  std::mt19937_64 gen;

  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(gen);
  }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  double gamma(double shape) {
    return std::gamma_distribution<double>(shape, 1.0)(gen);
  }
  double exponential() { return std::exponential_distribution<double>(1.0)(gen); }

  // Derive an independent stream deterministically from this seed.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
};

// Seed resolution order: explicit value, then STEINLAB_SEED env var, then the
// built-in default.
std::uint64_t resolve_seed(std::optional<std::uint64_t> explicit_seed);

}  // namespace steinlab
