#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace evsched {

using Rng = std::mt19937_64;

/// FNV-1a over the bytes of `name`; stable across platforms and runs.
std::uint64_t hash_name(std::string_view name);

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Derives a child seed from a parent seed, a stream name and indices.
/// Streams with different names or indices are statistically independent,
/// and adding a new consumer never perturbs an existing one.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view name,
                          std::initializer_list<std::uint64_t> indices = {});

inline Rng make_stream(std::uint64_t parent, std::string_view name,
                       std::initializer_list<std::uint64_t> indices = {}) {
  return Rng(derive_seed(parent, name, indices));
}

/// Standard normal variate from two uniform draws (Box-Muller, cosine branch).
/// Written out instead of std::normal_distribution so the stream of values
/// is identical across standard library implementations.
double standard_normal(Rng& rng);

/// Uniform double in [0, 1) with 53 random bits.
double uniform01(Rng& rng);

/// Poisson variate (Knuth's product method, applied in chunks of mean <= 30
/// and summed, which is exact by additivity of independent Poissons).
int poisson(Rng& rng, double mean);

/// Exponential variate with the given mean.
double exponential(Rng& rng, double mean);

}  // namespace evsched
