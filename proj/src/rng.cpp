#include "evsched/rng.hpp"

#include <cmath>
#include <numbers>

namespace evsched {

std::uint64_t hash_name(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view name,
                          std::initializer_list<std::uint64_t> indices) {
  std::uint64_t s = mix64(parent ^ mix64(hash_name(name)));
  for (std::uint64_t i : indices) s = mix64(s ^ mix64(i + 0x632be59bd9b4e019ULL));
  return s;
}

double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

int poisson(Rng& rng, double mean) {
  if (!(mean > 0.0)) return 0;
  int total = 0;
  // Knuth's product method in chunks of mean <= 30 keeps exp(-mean) well
  // away from underflow.
  while (mean > 0.0) {
    const double chunk = mean > 30.0 ? 30.0 : mean;
    mean -= chunk;
    const double limit = std::exp(-chunk);
    double p = uniform01(rng);
    int k = 0;
    while (p > limit) {
      ++k;
      p *= uniform01(rng);
    }
    total += k;
  }
  return total;
}

double exponential(Rng& rng, double mean) {
  const double u = uniform01(rng);
  return -mean * std::log1p(-u);
}

}  // namespace evsched
