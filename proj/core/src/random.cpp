#include "swapregret/random.hpp"

#include <cmath>

#include "swapregret/errors.hpp"

namespace swapregret {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

Rng make_rng(std::uint64_t seed, std::string_view label) {
  return Rng(splitmix64(seed ^ fnv1a64(label)));
}

double next_double(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double next_double(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * next_double(rng);
}

bool next_bernoulli(Rng& rng, double p) {
  return next_double(rng) < p;
}

int next_index(Rng& rng, int n) {
  if (n <= 0) throw ParameterError("next_index: n must be positive");
  // Rejection-free would bias for huge n; n here is always tiny.
  return static_cast<int>(next_double(rng) * n) % n;
}

int sample_categorical(Rng& rng, std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw ParameterError("sample_categorical: weights must be finite and nonnegative");
    }
    total += w;
  }
  if (total <= 0.0) throw ParameterError("sample_categorical: total weight is zero");
  double u = next_double(rng) * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size() - 1);
}

}  // namespace swapregret
