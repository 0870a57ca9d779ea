#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace swapregret {

using Rng = std::mt19937_64;

// 64-bit FNV-1a; used to derive per-component seeds from string labels.
std::uint64_t fnv1a64(std::string_view s);

std::uint64_t splitmix64(std::uint64_t x);

// Expands one global seed into an independent stream per label, so adding a
// consumer never perturbs existing ones.
Rng make_rng(std::uint64_t seed, std::string_view label);

// Uniform double in [0, 1) with 53 random bits. Unlike the std distributions,
// the mapping from engine output is pinned here, so streams are reproducible
// across standard libraries.
double next_double(Rng& rng);

// Uniform double in [lo, hi).
double next_double(Rng& rng, double lo, double hi);

bool next_bernoulli(Rng& rng, double p);

// Uniform integer in [0, n).
int next_index(Rng& rng, int n);

// Samples an index from an (unnormalized, nonnegative) weight vector.
int sample_categorical(Rng& rng, std::span<const double> weights);

}  // namespace swapregret
