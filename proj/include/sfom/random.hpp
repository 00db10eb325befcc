#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sfom::random {

// rejection-free within one draw is impossible for arbitrary bounds; this is the
// standard rejection loop, but pinned here so results do not depend on the stdlib's
// uniform_int_distribution (whose output is implementation-defined).
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

// k distinct values from [0, n), partial Fisher-Yates, deterministic given seed
inline std::vector<int> sample_without_replacement(int n, int k, std::uint64_t seed) {
  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  std::mt19937_64 rng(seed);
  std::vector<int> out(k);
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
    out[i] = pool[i];
  }
  return out;
}

}  // namespace sfom::random
