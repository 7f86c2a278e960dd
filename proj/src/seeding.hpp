// SPDX-License-Identifier: Apache-2.0
//
// Restart seeding shared by the alternating solvers.
#pragma once

#include <cstdint>
#include <cstring>
#include <random>

#include "hnet/coot.hpp"

namespace hnet::detail {


inline std::uint64_t fnv1a(std::uint64_t h, const double* data, Eigen::Index n) {
  for (Eigen::Index k = 0; k < n; ++k) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, data + k, sizeof(bits));
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xffu;
      h *= 0x100000001b3ull;
    }
  }
  return h;
}

inline std::uint64_t fingerprint(const Matrix& m) {
  const Matrix row_major_order = m.transpose();
  std::uint64_t h = 0xcbf29ce484222325ull ^ (static_cast<std::uint64_t>(m.rows()) << 32) ^
                    static_cast<std::uint64_t>(m.cols());
  return fnv1a(h, row_major_order.data(), row_major_order.size());
}

inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Order-independent combination, so (a, b) and (b, a) give the same key.
inline std::uint64_t pair_key(std::uint64_t a, std::uint64_t b) { return splitmix(a) + splitmix(b); }

// Random start for the coupling of (a, b), where ka and kb fingerprint each
// side (marginal and relation). The stream depends on the unordered pair of
// keys rather than on argument order, and the raw sample is drawn in a
// canonical orientation, so swapping the inputs or dualizing both
// hypernetworks reproduces the same start up to transposition.
inline Coupling seeded_start(const Vector& a, const Vector& b, std::uint64_t ka, std::uint64_t kb,
                             std::uint64_t seed, std::size_t restart) {
  std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(restart) ^ pair_key(ka, kb));
  if (ka <= kb) return random_coupling(a, b, rng);
  return random_coupling(b, a, rng).transpose();
}

inline std::uint64_t side_key(const Vector& m, const Matrix& w) {
  return splitmix(fingerprint(m)) ^ fingerprint(w);
}

}  // namespace hnet::detail
