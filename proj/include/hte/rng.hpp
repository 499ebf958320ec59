#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hte/types.hpp"

namespace hte {

/// Deterministic random stream (xoshiro256++ seeded via splitmix64).
/// All distributions are implemented in-house so draws are identical
/// across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller; consumes two uniforms per draw.
  double normal();
  double normal(double mean, double sd);

  bool bernoulli(double p);

  /// Unbiased integer on [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// k distinct indices from [0, n), in draw order.
  IndexVector sample_without_replacement(Index n, Index k);

 private:
  std::uint64_t state_[4];
};

/// Hierarchical seed derivation: a node is addressed by the master seed
/// plus a path of (label, index) pairs. Distinct paths give independent
/// streams; the same path always reproduces the same stream.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t master_seed);

  SeedTree child(std::string_view label, std::uint64_t index = 0) const;

  /// Stream rooted at this node.
  Rng stream() const;

  std::uint64_t node_seed() const { return seed_; }
  std::uint64_t master_seed() const { return master_; }
  const std::string& path() const { return path_; }

 private:
  SeedTree(std::uint64_t master, std::uint64_t seed, std::string path);

  std::uint64_t master_ = 0;
  std::uint64_t seed_ = 0;
  std::string path_;
};

/// Convenience form of SeedTree::child(...).stream().
Rng derive_stream(const SeedTree& tree, std::string_view label,
                  std::uint64_t index = 0);

}  // namespace hte
