#pragma once

#include "hte/rng.hpp"
#include "hte/types.hpp"

namespace hte {

/// Disjoint train/test partition of 0..n-1; both parts sorted ascending.
struct SplitIndices {
  IndexVector train;
  IndexVector test;
};

/// Uniform random partition with |train| = round(fraction * n), clamped so
/// neither side is empty. Requires n >= 4 and fraction in (0, 1).
SplitIndices split_train_test(Index n, double fraction, Rng& rng);

}  // namespace hte
