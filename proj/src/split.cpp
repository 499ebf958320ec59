#include "hte/split.hpp"

#include <algorithm>
#include <cmath>

#include "hte/errors.hpp"

namespace hte {

SplitIndices split_train_test(Index n, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw InvalidArgumentError("split: fraction must lie in (0, 1)");
  }
  if (n < 4) throw InvalidArgumentError("split: need n >= 4");

  Index n_train = static_cast<Index>(
      std::llround(fraction * static_cast<double>(n)));
  n_train = std::clamp<Index>(n_train, 1, n - 1);

  IndexVector order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  rng.shuffle(order);

  SplitIndices out;
  out.train.assign(order.begin(), order.begin() + n_train);
  out.test.assign(order.begin() + n_train, order.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

}  // namespace hte
