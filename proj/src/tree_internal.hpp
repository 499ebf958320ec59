#pragma once

#include <span>

#include "hte/rng.hpp"
#include "hte/types.hpp"

namespace hte::detail {

struct SplitCandidate {
  bool found = false;
  Index feature = -1;
  double threshold = 0.0;
  double children_sse = 0.0;
};

struct TreeNode {
  Index feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;
  int left = -1;
  int right = -1;
};

struct Tree {
  std::vector<TreeNode> nodes;

  template <class Row>
  double predict_row(const Row& x) const {
    int at = 0;
    while (nodes[static_cast<std::size_t>(at)].feature >= 0) {
      const auto& node = nodes[static_cast<std::size_t>(at)];
      at = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes[static_cast<std::size_t>(at)].value;
  }

  Vector predict(const Matrix& X) const {
    Vector out(X.rows());
    for (Index i = 0; i < X.rows(); ++i) out[i] = predict_row(X.row(i));
    return out;
  }
};

/// Rows sorted lexicographically by (features..., y, w). Fitting over this
/// order makes every aggregate a function of the data multiset alone, so
/// predictions do not depend on the caller's row order.
IndexVector canonical_order(const Matrix& X, const Vector& y, const Vector& w,
                            std::span<const Index> rows);

double weighted_sse(const Vector& y, const Vector& w,
                    std::span<const Index> rows);

/// Exhaustive threshold scan over `features` (ascending), candidate
/// thresholds at midpoints between consecutive distinct values. Ties keep
/// the first strictly better candidate, i.e. lower feature index then
/// lower threshold. Children must each hold at least min_leaf rows.
SplitCandidate find_best_split(const Matrix& X, const Vector& y,
                               const Vector& w, std::span<const Index> rows,
                               std::span<const Index> features,
                               Index min_leaf);

struct CartControl {
  int max_depth = 6;
  Index min_leaf = 1;
  Index mtry = 0;   // 0 or >= d scans every feature
  Rng* rng = nullptr;  // required when 0 < mtry < d
};

/// Builds the regression tree over the given rows (leaf value = weighted
/// mean). Nodes are appended in depth-first preorder.
Tree build_cart(const Matrix& X, const Vector& y, const Vector& w,
                std::span<const Index> rows, const CartControl& control);

}  // namespace hte::detail
