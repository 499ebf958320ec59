#include <algorithm>
#include <cmath>

#include "hte/errors.hpp"
#include "hte/learners.hpp"
#include "tree_internal.hpp"

namespace hte {
namespace detail {

IndexVector canonical_order(const Matrix& X, const Vector& y, const Vector& w,
                            std::span<const Index> rows) {
  IndexVector order(rows.begin(), rows.end());
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    for (Index j = 0; j < X.cols(); ++j) {
      if (X(a, j) != X(b, j)) return X(a, j) < X(b, j);
    }
    if (y[a] != y[b]) return y[a] < y[b];
    return w[a] < w[b];
  });
  return order;
}

double weighted_sse(const Vector& y, const Vector& w,
                    std::span<const Index> rows) {
  double sw = 0.0, swy = 0.0, swyy = 0.0;
  for (const Index i : rows) {
    sw += w[i];
    swy += w[i] * y[i];
    swyy += w[i] * y[i] * y[i];
  }
  if (sw <= 0.0) return 0.0;
  return std::max(0.0, swyy - swy * swy / sw);
}

SplitCandidate find_best_split(const Matrix& X, const Vector& y,
                               const Vector& w, std::span<const Index> rows,
                               std::span<const Index> features,
                               Index min_leaf) {
  SplitCandidate best;
  const Index m = static_cast<Index>(rows.size());
  if (m < 2 * min_leaf) return best;

  double total_w = 0.0, total_wy = 0.0, total_wyy = 0.0;
  for (const Index i : rows) {
    total_w += w[i];
    total_wy += w[i] * y[i];
    total_wyy += w[i] * y[i] * y[i];
  }

  IndexVector sorted(rows.begin(), rows.end());
  for (const Index feature : features) {
    std::stable_sort(sorted.begin(), sorted.end(), [&](Index a, Index b) {
      return X(a, feature) < X(b, feature);
    });
    double left_w = 0.0, left_wy = 0.0, left_wyy = 0.0;
    for (Index pos = 0; pos + 1 < m; ++pos) {
      const Index row = sorted[static_cast<std::size_t>(pos)];
      left_w += w[row];
      left_wy += w[row] * y[row];
      left_wyy += w[row] * y[row] * y[row];
      const double v = X(row, feature);
      const double next = X(sorted[static_cast<std::size_t>(pos + 1)], feature);
      if (v == next) continue;
      const Index left_count = pos + 1;
      if (left_count < min_leaf || m - left_count < min_leaf) continue;
      const double right_w = total_w - left_w;
      if (left_w <= 0.0 || right_w <= 0.0) continue;
      const double left_sse =
          std::max(0.0, left_wyy - left_wy * left_wy / left_w);
      const double right_wy = total_wy - left_wy;
      const double right_sse =
          std::max(0.0, (total_wyy - left_wyy) - right_wy * right_wy / right_w);
      const double sse = left_sse + right_sse;
      if (!best.found || sse < best.children_sse) {
        best.found = true;
        best.feature = feature;
        best.threshold = 0.5 * (v + next);
        best.children_sse = sse;
      }
    }
  }
  return best;
}

namespace {

struct Builder {
  const Matrix& X;
  const Vector& y;
  const Vector& w;
  const CartControl& control;
  Tree tree;
  IndexVector all_features;

  int build(std::span<Index> rows, int depth) {
    const int node_index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    double sw = 0.0, swy = 0.0;
    for (const Index i : rows) {
      sw += w[i];
      swy += w[i] * y[i];
    }
    tree.nodes[static_cast<std::size_t>(node_index)].value =
        sw > 0.0 ? swy / sw : 0.0;

    if (depth >= control.max_depth ||
        static_cast<Index>(rows.size()) < 2 * control.min_leaf) {
      return node_index;
    }
    const double node_sse = weighted_sse(y, w, rows);
    const double scale = std::max(1.0, std::abs(swy * swy / std::max(sw, 1e-300)));
    if (node_sse <= 1e-12 * scale) return node_index;

    std::span<const Index> features = all_features;
    IndexVector sampled;
    const Index d = X.cols();
    if (control.mtry > 0 && control.mtry < d) {
      if (!control.rng) {
        throw InvalidArgumentError("build_cart: feature subsampling needs an rng");
      }
      sampled = control.rng->sample_without_replacement(d, control.mtry);
      std::sort(sampled.begin(), sampled.end());
      features = sampled;
    }

    const SplitCandidate split =
        find_best_split(X, y, w, rows, features, control.min_leaf);
    if (!split.found || !(split.children_sse < node_sse)) return node_index;

    // Stable partition keeps the canonical order inside each child.
    const auto middle = std::stable_partition(
        rows.begin(), rows.end(), [&](Index i) {
          return X(i, split.feature) <= split.threshold;
        });
    const auto left_size = static_cast<std::size_t>(middle - rows.begin());
    const int left = build(rows.subspan(0, left_size), depth + 1);
    const int right = build(rows.subspan(left_size), depth + 1);

    auto& node = tree.nodes[static_cast<std::size_t>(node_index)];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.left = left;
    node.right = right;
    return node_index;
  }
};

class TreeModel final : public RegressionModel {
 public:
  TreeModel(Index dim, detail::Tree tree)
      : RegressionModel(dim), tree_(std::move(tree)) {}

 private:
  Vector predict_impl(const Matrix& X) const override {
    return tree_.predict(X);
  }
  detail::Tree tree_;
};

}  // namespace

Tree build_cart(const Matrix& X, const Vector& y, const Vector& w,
                std::span<const Index> rows, const CartControl& control) {
  Builder builder{X, y, w, control, Tree{}, IndexVector{}};
  builder.all_features.resize(static_cast<std::size_t>(X.cols()));
  for (Index j = 0; j < X.cols(); ++j) {
    builder.all_features[static_cast<std::size_t>(j)] = j;
  }
  IndexVector order = canonical_order(X, y, w, rows);
  builder.build(std::span<Index>(order), 0);
  return std::move(builder.tree);
}

}  // namespace detail

RegressionModelPtr fit_tree(const Matrix& X, const Vector& y,
                            const TreeOptions& options,
                            const Vector* weights) {
  if (X.rows() != y.size()) throw DimensionError("fit_tree: X/y row mismatch");
  if (options.max_depth < 0 || options.min_leaf < 1) {
    throw InvalidArgumentError("fit_tree: bad depth or min_leaf");
  }
  const Vector w = weights ? *weights : Vector::Ones(X.rows());
  if (w.size() != X.rows()) throw DimensionError("fit_tree: weight length mismatch");
  IndexVector rows(static_cast<std::size_t>(X.rows()));
  for (Index i = 0; i < X.rows(); ++i) rows[static_cast<std::size_t>(i)] = i;
  detail::CartControl control;
  control.max_depth = options.max_depth;
  control.min_leaf = options.min_leaf;
  detail::Tree tree = detail::build_cart(X, y, w, rows, control);
  return std::make_shared<detail::TreeModel>(X.cols(), std::move(tree));
}

}  // namespace hte
