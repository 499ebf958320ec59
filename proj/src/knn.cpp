#include <algorithm>
#include <numeric>

#include "hte/errors.hpp"
#include "hte/learners.hpp"

namespace hte {
namespace {

class KnnModel final : public RegressionModel {
 public:
  KnnModel(Matrix X, Vector y, Index k)
      : RegressionModel(X.cols()), train_(std::move(X)), y_(std::move(y)), k_(k) {}

 private:
  Vector predict_impl(const Matrix& X) const override {
    const Index n = train_.rows();
    Vector out(X.rows());
    std::vector<Index> order(static_cast<std::size_t>(n));
    Vector dist(n);
    for (Index q = 0; q < X.rows(); ++q) {
      dist = (train_.rowwise() - X.row(q)).rowwise().squaredNorm();
      std::iota(order.begin(), order.end(), Index{0});
      std::partial_sort(order.begin(), order.begin() + k_, order.end(),
                        [&](Index a, Index b) {
                          if (dist[a] != dist[b]) return dist[a] < dist[b];
                          return a < b;  // distance ties: lower row index
                        });
      double sum = 0.0;
      for (Index i = 0; i < k_; ++i) sum += y_[order[static_cast<std::size_t>(i)]];
      out[q] = sum / static_cast<double>(k_);
    }
    return out;
  }

  Matrix train_;
  Vector y_;
  Index k_;
};

}  // namespace

RegressionModelPtr fit_knn(const Matrix& X, const Vector& y, Index k) {
  if (X.rows() != y.size()) throw DimensionError("fit_knn: X/y row mismatch");
  if (k < 1 || k > X.rows()) {
    throw InvalidArgumentError("fit_knn: k must lie in [1, N]");
  }
  return std::make_shared<KnnModel>(X, y, k);
}

}  // namespace hte
