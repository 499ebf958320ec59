#include <cmath>

#include "hte/errors.hpp"
#include "hte/meta_learners.hpp"
#include "meta_common.hpp"
#include "tree_internal.hpp"

namespace hte {
namespace {

struct EffectTree {
  detail::Tree structure;
  std::vector<double> effects;  // per node

  template <class Row>
  double predict_row(const Row& x) const {
    int at = 0;
    while (structure.nodes[static_cast<std::size_t>(at)].feature >= 0) {
      const auto& node = structure.nodes[static_cast<std::size_t>(at)];
      at = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return effects[static_cast<std::size_t>(at)];
  }
};

struct ArmStats {
  double sum1 = 0.0, sum0 = 0.0;
  Index n1 = 0, n0 = 0;
};

/// Per-node difference in arm means; nodes missing an arm inherit the
/// parent estimate (the root is guaranteed both arms by the caller).
std::vector<double> node_effects(const detail::Tree& tree, const Matrix& X,
                                 const Vector& y, const Vector& z,
                                 std::span<const Index> rows) {
  std::vector<ArmStats> stats(tree.nodes.size());
  for (const Index i : rows) {
    int at = 0;
    while (true) {
      auto& s = stats[static_cast<std::size_t>(at)];
      if (z[i] == 1.0) {
        s.sum1 += y[i];
        ++s.n1;
      } else {
        s.sum0 += y[i];
        ++s.n0;
      }
      const auto& node = tree.nodes[static_cast<std::size_t>(at)];
      if (node.feature < 0) break;
      at = X(i, node.feature) <= node.threshold ? node.left : node.right;
    }
  }

  std::vector<int> parent(tree.nodes.size(), -1);
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const auto& node = tree.nodes[k];
    if (node.feature >= 0) {
      parent[static_cast<std::size_t>(node.left)] = static_cast<int>(k);
      parent[static_cast<std::size_t>(node.right)] = static_cast<int>(k);
    }
  }

  std::vector<double> effects(tree.nodes.size(), 0.0);
  for (std::size_t k = 0; k < tree.nodes.size(); ++k) {
    const auto& s = stats[k];
    if (s.n1 > 0 && s.n0 > 0) {
      effects[k] = s.sum1 / static_cast<double>(s.n1) -
                   s.sum0 / static_cast<double>(s.n0);
    } else {
      // Preorder layout puts the parent before its children.
      effects[k] = parent[k] >= 0 ? effects[static_cast<std::size_t>(parent[k])] : 0.0;
    }
  }
  return effects;
}

class CausalForestModel final : public CateModel {
 public:
  CausalForestModel(Index dim, std::vector<EffectTree> trees,
                    PropensityModelPtr ps)
      : CateModel(dim), trees_(std::move(trees)), ps_(std::move(ps)) {}

  CateFamily family() const override { return CateFamily::kCausalForest; }

 private:
  Vector predict_impl(const Matrix& X) const override {
    const Matrix design = detail::with_propensity_column(X, ps_);
    Vector out = Vector::Zero(design.rows());
    for (const auto& tree : trees_) {
      for (Index i = 0; i < design.rows(); ++i) {
        out[i] += tree.predict_row(design.row(i));
      }
    }
    return out / static_cast<double>(trees_.size());
  }

  std::vector<EffectTree> trees_;
  PropensityModelPtr ps_;
};

}  // namespace

CateModelPtr fit_causal_forest(const CausalDataset& data,
                               const CausalForestOptions& options, Rng& rng,
                               const PropensityFit* ps) {
  data.validate();
  if (options.trees < 1) throw InvalidArgumentError("fit_causal_forest: need trees >= 1");
  const Index n = data.n();
  const Index n_treated = static_cast<Index>(data.treated_indices().size());
  if (n_treated < options.min_leaf || n - n_treated < options.min_leaf) {
    throw ArmTooSmallError("fit_causal_forest: each arm needs at least min_leaf units");
  }

  const Matrix design =
      ps ? detail::with_propensity_values(data.covariates, ps->pi_hat)
         : data.covariates;
  const Index d = design.cols();
  const Index mtry = options.mtry > 0
                         ? std::min(options.mtry, d)
                         : static_cast<Index>(std::ceil(static_cast<double>(d) / 3.0));
  const Vector w = Vector::Ones(n);

  detail::CartControl control;
  control.max_depth = options.max_depth;
  control.min_leaf = options.min_leaf;
  control.mtry = mtry;
  control.rng = &rng;

  std::vector<EffectTree> trees;
  trees.reserve(static_cast<std::size_t>(options.trees));
  IndexVector all_rows(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all_rows[static_cast<std::size_t>(i)] = i;
  IndexVector rows(static_cast<std::size_t>(n));
  for (int t = 0; t < options.trees; ++t) {
    if (options.bootstrap) {
      // Redraw until the sample keeps both arms (the root must be able to
      // form a difference in means).
      for (int attempt = 0;; ++attempt) {
        bool any_treated = false, any_control = false;
        for (auto& row : rows) {
          row = static_cast<Index>(rng.uniform_index(static_cast<std::uint64_t>(n)));
          (data.treatment[row] == 1.0 ? any_treated : any_control) = true;
        }
        if (any_treated && any_control) break;
        if (attempt >= 100) {
          for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
          break;
        }
      }
    } else {
      for (Index i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    }
    EffectTree tree;
    tree.structure = detail::build_cart(design, data.outcome, w, rows, control);
    // Leaf effects use every training row routed through the fitted
    // partition, not just the bootstrap draw; estimating arm means on the
    // full sample decouples them from split selection.
    tree.effects = node_effects(tree.structure, design, data.outcome,
                                data.treatment, all_rows);
    trees.push_back(std::move(tree));
  }
  return std::make_shared<CausalForestModel>(data.dim(), std::move(trees),
                                             ps ? ps->model : nullptr);
}

}  // namespace hte
