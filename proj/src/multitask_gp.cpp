#include <cmath>

#include "gp_core.hpp"
#include "hte/errors.hpp"
#include "hte/meta_learners.hpp"
#include "meta_common.hpp"

namespace hte {
namespace {

constexpr Index kDenseGuard = 5000;

Matrix unit_rbf(const Matrix& d2, double lengthscale) {
  return (-d2 / (2.0 * lengthscale * lengthscale)).array().exp();
}

Eigen::Matrix2d coregionalization_from(double l00, double a10, double l11) {
  Eigen::Matrix2d L;
  L << l00, 0.0, a10, l11;
  return L * L.transpose();
}

Matrix task_scale(const Vector& z_rows, const Vector& z_cols,
                  const Eigen::Matrix2d& B) {
  Matrix out(z_rows.size(), z_cols.size());
  for (Index i = 0; i < z_rows.size(); ++i) {
    for (Index j = 0; j < z_cols.size(); ++j) {
      out(i, j) = B(static_cast<Index>(z_rows[i]), static_cast<Index>(z_cols[j]));
    }
  }
  return out;
}

struct IcmObjective {
  const Matrix& d2;
  const Vector& z;
  const Vector& y;
  bool free_coregionalization = true;
  Eigen::Matrix2d fixed_b;

  // theta layout: [log len, (log l00, a10, log l11)?, log noise]
  std::pair<double, Vector> operator()(const Vector& theta) const {
    const double len = std::exp(theta[0]);
    Eigen::Matrix2d B = fixed_b;
    double l00 = 0, a10 = 0, l11 = 0;
    Index at = 1;
    if (free_coregionalization) {
      l00 = std::exp(theta[at++]);
      a10 = theta[at++];
      l11 = std::exp(theta[at++]);
      B = coregionalization_from(l00, a10, l11);
    }
    const double noise = std::exp(theta[at]);

    const Matrix r = unit_rbf(d2, len);
    const Matrix scale = task_scale(z, z, B);
    const Matrix k = scale.cwiseProduct(r);
    const auto chol = detail::chol_with_jitter(k, noise);
    const double value = detail::gp_lml(chol.llt, y);

    std::vector<Matrix> grads;
    grads.push_back(k.cwiseProduct(d2 / (len * len)));
    if (free_coregionalization) {
      Eigen::Matrix2d db_l00;
      db_l00 << 2.0 * l00, a10, a10, 0.0;
      db_l00 *= l00;
      Eigen::Matrix2d db_a10;
      db_a10 << 0.0, l00, l00, 2.0 * a10;
      Eigen::Matrix2d db_l11 = Eigen::Matrix2d::Zero();
      db_l11(1, 1) = 2.0 * l11 * l11;
      grads.push_back(task_scale(z, z, db_l00).cwiseProduct(r));
      grads.push_back(task_scale(z, z, db_a10).cwiseProduct(r));
      grads.push_back(task_scale(z, z, db_l11).cwiseProduct(r));
    }
    grads.push_back(noise * Matrix::Identity(y.size(), y.size()));
    return {value, detail::gp_lml_grad(chol.llt, y, grads)};
  }
};

}  // namespace

struct MultitaskGpModel::State {
  Matrix X;  // augmented design used at fit time
  Vector z;
  Vector alpha;
  Matrix chol_lower;
  Eigen::Matrix2d B;
  double lengthscale = 1.0;
  double noise = 0.1;
  double lml = 0.0;
};

MultitaskGpModel::MultitaskGpModel(Index dim,
                                   std::shared_ptr<const State> state,
                                   PropensityModelPtr ps)
    : CateModel(dim), state_(std::move(state)), ps_(std::move(ps)) {}

MultitaskGpModel::~MultitaskGpModel() = default;

Eigen::Matrix2d MultitaskGpModel::coregionalization() const { return state_->B; }
double MultitaskGpModel::lengthscale() const { return state_->lengthscale; }
double MultitaskGpModel::noise_variance() const { return state_->noise; }
double MultitaskGpModel::log_marginal_likelihood() const { return state_->lml; }

Matrix MultitaskGpModel::augment(const Matrix& X) const {
  return detail::with_propensity_column(X, ps_);
}

Vector MultitaskGpModel::predict_impl(const Matrix& X) const {
  const Matrix design = augment(X);
  const Matrix r = unit_rbf(detail::squared_distances(state_->X, design),
                            state_->lengthscale);
  const auto& B = state_->B;
  // Cross-covariance difference between the treated and control tasks.
  Matrix diff(r.rows(), r.cols());
  for (Index i = 0; i < r.rows(); ++i) {
    const auto task = static_cast<Index>(state_->z[i]);
    diff.row(i) = (B(task, 1) - B(task, 0)) * r.row(i);
  }
  return diff.transpose() * state_->alpha;
}

Vector MultitaskGpModel::variance_impl(const Matrix& X) const {
  const Matrix design = augment(X);
  const Matrix r = unit_rbf(detail::squared_distances(state_->X, design),
                            state_->lengthscale);
  const auto& B = state_->B;
  Matrix diff(r.rows(), r.cols());
  for (Index i = 0; i < r.rows(); ++i) {
    const auto task = static_cast<Index>(state_->z[i]);
    diff.row(i) = (B(task, 1) - B(task, 0)) * r.row(i);
  }
  state_->chol_lower.triangularView<Eigen::Lower>().solveInPlace(diff);
  const double prior = B(1, 1) + B(0, 0) - 2.0 * B(0, 1);
  Vector out(design.rows());
  for (Index q = 0; q < design.rows(); ++q) {
    out[q] = std::max(0.0, prior - diff.col(q).squaredNorm());
  }
  return out;
}

const MultitaskGpModel& as_multitask_gp(const CateModel& model) {
  const auto* mt = dynamic_cast<const MultitaskGpModel*>(&model);
  if (!mt) throw InvalidArgumentError("as_multitask_gp: not a multitask GP model");
  return *mt;
}

CateModelPtr fit_multitask_gp(const CausalDataset& data,
                              const MultitaskGpOptions& options, Rng& rng,
                              const PropensityFit* ps) {
  data.validate();
  if (data.n() > kDenseGuard) {
    throw InvalidArgumentError("fit_multitask_gp: n exceeds the dense factorization guard (5000)");
  }
  if (!(options.noise_variance > 0.0) || !(options.lengthscale > 0.0)) {
    throw InvalidArgumentError("fit_multitask_gp: hyperparameters must be positive");
  }

  auto state = std::make_shared<MultitaskGpModel::State>();
  state->X = ps ? detail::with_propensity_values(data.covariates, ps->pi_hat)
                : data.covariates;
  state->z = data.treatment;

  const Matrix d2 = detail::squared_distances(state->X, state->X);
  const Vector& y = data.outcome;
  const double y_sd = std::max(
      1e-6, std::sqrt((y.array() - y.mean()).square().sum() /
                      static_cast<double>(std::max<Index>(1, y.size() - 1))));

  IcmObjective objective{d2, state->z, y,
                         !options.fixed_coregionalization.has_value(),
                         options.fixed_coregionalization.value_or(
                             Eigen::Matrix2d::Identity())};

  double len = options.lengthscale;
  double noise = options.noise_variance;
  Eigen::Matrix2d B = objective.fixed_b;

  if (options.optimize) {
    const Index n_params = objective.free_coregionalization ? 5 : 2;
    Vector lower(n_params), upper(n_params), start(n_params);
    Index at = 0;
    lower[at] = std::log(1e-2); upper[at] = std::log(1e3);
    start[at++] = std::log(len);
    if (objective.free_coregionalization) {
      lower[at] = std::log(1e-6); upper[at] = std::log(1e6);
      start[at++] = std::log(y_sd);
      lower[at] = -1e6; upper[at] = 1e6;
      start[at++] = 0.5 * y_sd;
      lower[at] = std::log(1e-6); upper[at] = std::log(1e6);
      start[at++] = std::log(y_sd);
    }
    lower[at] = std::log(1e-8); upper[at] = std::log(1e6);
    start[at] = std::log(noise);

    auto best = detail::maximize_with_restarts(objective, start, lower, upper, 300);
    for (int r = 0; r < options.restarts; ++r) {
      Vector draw(n_params);
      Index k = 0;
      draw[k++] = rng.uniform(std::log(0.3), std::log(3.0));
      if (objective.free_coregionalization) {
        draw[k++] = rng.uniform(std::log(0.3 * y_sd), std::log(3.0 * y_sd));
        draw[k++] = rng.uniform(-y_sd, y_sd);
        draw[k++] = rng.uniform(std::log(0.3 * y_sd), std::log(3.0 * y_sd));
      }
      draw[k] = rng.uniform(std::log(1e-4 * y_sd * y_sd),
                            std::log(std::max(1e-3, y_sd * y_sd)));
      const auto candidate =
          detail::maximize_with_restarts(objective, draw, lower, upper, 300);
      if (candidate.value > best.value) best = candidate;
    }

    at = 0;
    len = std::exp(best.point[at++]);
    if (objective.free_coregionalization) {
      const double l00 = std::exp(best.point[at++]);
      const double a10 = best.point[at++];
      const double l11 = std::exp(best.point[at++]);
      B = coregionalization_from(l00, a10, l11);
    }
    noise = std::exp(best.point[at]);
  }

  const Matrix kernel = task_scale(state->z, state->z, B).cwiseProduct(unit_rbf(d2, len));
  const auto chol = detail::chol_with_jitter(kernel, noise);
  state->alpha = chol.llt.solve(y);
  state->chol_lower = chol.llt.matrixL();
  state->B = B;
  state->lengthscale = len;
  state->noise = noise;
  state->lml = detail::gp_lml(chol.llt, y);

  return std::make_shared<MultitaskGpModel>(data.dim(), std::move(state),
                                            ps ? ps->model : nullptr);
}

}  // namespace hte
