#include "hte/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hte/errors.hpp"
#include "hte/meta_learners.hpp"

namespace hte {
namespace {

void require_same_length(VectorRef a, VectorRef b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": length mismatch");
  }
}

double arm_propensity(double z, double pi) { return z == 1.0 ? pi : 1.0 - pi; }

Vector average_ranks(VectorRef values) {
  const Index n = values.size();
  IndexVector order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return values[a] < values[b]; });
  Vector ranks(n);
  Index i = 0;
  while (i < n) {
    Index j = i;
    while (j + 1 < n && values[order[static_cast<std::size_t>(j + 1)]] ==
                            values[order[static_cast<std::size_t>(i)]]) {
      ++j;
    }
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (Index k = i; k <= j; ++k) {
      ranks[order[static_cast<std::size_t>(k)]] = shared;
    }
    i = j + 1;
  }
  return ranks;
}

double pearson(VectorRef a, VectorRef b) {
  const double ma = a.mean();
  const double mb = b.mean();
  const double cov = ((a.array() - ma) * (b.array() - mb)).sum();
  const double va = (a.array() - ma).square().sum();
  const double vb = (b.array() - mb).square().sum();
  if (!(va > 0.0) || !(vb > 0.0)) {
    throw InvalidArgumentError("compare_cate_estimates: zero-variance input");
  }
  return cov / std::sqrt(va * vb);
}

}  // namespace

double pehe(VectorRef tau_hat, VectorRef tau_true) {
  require_same_length(tau_hat, tau_true, "pehe");
  if (tau_hat.size() < 1) throw InvalidArgumentError("pehe: empty input");
  return (tau_hat - tau_true).squaredNorm() /
         static_cast<double>(tau_hat.size());
}

double mu_risk(VectorRef mu_hat, VectorRef y_obs) {
  require_same_length(mu_hat, y_obs, "mu_risk");
  if (mu_hat.size() < 1) throw InvalidArgumentError("mu_risk: empty input");
  return (mu_hat - y_obs).squaredNorm() / static_cast<double>(mu_hat.size());
}

double mu_risk_iptw(VectorRef mu_hat, VectorRef y_obs, VectorRef z,
                    VectorRef pi_hat) {
  require_same_length(mu_hat, y_obs, "mu_risk_iptw");
  require_same_length(mu_hat, z, "mu_risk_iptw");
  require_same_length(mu_hat, pi_hat, "mu_risk_iptw");
  double total = 0.0;
  for (Index i = 0; i < mu_hat.size(); ++i) {
    const double denom = arm_propensity(z[i], pi_hat[i]);
    if (!(denom > 0.0 && denom <= 1.0)) {
      throw InvalidArgumentError("mu_risk_iptw: realized-arm propensity outside (0,1]");
    }
    const double err = mu_hat[i] - y_obs[i];
    total += err * err / denom;
  }
  return total / static_cast<double>(mu_hat.size());
}

double tau_risk_plugin(VectorRef tau_hat_val, const CateModel& reference,
                       const Matrix& X_val) {
  if (X_val.rows() != tau_hat_val.size()) {
    throw DimensionError("tau_risk_plugin: length mismatch");
  }
  if (X_val.rows() == 0) throw InvalidArgumentError("tau_risk_plugin: empty validation set");
  const Vector tilde = predict_cate(reference, X_val);
  return (tau_hat_val - tilde).squaredNorm() /
         static_cast<double>(tau_hat_val.size());
}

double tau_risk_iptw(VectorRef tau_hat_val, VectorRef y_val, VectorRef z_val,
                     VectorRef pi_tilde_val) {
  require_same_length(tau_hat_val, y_val, "tau_risk_iptw");
  require_same_length(tau_hat_val, z_val, "tau_risk_iptw");
  require_same_length(tau_hat_val, pi_tilde_val, "tau_risk_iptw");
  double total = 0.0;
  for (Index i = 0; i < tau_hat_val.size(); ++i) {
    const double denom = arm_propensity(z_val[i], pi_tilde_val[i]);
    if (!(denom > 0.0 && denom <= 1.0)) {
      throw InvalidArgumentError("tau_risk_iptw: realized-arm propensity outside (0,1]");
    }
    const double pseudo = (2.0 * z_val[i] - 1.0) * y_val[i] / denom;
    const double err = tau_hat_val[i] - pseudo;
    total += err * err;
  }
  return total / static_cast<double>(tau_hat_val.size());
}

double r_loss(VectorRef tau_hat, VectorRef y, VectorRef z, VectorRef m_hat,
              VectorRef pi_hat) {
  require_same_length(tau_hat, y, "r_loss");
  require_same_length(tau_hat, z, "r_loss");
  require_same_length(tau_hat, m_hat, "r_loss");
  require_same_length(tau_hat, pi_hat, "r_loss");
  double total = 0.0;
  for (Index i = 0; i < tau_hat.size(); ++i) {
    const double term = (y[i] - m_hat[i]) - (z[i] - pi_hat[i]) * tau_hat[i];
    total += term * term;
  }
  return total / static_cast<double>(tau_hat.size());
}

CateComparison compare_cate_estimates(VectorRef tau_a, VectorRef tau_b) {
  require_same_length(tau_a, tau_b, "compare_cate_estimates");
  const Index n = tau_a.size();
  if (n < 3) throw InvalidArgumentError("compare_cate_estimates: need length >= 3");
  CateComparison out;
  out.mean_a = tau_a.mean();
  out.mean_b = tau_b.mean();
  out.sd_a = std::sqrt((tau_a.array() - out.mean_a).square().sum() /
                       static_cast<double>(n - 1));
  out.sd_b = std::sqrt((tau_b.array() - out.mean_b).square().sum() /
                       static_cast<double>(n - 1));
  out.pearson = pearson(tau_a, tau_b);
  out.spearman = pearson(average_ranks(tau_a), average_ranks(tau_b));
  return out;
}

double att(VectorRef tau, VectorRef z) {
  require_same_length(tau, z, "att");
  double total = 0.0;
  Index count = 0;
  for (Index i = 0; i < tau.size(); ++i) {
    if (z[i] == 1.0) {
      total += tau[i];
      ++count;
    }
  }
  if (count == 0) throw InvalidArgumentError("att: no treated units");
  return total / static_cast<double>(count);
}

}  // namespace hte
