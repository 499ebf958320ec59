#pragma once

#include "hte/types.hpp"

namespace hte {

class CateModel;

/// Mean squared error of tau_hat against the ground truth; callers take
/// the square root when reporting.
double pehe(VectorRef tau_hat, VectorRef tau_true);

/// Mean squared prediction error of the fitted conditional mean against
/// the observed outcome.
double mu_risk(VectorRef mu_hat, VectorRef y_obs);

/// Same, with each term divided by the realized arm's propensity
/// (pi_hat for treated units, 1 - pi_hat for controls). Each divisor must
/// lie strictly inside (0, 1).
double mu_risk_iptw(VectorRef mu_hat, VectorRef y_obs, VectorRef z,
                    VectorRef pi_hat);

/// Plug-in CATE risk: validation-set disagreement against a reference
/// model treated as ground truth.
double tau_risk_plugin(VectorRef tau_hat_val, const CateModel& reference,
                       const Matrix& X_val);

/// Squared distance of tau_hat from the inverse-propensity pseudo-outcome
/// (2z - 1) * y / pi_z.
double tau_risk_iptw(VectorRef tau_hat_val, VectorRef y_val, VectorRef z_val,
                     VectorRef pi_tilde_val);

/// Residual-on-residual loss: mean of ((y - m) - (z - pi) * tau)^2.
double r_loss(VectorRef tau_hat, VectorRef y, VectorRef z, VectorRef m_hat,
              VectorRef pi_hat);

struct CateComparison {
  double pearson = 0.0;
  double spearman = 0.0;
  double sd_a = 0.0;
  double sd_b = 0.0;
  double mean_a = 0.0;
  double mean_b = 0.0;
};

/// Pearson and Spearman correlations plus sample moments of two CATE
/// estimate vectors. Requires length >= 3 and nonzero variances.
CateComparison compare_cate_estimates(VectorRef tau_a, VectorRef tau_b);

/// Mean of tau over treated units.
double att(VectorRef tau, VectorRef z);

}  // namespace hte
