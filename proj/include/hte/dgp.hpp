#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hte/dataset.hpp"
#include "hte/rng.hpp"

namespace hte {

enum class DgpName { kIhdpB, kActg1, kActg2, kSynthetic };

std::string to_string(DgpName name);
DgpName dgp_name_from_string(std::string_view name);

enum class TreatmentSource { kFromData, kRandomized, kTargeted };

/// Treated units whose raw `column` equals `value` are removed, turning a
/// randomized study into an observational one.
struct DropRule {
  std::string column;
  double value = 0.0;
};

struct DgpSpec {
  DgpName name = DgpName::kSynthetic;

  // Covariate source: a CSV path, or schema-matched synthetic draws.
  std::string csv_path;
  Index n = 500;
  double binary_p = 0.5;

  // Treatment source.
  TreatmentSource treatment_source = TreatmentSource::kRandomized;
  std::string treatment_column;  // from_data
  double randomized_p = 0.5;
  double targeted_a = 2.0;
  double targeted_b = 0.0;

  std::optional<DropRule> drop_rule;
  std::vector<std::string> drop_columns;  // removed after the drop rule
};

// Schemas: 25 IHDP covariates (6 continuous, 19 binary) and the 12-column
// trial layout (age, wtkg, preanti continuous; the rest binary).
std::vector<ColumnKind> ihdp_schema();
std::vector<std::string> ihdp_column_names();
std::vector<ColumnKind> actg_schema();
const std::vector<std::string>& actg_column_names();
std::vector<ColumnKind> synthetic_schema();
std::vector<std::string> synthetic_column_names();

/// Continuous columns are standard normal; binary columns are
/// Bernoulli(p), column-major draw order.
Matrix synth_covariates(const std::vector<ColumnKind>& schema, Index n,
                        Rng& rng, const Vector* bernoulli_p = nullptr);

/// Removes treated units matching the rule; controls are untouched.
/// Throws when no treated unit survives.
CausalDataset make_observational(const CausalDataset& data,
                                 const DropRule& rule);

/// Response surface B: mu0 = exp((X + 0.5) beta), mu1 = X beta - omega,
/// beta drawn from {0, .1, .2, .3, .4} with weights (.6, .1, .1, .1, .1);
/// omega pins the treated-mean effect to 4 exactly; unit-variance noise is
/// drawn independently per potential outcome.
SimTruth gen_ihdp_surface_b(const Matrix& X, const Vector& z, Rng& rng);

/// Trial surfaces on standardized covariates addressed by column name.
/// Noise is N(0, sigma^2) with sigma = (mu_max - mu_min) / divisor and is
/// shared by both potential outcomes, so y1 - y0 == tau exactly.
SimTruth gen_actg_setup1(const Matrix& X,
                         const std::vector<std::string>& names, Rng& rng);
SimTruth gen_actg_setup2(const Matrix& X,
                         const std::vector<std::string>& names, Rng& rng);

/// Self-contained fallback surface: linear prognostic score over the first
/// four columns, constant effect 1, shared noise sd 0.5.
SimTruth gen_synthetic_linear(const Matrix& X, Rng& rng);

struct TreatmentRule {
  TreatmentSource mode = TreatmentSource::kRandomized;
  double p = 0.5;  // randomized
  double a = 2.0;  // targeted: logistic(a * standardized(mu) + b)
  double b = 0.0;
};

/// Randomized draws ignore X and mu; targeted draws make the assignment
/// probability strictly monotone in the prognostic score.
Vector gen_treatment(const Matrix& X, const Vector& mu,
                     const TreatmentRule& rule, Rng& rng);

}  // namespace hte
