#include "hte/dgp.hpp"

#include <cmath>

#include "hte/errors.hpp"

namespace hte {

std::string to_string(DgpName name) {
  switch (name) {
    case DgpName::kIhdpB: return "ihdp_b";
    case DgpName::kActg1: return "actg_1";
    case DgpName::kActg2: return "actg_2";
    case DgpName::kSynthetic: return "synthetic";
  }
  return "unknown";
}

DgpName dgp_name_from_string(std::string_view name) {
  if (name == "ihdp_b") return DgpName::kIhdpB;
  if (name == "actg_1") return DgpName::kActg1;
  if (name == "actg_2") return DgpName::kActg2;
  if (name == "synthetic") return DgpName::kSynthetic;
  throw InvalidArgumentError("unknown dgp '" + std::string(name) + "'");
}

std::vector<ColumnKind> ihdp_schema() {
  std::vector<ColumnKind> schema(25, ColumnKind::kBinary);
  for (int j = 0; j < 6; ++j) schema[static_cast<std::size_t>(j)] = ColumnKind::kContinuous;
  return schema;
}

std::vector<std::string> ihdp_column_names() {
  std::vector<std::string> names;
  names.reserve(25);
  for (int j = 1; j <= 25; ++j) {
    names.push_back((j <= 9 ? "x0" : "x") + std::to_string(j));
  }
  return names;
}

const std::vector<std::string>& actg_column_names() {
  static const std::vector<std::string> names = {
      "age",  "wtkg",    "hemo", "homo",   "drugs", "oprior",
      "z30",  "preanti", "race", "gender", "str2",  "karnof_hi"};
  return names;
}

std::vector<ColumnKind> actg_schema() {
  std::vector<ColumnKind> schema(12, ColumnKind::kBinary);
  schema[0] = ColumnKind::kContinuous;  // age
  schema[1] = ColumnKind::kContinuous;  // wtkg
  schema[7] = ColumnKind::kContinuous;  // preanti
  return schema;
}

std::vector<ColumnKind> synthetic_schema() {
  std::vector<ColumnKind> schema(10, ColumnKind::kBinary);
  for (int j = 0; j < 5; ++j) schema[static_cast<std::size_t>(j)] = ColumnKind::kContinuous;
  return schema;
}

std::vector<std::string> synthetic_column_names() {
  std::vector<std::string> names;
  for (int j = 1; j <= 10; ++j) names.push_back("s" + std::to_string(j));
  return names;
}

Matrix synth_covariates(const std::vector<ColumnKind>& schema, Index n,
                        Rng& rng, const Vector* bernoulli_p) {
  if (n < 1) throw InvalidArgumentError("synth_covariates: need n >= 1");
  if (bernoulli_p &&
      bernoulli_p->size() != static_cast<Index>(schema.size())) {
    throw DimensionError("synth_covariates: bernoulli_p length mismatch");
  }
  Matrix X(n, static_cast<Index>(schema.size()));
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const Index col = static_cast<Index>(j);
    if (schema[j] == ColumnKind::kContinuous) {
      for (Index i = 0; i < n; ++i) X(i, col) = rng.normal();
    } else {
      const double p = bernoulli_p ? (*bernoulli_p)[col] : 0.5;
      for (Index i = 0; i < n; ++i) X(i, col) = rng.bernoulli(p) ? 1.0 : 0.0;
    }
  }
  return X;
}

CausalDataset make_observational(const CausalDataset& data,
                                 const DropRule& rule) {
  const Index col = data.column_index(rule.column);
  IndexVector keep;
  Index treated_left = 0;
  for (Index i = 0; i < data.n(); ++i) {
    if (data.treatment[i] == 1.0 && data.covariates(i, col) == rule.value) {
      continue;
    }
    treated_left += data.treatment[i] == 1.0;
    keep.push_back(i);
  }
  if (treated_left == 0) {
    throw InvalidArgumentError("make_observational: rule removed every treated unit");
  }
  return data.select_rows(keep);
}

SimTruth gen_ihdp_surface_b(const Matrix& X, const Vector& z, Rng& rng) {
  if (X.cols() != 25) {
    throw DimensionError("ihdp surface: expected 25 covariate columns");
  }
  if (z.size() != X.rows()) throw DimensionError("ihdp surface: z length mismatch");

  Vector beta(25);
  for (Index j = 0; j < 25; ++j) {
    const double u = rng.uniform();
    if (u < 0.6) beta[j] = 0.0;
    else if (u < 0.7) beta[j] = 0.1;
    else if (u < 0.8) beta[j] = 0.2;
    else if (u < 0.9) beta[j] = 0.3;
    else beta[j] = 0.4;
  }

  const Vector linear = X * beta;
  const Vector shifted = (X.array() + 0.5).matrix() * beta;
  const Vector exp_term = shifted.array().exp();

  double treated_gap = 0.0;
  Index treated_count = 0;
  for (Index i = 0; i < X.rows(); ++i) {
    if (z[i] == 1.0) {
      treated_gap += linear[i] - exp_term[i];
      ++treated_count;
    }
  }
  if (treated_count == 0) throw InvalidArgumentError("ihdp surface: no treated units");
  const double omega = treated_gap / static_cast<double>(treated_count) - 4.0;

  SimTruth truth;
  truth.mu0 = exp_term;
  truth.mu1 = linear.array() - omega;
  truth.tau = truth.mu1 - truth.mu0;
  truth.y0.resize(X.rows());
  truth.y1.resize(X.rows());
  for (Index i = 0; i < X.rows(); ++i) truth.y0[i] = truth.mu0[i] + rng.normal();
  for (Index i = 0; i < X.rows(); ++i) truth.y1[i] = truth.mu1[i] + rng.normal();
  return truth;
}

namespace {

Index named_column(const std::vector<std::string>& names,
                   std::string_view wanted) {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == wanted) return static_cast<Index>(j);
  }
  throw SchemaError("trial surface: missing column '" + std::string(wanted) + "'");
}

SimTruth shared_noise_truth(const Vector& mu, const Vector& tau,
                            double divisor, Rng& rng) {
  const double spread = mu.maxCoeff() - mu.minCoeff();
  const double sigma = spread / divisor;
  SimTruth truth;
  truth.mu0 = mu;
  truth.mu1 = mu + tau;
  truth.tau = truth.mu1 - truth.mu0;
  truth.y0.resize(mu.size());
  truth.y1.resize(mu.size());
  for (Index i = 0; i < mu.size(); ++i) {
    const double eps = rng.normal(0.0, sigma);
    truth.y0[i] = mu[i] + eps;
    truth.y1[i] = truth.y0[i] + truth.tau[i];  // shared draw: y1 - y0 == tau
  }
  return truth;
}

}  // namespace

SimTruth gen_actg_setup1(const Matrix& X,
                         const std::vector<std::string>& names, Rng& rng) {
  for (const auto& required : actg_column_names()) named_column(names, required);
  const auto age = X.col(named_column(names, "age"));
  const auto wtkg = X.col(named_column(names, "wtkg"));
  const auto hemo = X.col(named_column(names, "hemo"));
  const auto gender = X.col(named_column(names, "gender"));
  const auto karnof = X.col(named_column(names, "karnof_hi"));
  const auto z30 = X.col(named_column(names, "z30"));
  const auto race = X.col(named_column(names, "race"));

  Vector mu(X.rows()), tau(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    mu[i] = 8.0 - 0.07 * hemo[i] - 0.002 * std::abs(wtkg[i] - 1.0) +
            0.06 * gender[i] - 0.1 / (age[i] + 2.0) + 0.007 * karnof[i] -
            0.1 * z30[i] - 0.05 * race[i];
    tau[i] = 0.1 + 0.1 * age[i] * (karnof[i] + 2.0);
  }
  return shared_noise_truth(mu, tau, 2.0, rng);
}

SimTruth gen_actg_setup2(const Matrix& X,
                         const std::vector<std::string>& names, Rng& rng) {
  for (const auto& required : actg_column_names()) named_column(names, required);
  const auto age = X.col(named_column(names, "age"));
  const auto wtkg = X.col(named_column(names, "wtkg"));
  const auto hemo = X.col(named_column(names, "hemo"));
  const auto gender = X.col(named_column(names, "gender"));
  const auto karnof = X.col(named_column(names, "karnof_hi"));
  const auto z30 = X.col(named_column(names, "z30"));
  const auto race = X.col(named_column(names, "race"));

  Vector mu(X.rows()), tau(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    mu[i] = 6.0 + 0.3 * wtkg[i] * wtkg[i] -
            std::sin(age[i]) * (gender[i] + 1.0) + 0.6 * hemo[i] * race[i] -
            0.2 * z30[i];
    tau[i] = 1.0 + 1.5 * std::sin(wtkg[i]) * (karnof[i] + 1.0) +
             0.4 * age[i] * age[i];
  }
  return shared_noise_truth(mu, tau, 10.0, rng);
}

SimTruth gen_synthetic_linear(const Matrix& X, Rng& rng) {
  static const double coefficients[] = {1.0, -0.5, 0.25, 0.75};
  Vector mu = Vector::Zero(X.rows());
  const Index used = std::min<Index>(X.cols(), 4);
  for (Index j = 0; j < used; ++j) {
    mu += coefficients[j] * X.col(j);
  }
  SimTruth truth;
  truth.mu0 = mu;
  truth.mu1 = mu.array() + 1.0;
  truth.tau = truth.mu1 - truth.mu0;
  truth.y0.resize(X.rows());
  truth.y1.resize(X.rows());
  for (Index i = 0; i < X.rows(); ++i) {
    const double eps = rng.normal(0.0, 0.5);
    truth.y0[i] = mu[i] + eps;
    truth.y1[i] = truth.y0[i] + truth.tau[i];
  }
  return truth;
}

Vector gen_treatment(const Matrix& X, const Vector& mu,
                     const TreatmentRule& rule, Rng& rng) {
  const Index n = X.rows();
  Vector z(n);
  switch (rule.mode) {
    case TreatmentSource::kRandomized: {
      if (!(rule.p > 0.0 && rule.p < 1.0)) {
        throw InvalidArgumentError("gen_treatment: p must lie in (0, 1)");
      }
      for (Index i = 0; i < n; ++i) z[i] = rng.bernoulli(rule.p) ? 1.0 : 0.0;
      return z;
    }
    case TreatmentSource::kTargeted: {
      if (mu.size() != n) throw DimensionError("gen_treatment: mu length mismatch");
      const double mean = mu.mean();
      const double ss = (mu.array() - mean).square().sum();
      const double sd =
          n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
      for (Index i = 0; i < n; ++i) {
        const double standardized = sd > 0.0 ? (mu[i] - mean) / sd : 0.0;
        const double pi = 1.0 / (1.0 + std::exp(-(rule.a * standardized + rule.b)));
        z[i] = rng.bernoulli(pi) ? 1.0 : 0.0;
      }
      return z;
    }
    case TreatmentSource::kFromData:
      break;
  }
  throw InvalidArgumentError("gen_treatment: treatment must come from the data source");
}

}  // namespace hte
