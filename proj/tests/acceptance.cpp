// Acceptance suite: one line per criterion, [PASS]/[FAIL]/[SKIP].
// Criteria 1-3 reproduce published benchmark magnitudes and need the real
// covariate CSVs (directory from HTE_LAB_DATA, default ./data); without
// them they are skipped and the synthetic-covariate criteria 4-8 must
// still pass. Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <thread>

#include "hte/bench.hpp"
#include "hte/csv.hpp"
#include "hte/errors.hpp"
#include "hte/config.hpp"
#include "hte/dgp.hpp"
#include "hte/learners.hpp"
#include "hte/meta_learners.hpp"
#include "hte/metrics.hpp"
#include "hte/propensity.hpp"
#include "hte/rng.hpp"

using namespace hte;

namespace {

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kSkip;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& label, const Outcome& outcome) {
  const char* tag = outcome.status == Status::kPass
                        ? "[PASS]"
                        : outcome.status == Status::kFail ? "[FAIL]" : "[SKIP]";
  std::cout << tag << " criterion " << id << ": " << label;
  if (!outcome.detail.empty()) std::cout << " -- " << outcome.detail;
  std::cout << "\n" << std::flush;
  failures += outcome.status == Status::kFail;
}

double seconds_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(double value, int digits = 3) {
  std::ostringstream out;
  out.precision(digits);
  out << std::fixed << value;
  return out.str();
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("HTE_LAB_DATA")) return env;
  return "data";
}

std::optional<std::string> find_csv(const std::string& name) {
  const auto path = data_dir() / name;
  if (std::filesystem::exists(path)) return path.string();
  return std::nullopt;
}

bool csv_has_column(const std::string& path, const std::string& name) {
  const CsvTable table = read_csv(path);
  for (const auto& column : table.header) {
    if (column == name) return true;
  }
  return false;
}

MetaLearnerConfig ols_model(const std::string& name, CateFamily family) {
  MetaLearnerConfig model;
  model.name = name;
  model.family = family;
  model.base.family = LearnerFamily::kLinear;
  model.use_ps = true;
  return model;
}

DgpSpec actg_csv_spec(DgpName name, const std::string& path) {
  DgpSpec spec;
  spec.name = name;
  spec.csv_path = path;
  spec.treatment_source = TreatmentSource::kFromData;
  spec.treatment_column = "treatment";
  if (csv_has_column(path, "symptom")) {
    spec.drop_rule = DropRule{"symptom", 0.0};
    spec.drop_columns = {"symptom"};
  }
  return spec;
}

struct BenchOutcome {
  double s_test = 0.0;
  double t_test = 0.0;
  Index n = 0;
  Index treated = 0;
};

BenchOutcome run_ols_benchmark(const DgpSpec& spec, int b, std::uint64_t seed,
                               int jobs) {
  const SeedTree root(seed);
  const PreparedDgp prepared = prepare_dgp(spec, root);
  const std::vector<MetaLearnerConfig> models = {
      ols_model("S-OLS", CateFamily::kS), ols_model("T-OLS", CateFamily::kT)};
  BenchOptions options;
  options.b = b;
  options.jobs = jobs;
  const BenchmarkReport result = run_benchmark(prepared, models, options, root);
  // Tolerate isolated rank-deficiency failures (a rare binary covariate can
  // go constant inside a small treated arm); means average the successes.
  const int allowed = std::max(1, b / 50);
  if (result.models[0].ok < b - allowed || result.models[1].ok < b - allowed) {
    throw Error("model fits failed in " +
                std::to_string(b - result.models[0].ok + b - result.models[1].ok) +
                " replications");
  }
  BenchOutcome out;
  out.s_test = result.models[0].test_mean;
  out.t_test = result.models[1].test_mean;
  out.n = prepared.base.n();
  out.treated = static_cast<Index>(prepared.base.treated_indices().size());
  return out;
}

int hardware_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 2 : static_cast<int>(hw);
}

// --- criterion 1: ACTG setup1 reproduction --------------------------------

Outcome criterion_actg1() {
  const auto csv = find_csv("actg175.csv");
  if (!csv) return {Status::kSkip, "external data required (actg175.csv)"};
  const auto start = std::chrono::steady_clock::now();
  try {
    const BenchOutcome result =
        run_ols_benchmark(actg_csv_spec(DgpName::kActg1, *csv), 200, 1, hardware_jobs());
    const double elapsed = seconds_since(start);
    std::string detail = "S-OLS test=" + fmt(result.s_test) +
                         " (target 0.300±0.02), T-OLS test=" + fmt(result.t_test) +
                         " (target 0.601±0.04), n=" + std::to_string(result.n) +
                         ", " + fmt(elapsed, 1) + "s";
    const bool ok = std::abs(result.s_test - 0.300) <= 0.02 &&
                    std::abs(result.t_test - 0.601) <= 0.04 && elapsed < 120.0;
    return {ok ? Status::kPass : Status::kFail, detail};
  } catch (const std::exception& e) {
    return {Status::kFail, e.what()};
  }
}

// --- criterion 2: ACTG setup2 reproduction ---------------------------------

Outcome criterion_actg2() {
  const auto csv = find_csv("actg175.csv");
  if (!csv) return {Status::kSkip, "external data required (actg175.csv)"};
  try {
    const DgpSpec spec = actg_csv_spec(DgpName::kActg2, *csv);
    int orderings = 0;
    double s_first = 0.0, t_first = 0.0;
    for (int run = 0; run < 20; ++run) {
      const BenchOutcome result =
          run_ols_benchmark(spec, 200, 100 + static_cast<std::uint64_t>(run),
                            hardware_jobs());
      orderings += result.t_test < result.s_test;
      if (run == 0) {
        s_first = result.s_test;
        t_first = result.t_test;
      }
    }
    std::string detail = "S-OLS test=" + fmt(s_first) +
                         " (target 1.67±0.05), T-OLS test=" + fmt(t_first) +
                         " (target 1.31±0.05), ordering T<S in " +
                         std::to_string(orderings) + "/20 runs";
    const bool ok = std::abs(s_first - 1.67) <= 0.05 &&
                    std::abs(t_first - 1.31) <= 0.05 && orderings >= 19;
    return {ok ? Status::kPass : Status::kFail, detail};
  } catch (const std::exception& e) {
    return {Status::kFail, e.what()};
  }
}

// --- criterion 3: IHDP reproduction ----------------------------------------

Outcome criterion_ihdp() {
  const auto csv = find_csv("ihdp.csv");
  if (!csv) return {Status::kSkip, "external data required (ihdp.csv)"};
  const auto start = std::chrono::steady_clock::now();
  try {
    DgpSpec spec;
    spec.name = DgpName::kIhdpB;
    spec.csv_path = *csv;
    spec.treatment_source = TreatmentSource::kFromData;
    spec.treatment_column = "treatment";
    if (csv_has_column(*csv, "momwhite")) {
      spec.drop_rule = DropRule{"momwhite", 0.0};
    }
    const BenchOutcome result = run_ols_benchmark(spec, 200, 2, hardware_jobs());
    const double elapsed = seconds_since(start);
    const Index controls = result.n - result.treated;
    std::string detail =
        "S-OLS test=" + fmt(result.s_test) + " (target 4.78±0.4), T-OLS test=" +
        fmt(result.t_test) + " (target 2.02±0.2), shape " +
        std::to_string(result.n) + "=" + std::to_string(result.treated) + "+" +
        std::to_string(controls) + ", " + fmt(elapsed, 1) + "s";
    const bool shape_ok = result.n == 747 && result.treated == 139 && controls == 608;
    const bool ok = shape_ok && std::abs(result.s_test - 4.78) <= 0.4 &&
                    std::abs(result.t_test - 2.02) <= 0.2 && elapsed < 180.0;
    return {ok ? Status::kPass : Status::kFail, detail};
  } catch (const std::exception& e) {
    return {Status::kFail, e.what()};
  }
}

// --- criterion 4: ATT pin ---------------------------------------------------

Outcome criterion_att_pin() {
  try {
    DgpSpec spec;
    spec.name = DgpName::kIhdpB;
    if (const auto csv = find_csv("ihdp.csv")) {
      spec.csv_path = *csv;
      spec.treatment_source = TreatmentSource::kFromData;
      spec.treatment_column = "treatment";
      if (csv_has_column(*csv, "momwhite")) {
        spec.drop_rule = DropRule{"momwhite", 0.0};
      }
    } else {
      spec.n = 747;
      spec.treatment_source = TreatmentSource::kRandomized;
      spec.randomized_p = 139.0 / 747.0;
    }
    const SeedTree root(4);
    const PreparedDgp prepared = prepare_dgp(spec, root);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
      Rng rng = derive_stream(root.child("rep", rep), "outcome");
      const SimTruth truth = simulate_outcomes(prepared, rng);
      worst = std::max(worst,
                       std::abs(att(truth.tau, prepared.base.treatment) - 4.0));
    }
    std::ostringstream detail;
    detail << "max |ATT-4| over 1000 replications = " << worst;
    return {worst <= 1e-10 ? Status::kPass : Status::kFail, detail.str()};
  } catch (const std::exception& e) {
    return {Status::kFail, e.what()};
  }
}

// --- criterion 5: taxonomy behavior property --------------------------------

Outcome criterion_taxonomy() {
  try {
    auto forest_model = [](const std::string& name, CateFamily family) {
      MetaLearnerConfig model;
      model.name = name;
      model.family = family;
      model.use_ps = false;
      model.base.family = LearnerFamily::kForest;
      model.base.params["trees"] = 50;
      model.base.params["depth"] = 6;
      model.base.params["min_leaf"] = 5;
      return model;
    };
    const std::vector<MetaLearnerConfig> models = {
        forest_model("S-forest", CateFamily::kS),
        forest_model("T-forest", CateFamily::kT)};

    auto wins = [&](DgpName name, bool count_s) {
      int won = 0;
      for (int seed = 0; seed < 20; ++seed) {
        DgpSpec spec;
        spec.name = name;
        spec.n = 800;
        spec.randomized_p = 0.4;
        const SeedTree root(1000 + static_cast<std::uint64_t>(seed));
        const PreparedDgp prepared = prepare_dgp(spec, root);
        const ReplicationResult rep =
            run_replication(prepared, models, 0, root, BenchOptions{});
        if (rep.models[0].failed || rep.models[1].failed) continue;
        const bool s_better = rep.models[0].test_sqrt_pehe <= rep.models[1].test_sqrt_pehe;
        won += count_s ? s_better : !s_better;
      }
      return won;
    };

    const int simple_cate = wins(DgpName::kActg1, true);    // S should win
    const int complex_cate = wins(DgpName::kActg2, false);  // T should win
    const std::string detail =
        "simple-CATE dgp: S<=T in " + std::to_string(simple_cate) +
        "/20 seeds; complex-CATE dgp: T<=S in " + std::to_string(complex_cate) +
        "/20 seeds (both need >= 16)";
    const bool ok = simple_cate >= 16 && complex_cate >= 16;
    return {ok ? Status::kPass : Status::kFail, detail};
  } catch (const std::exception& e) {
    return {Status::kFail, e.what()};
  }
}

// --- criterion 6: oracle-equivalence suite ----------------------------------

Outcome criterion_oracles() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::string> suites = {
      "test_core",    "test_linear_knn",         "test_trees",
      "test_gp_logistic", "test_metrics_propensity", "test_meta_core",
      "test_meta_advanced", "test_dgp_bench"};
  const std::filesystem::path bin_dir = HTE_TEST_BIN_DIR;
  int ran = 0;
  for (const auto& suite : suites) {
    const auto path = bin_dir / suite;
    if (!std::filesystem::exists(path)) {
      return {Status::kFail, "missing suite binary " + path.string()};
    }
    const std::string command = path.string() + " > /dev/null 2>&1";
    if (std::system(command.c_str()) != 0) {
      return {Status::kFail, suite + " reported failures"};
    }
    ++ran;
  }
  const double elapsed = seconds_since(start);
  const std::string detail = std::to_string(ran) +
                             " oracle/unit suites green in " + fmt(elapsed, 1) +
                             "s (limit 60s)";
  return {elapsed < 60.0 ? Status::kPass : Status::kFail, detail};
}

// --- criterion 7: invariant suite -------------------------------------------

bool check_r_loss_identity(std::string& log) {
  Rng rng = SeedTree(700).child("rloss").stream();
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 20;
    Vector y(n), z(n), m(n), pi(n), tau(n);
    for (Index i = 0; i < n; ++i) {
      y[i] = rng.normal();
      z[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
      m[i] = rng.normal();
      pi[i] = rng.uniform(0.05, 0.95);
      tau[i] = rng.normal();
    }
    const RLearnerLossParts parts = r_learner_loss_parts(y, z, m, pi);
    double direct = 0.0, weighted = 0.0;
    for (Index i = 0; i < n; ++i) {
      const double d = parts.residual_outcome[i] - parts.residual_treatment[i] * tau[i];
      direct += d * d;
      const double p = parts.pseudo_target[i] - tau[i];
      weighted += parts.weights[i] * p * p;
    }
    if (std::abs(direct - weighted) > 1e-10 * std::max(1.0, std::abs(direct))) {
      log += " r-loss identity broke";
      return false;
    }
  }
  return true;
}

bool check_xweight_convexity(std::string& log) {
  Rng rng = SeedTree(701).child("xconv").stream();
  CausalDataset data;
  const Index n = 300;
  data.covariates.resize(n, 2);
  data.treatment.resize(n);
  data.outcome.resize(n);
  for (Index i = 0; i < n; ++i) {
    data.covariates(i, 0) = rng.normal();
    data.covariates(i, 1) = rng.normal();
    const double pi = 1.0 / (1.0 + std::exp(-data.covariates(i, 0)));
    data.treatment[i] = rng.bernoulli(pi) ? 1.0 : 0.0;
    data.outcome[i] = data.covariates(i, 0) +
                      (1.0 + 0.5 * data.covariates(i, 1)) * data.treatment[i] +
                      0.5 * rng.normal();
  }
  data.treatment[0] = 1.0;
  data.treatment[1] = 0.0;
  data.column_kinds = {ColumnKind::kContinuous, ColumnKind::kContinuous};
  data.column_names = {"a", "b"};

  PropensityOptions ps_options;
  Rng ps_rng = SeedTree(701).child("ps").stream();
  const PropensityFit ps = estimate_propensity(data, ps_options, ps_rng);
  LearnerSpec tree;
  tree.family = LearnerFamily::kTree;
  tree.params["depth"] = 3;
  const auto model = fit_x_learner(data, tree, &ps, XWeightMode::kPropensity);
  const auto& x = as_x_learner(*model);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix q(1, 2);
    q << rng.normal(), rng.normal();
    const double t0 = x.tau0().predict(q)[0];
    const double t1 = x.tau1().predict(q)[0];
    const double tau = predict_cate(*model, q)[0];
    if (tau < std::min(t0, t1) - 1e-12 || tau > std::max(t0, t1) + 1e-12) {
      log += " x-weight convexity broke";
      return false;
    }
  }
  return true;
}

bool check_pehe_translation(std::string& log) {
  Rng rng = SeedTree(702).child("pehe").stream();
  Vector a(40), b(40);
  for (Index i = 0; i < 40; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  const double base = pehe(a, b);
  for (const double c : {-10.0, -0.3, 0.7, 25.0}) {
    const double shifted = pehe(Vector(a.array() + c), Vector(b.array() + c));
    if (std::abs(shifted - base) > 1e-10 * std::max(1.0, base)) {
      log += " pehe translation invariance broke";
      return false;
    }
  }
  return true;
}

bool check_gp_gradient(std::string& log) {
  Rng rng = SeedTree(703).child("gp").stream();
  Matrix X(25, 2);
  Vector y(25);
  for (Index i = 0; i < 25; ++i) {
    X(i, 0) = rng.normal();
    X(i, 1) = rng.normal();
    y[i] = std::sin(X(i, 0)) + 0.3 * rng.normal();
  }
  const double step = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    Vector theta(3);
    theta << rng.uniform(std::log(0.3), std::log(3.0)),
        rng.uniform(std::log(0.3), std::log(3.0)),
        rng.uniform(std::log(0.01), std::log(1.0));
    const auto [value, grad] = gp_log_marginal(X, y, theta[0], theta[1], theta[2]);
    (void)value;
    for (int j = 0; j < 3; ++j) {
      Vector hi = theta, lo = theta;
      hi[j] += step;
      lo[j] -= step;
      const double numeric =
          (gp_log_marginal(X, y, hi[0], hi[1], hi[2]).first -
           gp_log_marginal(X, y, lo[0], lo[1], lo[2]).first) /
          (2.0 * step);
      const double denom = std::max({1e-8, std::abs(numeric), std::abs(grad[j])});
      if (std::abs(grad[j] - numeric) / denom > 1e-4) {
        log += " gp gradient check broke";
        return false;
      }
    }
  }
  return true;
}

bool check_shared_noise(std::string& log) {
  Rng rng = SeedTree(704).child("noise").stream();
  const Matrix X = synth_covariates(actg_schema(), 500, rng);
  for (int rep = 0; rep < 5; ++rep) {
    Rng r1 = SeedTree(704).child("s1", rep).stream();
    Rng r2 = SeedTree(704).child("s2", rep).stream();
    const SimTruth t1 = gen_actg_setup1(X, actg_column_names(), r1);
    const SimTruth t2 = gen_actg_setup2(X, actg_column_names(), r2);
    for (const auto* truth : {&t1, &t2}) {
      const double worst =
          ((truth->y1 - truth->y0) - truth->tau).cwiseAbs().maxCoeff();
      if (worst > 1e-12) {
        log += " shared-noise identity broke";
        return false;
      }
    }
  }
  return true;
}

bool check_parallel_byte_equality(std::string& log) {
  DgpSpec spec;
  spec.name = DgpName::kActg1;
  spec.n = 150;
  spec.randomized_p = 0.4;
  const SeedTree root(705);
  const PreparedDgp prepared = prepare_dgp(spec, root);
  const std::vector<MetaLearnerConfig> models = {
      ols_model("S-OLS", CateFamily::kS)};
  BenchOptions serial;
  serial.b = 6;
  serial.jobs = 1;
  BenchOptions parallel = serial;
  parallel.jobs = 8;
  const BenchmarkReport a = run_benchmark(prepared, models, serial, root);
  const BenchmarkReport b = run_benchmark(prepared, models, parallel, root);
  if (summary_csv_string(a) != summary_csv_string(b) ||
      replications_csv_string(a) != replications_csv_string(b)) {
    log += " parallel byte-equality broke";
    return false;
  }
  return true;
}

bool check_family_unbiasedness(std::string& log) {
  // Fully randomized constant effect, linear outcome: every family's mean
  // estimate stays within 3 Monte-Carlo standard errors of the truth.
  const double effect = 1.0;
  const int seeds = 20;
  const Index n = 2000;

  std::vector<MetaLearnerConfig> models;
  models.push_back(ols_model("S", CateFamily::kS));
  models.push_back(ols_model("T", CateFamily::kT));
  {
    MetaLearnerConfig x = ols_model("X", CateFamily::kX);
    x.weight_mode = XWeightMode::kPropensity;
    models.push_back(x);
  }
  {
    MetaLearnerConfig r = ols_model("R", CateFamily::kR);
    r.base.penalty = "ridge";
    r.base.params["lambda"] = 1e-4;
    models.push_back(r);
  }
  {
    MetaLearnerConfig mt = ols_model("MT", CateFamily::kMultitask);
    mt.family = CateFamily::kMultitask;
    mt.base.params["optimize"] = 0.0;
    mt.base.params["lengthscale"] = 1.5;
    mt.base.params["noise"] = 0.1;
    mt.use_ps = false;
    models.push_back(mt);
  }
  {
    MetaLearnerConfig tau = ols_model("TAU", CateFamily::kTau);
    tau.base.penalty = "ridge";
    tau.base.params["lambda"] = 1e-4;
    models.push_back(tau);
  }
  {
    MetaLearnerConfig cf = ols_model("CF", CateFamily::kCausalForest);
    cf.use_ps = false;
    cf.base.params["trees"] = 50;
    cf.base.params["depth"] = 1;  // shallow partitions keep leaf effects honest
    cf.base.params["min_leaf"] = 50;
    models.push_back(cf);
  }

  std::vector<std::vector<double>> means(models.size());
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng = SeedTree(710).child("data", seed).stream();
    CausalDataset data;
    data.covariates.resize(n, 2);
    data.treatment.resize(n);
    data.outcome.resize(n);
    for (Index i = 0; i < n; ++i) {
      data.covariates(i, 0) = rng.normal();
      data.covariates(i, 1) = rng.normal();
      data.treatment[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
      data.outcome[i] = data.covariates(i, 0) - 0.5 * data.covariates(i, 1) +
                        effect * data.treatment[i] + 0.5 * rng.normal();
    }
    data.treatment[0] = 1.0;
    data.treatment[1] = 0.0;
    data.column_kinds = {ColumnKind::kContinuous, ColumnKind::kContinuous};
    data.column_names = {"a", "b"};

    PropensityOptions ps_options;
    Rng ps_rng = SeedTree(710).child("ps", seed).stream();
    const PropensityFit ps = estimate_propensity(data, ps_options, ps_rng);
    for (std::size_t m = 0; m < models.size(); ++m) {
      const SeedTree node = SeedTree(710).child("fit", seed).child("model", m);
      const CateModelPtr fitted = fit_cate_model(models[m], data, &ps, node);
      means[m].push_back(predict_cate(*fitted, data.covariates).mean());
    }
  }

  bool ok = true;
  for (std::size_t m = 0; m < models.size(); ++m) {
    double mean = 0.0;
    for (const double v : means[m]) mean += v;
    mean /= seeds;
    double ss = 0.0;
    for (const double v : means[m]) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (seeds - 1)) / std::sqrt(double(seeds));
    if (std::abs(mean - effect) > 3.0 * se) {
      log += " " + models[m].name + " mean=" + fmt(mean, 4) +
             " se=" + fmt(se, 4) + " missed 3-se band";
      ok = false;
    }
  }
  return ok;
}

Outcome criterion_invariants() {
  const auto start = std::chrono::steady_clock::now();
  std::string log;
  bool ok = true;
  try {
    ok &= check_r_loss_identity(log);
    ok &= check_xweight_convexity(log);
    ok &= check_pehe_translation(log);
    ok &= check_gp_gradient(log);
    ok &= check_shared_noise(log);
    ok &= check_parallel_byte_equality(log);
    ok &= check_family_unbiasedness(log);
  } catch (const std::exception& e) {
    return {Status::kFail, e.what()};
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 300.0) {
    ok = false;
    log += " runtime limit exceeded";
  }
  std::string detail = "r-loss identity, x-weight convexity, pehe translation, "
                       "gp gradient, shared noise, parallel byte-equality, "
                       "7-family unbiasedness in " + fmt(elapsed, 1) + "s";
  if (!ok) detail += ";" + log;
  return {ok ? Status::kPass : Status::kFail, detail};
}

}  // namespace

int main() {
  const bool have_actg = find_csv("actg175.csv").has_value();
  const bool have_ihdp = find_csv("ihdp.csv").has_value();

  const Outcome c1 = criterion_actg1();
  report(1, "ACTG setup1 reproduction (S-OLS 0.300, T-OLS 0.601)", c1);
  const Outcome c2 = criterion_actg2();
  report(2, "ACTG setup2 reproduction (S-OLS 1.67, T-OLS 1.31, T<S)", c2);
  const Outcome c3 = criterion_ihdp();
  report(3, "IHDP reproduction (S-OLS 4.78, T-OLS 2.02, 747=139+608)", c3);
  const Outcome c4 = criterion_att_pin();
  report(4, "treated-mean true CATE pinned at 4 across 1000 replications", c4);
  const Outcome c5 = criterion_taxonomy();
  report(5, "taxonomy property: S wins on simple CATE, T wins on complex CATE", c5);
  const Outcome c6 = criterion_oracles();
  report(6, "oracle-equivalence suite", c6);
  const Outcome c7 = criterion_invariants();
  report(7, "invariant suite", c7);

  Outcome c8;
  const bool core_green = c4.status == Status::kPass && c5.status == Status::kPass &&
                          c6.status == Status::kPass && c7.status == Status::kPass;
  if (have_actg && have_ihdp) {
    c8.status = core_green ? Status::kPass : Status::kFail;
    c8.detail = "external data present; criteria 4-7 ran on it where applicable";
  } else {
    const bool skipped_cleanly =
        (have_actg || (c1.status == Status::kSkip && c2.status == Status::kSkip)) &&
        (have_ihdp || c3.status == Status::kSkip);
    c8.status = (core_green && skipped_cleanly) ? Status::kPass : Status::kFail;
    c8.detail = "no external CSVs: criteria 4-7 ran on synthetic covariates, "
                "criteria 1-3 skipped with an explicit notice";
  }
  report(8, "no-data fallback", c8);

  std::cout << (failures == 0 ? "ACCEPTANCE: all criteria green"
                              : "ACCEPTANCE: " + std::to_string(failures) +
                                    " criterion(s) failed")
            << "\n";
  return failures;
}
