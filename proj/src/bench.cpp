#include "hte/bench.hpp"

#include <atomic>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "hte/csv.hpp"
#include "hte/errors.hpp"
#include "hte/metrics.hpp"

namespace hte {
namespace {

struct RawTable {
  Matrix X;
  std::vector<std::string> names;
  std::vector<ColumnKind> kinds;
  Vector treatment;  // empty until assigned
};

RawTable load_covariates(const DgpSpec& spec, const SeedTree& root) {
  RawTable raw;
  if (!spec.csv_path.empty()) {
    const CsvTable table = read_csv(spec.csv_path);
    std::vector<Index> keep;
    for (Index j = 0; j < table.cols(); ++j) {
      if (!spec.treatment_column.empty() &&
          table.header[static_cast<std::size_t>(j)] == spec.treatment_column) {
        continue;
      }
      keep.push_back(j);
    }
    raw.X.resize(table.rows(), static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      raw.X.col(static_cast<Index>(k)) = table.values.col(keep[k]);
      raw.names.push_back(table.header[static_cast<std::size_t>(keep[k])]);
      bool binary = true;
      for (Index i = 0; i < table.rows() && binary; ++i) {
        const double v = table.values(i, keep[k]);
        binary = (v == 0.0 || v == 1.0);
      }
      raw.kinds.push_back(binary ? ColumnKind::kBinary : ColumnKind::kContinuous);
    }
    if (spec.treatment_source == TreatmentSource::kFromData) {
      if (spec.treatment_column.empty()) {
        throw InvalidArgumentError("prepare_dgp: from_data treatment needs a column name");
      }
      raw.treatment = table.values.col(table.column_index(spec.treatment_column));
    }
    return raw;
  }

  if (spec.treatment_source == TreatmentSource::kFromData) {
    throw InvalidArgumentError("prepare_dgp: from_data treatment needs a csv source");
  }
  switch (spec.name) {
    case DgpName::kIhdpB:
      raw.kinds = ihdp_schema();
      raw.names = ihdp_column_names();
      break;
    case DgpName::kActg1:
    case DgpName::kActg2:
      raw.kinds = actg_schema();
      raw.names = actg_column_names();
      break;
    case DgpName::kSynthetic:
      raw.kinds = synthetic_schema();
      raw.names = synthetic_column_names();
      break;
  }
  Rng rng = derive_stream(root, "covariates");
  const Vector bernoulli_p =
      Vector::Constant(static_cast<Index>(raw.kinds.size()), spec.binary_p);
  raw.X = synth_covariates(raw.kinds, spec.n, rng, &bernoulli_p);
  return raw;
}

void validate_schema(const DgpSpec& spec, const RawTable& raw) {
  switch (spec.name) {
    case DgpName::kIhdpB:
      if (raw.X.cols() != 25) {
        throw SchemaError("prepare_dgp: ihdp_b needs exactly 25 covariates, got " +
                          std::to_string(raw.X.cols()));
      }
      break;
    case DgpName::kActg1:
    case DgpName::kActg2:
      for (const auto& name : actg_column_names()) {
        bool found = false;
        for (const auto& have : raw.names) found = found || have == name;
        if (!found) {
          throw SchemaError("prepare_dgp: trial schema misses column '" + name + "'");
        }
      }
      break;
    case DgpName::kSynthetic:
      break;
  }
}

/// Reference prognostic score on provisionally standardized covariates,
/// used only to steer targeted treatment draws.
Vector reference_mu(const DgpSpec& spec, const RawTable& raw,
                    const SeedTree& root) {
  CausalDataset shell;
  shell.covariates = raw.X;
  shell.column_kinds = raw.kinds;
  shell.column_names = raw.names;
  shell.treatment = Vector::Zero(raw.X.rows());
  shell.outcome = Vector::Zero(raw.X.rows());
  const Matrix standardized =
      Standardizer::fit(shell).transform(raw.X);
  Rng rng = derive_stream(root, "treatment-surface");
  switch (spec.name) {
    case DgpName::kIhdpB:
      return gen_ihdp_surface_b(standardized,
                                Vector::Ones(standardized.rows()), rng)
          .mu0;
    case DgpName::kActg1:
      return gen_actg_setup1(standardized, raw.names, rng).mu0;
    case DgpName::kActg2:
      return gen_actg_setup2(standardized, raw.names, rng).mu0;
    case DgpName::kSynthetic:
      return gen_synthetic_linear(standardized, rng).mu0;
  }
  throw InvalidArgumentError("prepare_dgp: unknown dgp");
}

}  // namespace

PreparedDgp prepare_dgp(const DgpSpec& spec, const SeedTree& root) {
  RawTable raw = load_covariates(spec, root);
  validate_schema(spec, raw);

  if (raw.treatment.size() == 0) {
    TreatmentRule rule;
    rule.mode = spec.treatment_source;
    rule.p = spec.randomized_p;
    rule.a = spec.targeted_a;
    rule.b = spec.targeted_b;
    const Vector mu = rule.mode == TreatmentSource::kTargeted
                          ? reference_mu(spec, raw, root)
                          : Vector();
    Rng rng = derive_stream(root, "treatment");
    raw.treatment = gen_treatment(raw.X, mu, rule, rng);
  }

  CausalDataset data;
  data.covariates = std::move(raw.X);
  data.treatment = std::move(raw.treatment);
  data.outcome = Vector::Zero(data.covariates.rows());
  data.column_kinds = std::move(raw.kinds);
  data.column_names = std::move(raw.names);
  data.validate();

  if (spec.drop_rule) data = make_observational(data, *spec.drop_rule);
  for (const auto& column : spec.drop_columns) {
    data = data.without_column(column);
  }
  validate_schema(spec, {data.covariates, data.column_names, data.column_kinds, {}});

  PreparedDgp prepared;
  prepared.name = spec.name;
  auto standardized = standardize_covariates(data);
  prepared.base = std::move(standardized.data);
  prepared.transform = std::move(standardized.transform);
  return prepared;
}

SimTruth simulate_outcomes(const PreparedDgp& prepared, Rng& rng) {
  switch (prepared.name) {
    case DgpName::kIhdpB:
      return gen_ihdp_surface_b(prepared.base.covariates,
                                prepared.base.treatment, rng);
    case DgpName::kActg1:
      return gen_actg_setup1(prepared.base.covariates,
                             prepared.base.column_names, rng);
    case DgpName::kActg2:
      return gen_actg_setup2(prepared.base.covariates,
                             prepared.base.column_names, rng);
    case DgpName::kSynthetic:
      return gen_synthetic_linear(prepared.base.covariates, rng);
  }
  throw InvalidArgumentError("simulate_outcomes: unknown dgp");
}

ReplicationResult run_replication(const PreparedDgp& prepared,
                                  const std::vector<MetaLearnerConfig>& models,
                                  int rep_index, const SeedTree& root,
                                  const BenchOptions& options) {
  const SeedTree rep_node = root.child("rep", static_cast<std::uint64_t>(rep_index));
  ReplicationResult result;
  result.rep = rep_index;
  result.seed_path = rep_node.path();
  result.models.resize(models.size());
  for (std::size_t m = 0; m < models.size(); ++m) {
    result.models[m].model = models[m].name;
  }

  auto fail_all = [&](const std::string& message) {
    for (auto& model : result.models) {
      model.failed = true;
      model.error = message;
    }
  };

  try {
    Rng outcome_rng = derive_stream(rep_node, "outcome");
    const SimTruth truth = simulate_outcomes(prepared, outcome_rng);
    truth.validate();

    CausalDataset data = prepared.base;
    data.outcome = truth.observed_outcome(data.treatment);

    Rng split_rng = derive_stream(rep_node, "split");
    const SplitIndices split =
        split_train_test(data.n(), options.train_fraction, split_rng);
    const CausalDataset train = data.select_rows(split.train);
    const Matrix& x_train = train.covariates;
    const Matrix x_test = slice_rows(data.covariates, split.test);
    const Vector tau_train = slice(truth.tau, split.train);
    const Vector tau_test = slice(truth.tau, split.test);

    bool needs_ps = false;
    for (const auto& model : models) {
      needs_ps = needs_ps || model.use_ps || model.family == CateFamily::kTau ||
                 (model.family == CateFamily::kX &&
                  model.weight_mode == XWeightMode::kPropensity);
    }
    PropensityFit ps;
    bool have_ps = false;
    std::string ps_error;
    if (needs_ps) {
      try {
        Rng ps_rng = derive_stream(rep_node, "propensity");
        ps = estimate_propensity(train, options.propensity, ps_rng);
        have_ps = true;
      } catch (const std::exception& e) {
        ps_error = e.what();
      }
    }

    for (std::size_t m = 0; m < models.size(); ++m) {
      auto& out = result.models[m];
      const auto& config = models[m];
      const bool wants_ps = config.use_ps ||
                            config.family == CateFamily::kTau ||
                            (config.family == CateFamily::kX &&
                             config.weight_mode == XWeightMode::kPropensity);
      if (wants_ps && !have_ps) {
        out.failed = true;
        out.error = "propensity estimation failed: " + ps_error;
        continue;
      }
      try {
        const SeedTree model_node = rep_node.child("model", m);
        const CateModelPtr fitted =
            fit_cate_model(config, train, have_ps ? &ps : nullptr, model_node);
        out.train_sqrt_pehe = std::sqrt(pehe(fitted->predict(x_train), tau_train));
        out.test_sqrt_pehe = std::sqrt(pehe(fitted->predict(x_test), tau_test));
      } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
      }
    }
  } catch (const std::exception& e) {
    fail_all(e.what());
  }
  return result;
}

BenchmarkReport run_benchmark(const PreparedDgp& prepared,
                              const std::vector<MetaLearnerConfig>& models,
                              const BenchOptions& options,
                              const SeedTree& root) {
  if (options.b < 2) throw InvalidArgumentError("run_benchmark: need B >= 2");
  BenchmarkReport report;
  report.dgp = to_string(prepared.name);
  report.b = options.b;
  report.master_seed = root.master_seed();
  report.replications.resize(static_cast<std::size_t>(options.b));

  const int jobs = std::max(1, std::min(options.b, options.jobs));
  std::atomic<int> next{0};
  auto worker = [&]() {
    while (true) {
      const int rep = next.fetch_add(1);
      if (rep >= options.b) break;
      report.replications[static_cast<std::size_t>(rep)] =
          run_replication(prepared, models, rep, root, options);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }

  for (std::size_t m = 0; m < models.size(); ++m) {
    ModelSummary summary;
    summary.name = models[m].name;
    double train_sum = 0.0, test_sum = 0.0;
    for (const auto& rep : report.replications) {
      const auto& run = rep.models[m];
      if (run.failed) {
        ++summary.failures;
        continue;
      }
      ++summary.ok;
      train_sum += run.train_sqrt_pehe;
      test_sum += run.test_sqrt_pehe;
    }
    if (summary.ok > 0) {
      summary.train_mean = train_sum / summary.ok;
      summary.test_mean = test_sum / summary.ok;
      double train_ss = 0.0, test_ss = 0.0;
      for (const auto& rep : report.replications) {
        const auto& run = rep.models[m];
        if (run.failed) continue;
        train_ss += (run.train_sqrt_pehe - summary.train_mean) *
                    (run.train_sqrt_pehe - summary.train_mean);
        test_ss += (run.test_sqrt_pehe - summary.test_mean) *
                   (run.test_sqrt_pehe - summary.test_mean);
      }
      if (summary.ok > 1) {
        const double scale = 1.96 / std::sqrt(static_cast<double>(summary.ok));
        summary.train_ci = scale * std::sqrt(train_ss / (summary.ok - 1));
        summary.test_ci = scale * std::sqrt(test_ss / (summary.ok - 1));
      }
    }
    report.models.push_back(std::move(summary));
  }
  return report;
}

namespace {

std::string header_comments(const BenchmarkReport& report) {
  std::string out;
  out += "# config_digest=" + (report.config_digest.empty() ? "none" : report.config_digest) + "\n";
  out += "# master_seed=" + std::to_string(report.master_seed) + "\n";
  return out;
}

std::string fixed3(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

}  // namespace

std::string summary_csv_string(const BenchmarkReport& report) {
  std::string out = header_comments(report);
  out += "model,split,mean_sqrt_pehe,ci_halfwidth,b,failures\n";
  for (const auto& model : report.models) {
    out += model.name + ",train," + format_double(model.train_mean) + "," +
           format_double(model.train_ci) + "," + std::to_string(model.ok) +
           "," + std::to_string(model.failures) + "\n";
    out += model.name + ",test," + format_double(model.test_mean) + "," +
           format_double(model.test_ci) + "," + std::to_string(model.ok) +
           "," + std::to_string(model.failures) + "\n";
  }
  return out;
}

std::string replications_csv_string(const BenchmarkReport& report) {
  std::string out = header_comments(report);
  out += "model,rep,split,sqrt_pehe\n";
  for (const auto& rep : report.replications) {
    for (const auto& run : rep.models) {
      if (run.failed) continue;
      out += run.model + "," + std::to_string(rep.rep) + ",train," +
             format_double(run.train_sqrt_pehe) + "\n";
      out += run.model + "," + std::to_string(rep.rep) + ",test," +
             format_double(run.test_sqrt_pehe) + "\n";
    }
  }
  return out;
}

std::string report_md_string(const BenchmarkReport& report) {
  std::string out;
  out += "<!-- config_digest=" +
         (report.config_digest.empty() ? "none" : report.config_digest) +
         " master_seed=" + std::to_string(report.master_seed) + " -->\n";
  out += "# Benchmark: " + report.dgp + "\n\n";
  out += "B = " + std::to_string(report.b) + " replications, 70/30 split.\n\n";
  out += "| Model | Train sqrt(PEHE) | Test sqrt(PEHE) | Failures |\n";
  out += "|-------|------------------|-----------------|----------|\n";
  for (const auto& model : report.models) {
    out += "| " + model.name + " | " + fixed3(model.train_mean) + " ± " +
           fixed3(model.train_ci) + " | " + fixed3(model.test_mean) + " ± " +
           fixed3(model.test_ci) + " | " + std::to_string(model.failures) +
           " |\n";
  }
  return out;
}

void write_benchmark_outputs(const BenchmarkReport& report,
                             const std::string& directory) {
  std::filesystem::create_directories(directory);
  const auto write = [&](const std::string& file, const std::string& text) {
    std::ofstream out(std::filesystem::path(directory) / file, std::ios::binary);
    if (!out) throw SchemaError("cannot write '" + file + "' in " + directory);
    out << text;
  };
  write("summary.csv", summary_csv_string(report));
  write("replications.csv", replications_csv_string(report));
  write("report.md", report_md_string(report));
}

}  // namespace hte
