// hte_lab: benchmark harness and CATE-estimation front end.
//
//   hte_lab bench    --config cfg.ini [--b N] [--seed S] [--jobs J]
//   hte_lab fit      --config cfg.ini --data data.csv [--out DIR]
//   hte_lab diagnose --data data.csv --treatment COL [--outcome COL]
//
// Exit codes: 0 success, 1 configuration/schema error, 2 at least one
// model fit failed (partial results still written).

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hte/bench.hpp"
#include "hte/config.hpp"
#include "hte/csv.hpp"
#include "hte/errors.hpp"
#include "hte/metrics.hpp"
#include "hte/standardize.hpp"

namespace {

using namespace hte;

int jobs_or_fallback(int flag_jobs, int config_jobs) {
  if (flag_jobs > 0) return flag_jobs;
  if (config_jobs > 0) return config_jobs;
  if (const char* env = std::getenv("HTE_LAB_JOBS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  return 1;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write '" + path.string() + "'");
  out << text;
}

std::vector<std::string> output_comments(const std::string& digest,
                                         std::uint64_t seed) {
  return {"config_digest=" + (digest.empty() ? "none" : digest),
          "master_seed=" + std::to_string(seed)};
}

int cmd_bench(const std::string& config_path, int b_override,
              std::int64_t seed_override, int jobs_override) {
  RunConfig config;
  try {
    config = load_run_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  if (config.models.empty()) {
    std::cerr << "config error: no [model ...] sections\n";
    return 1;
  }
  if (b_override > 0) config.b = b_override;
  if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);

  try {
    const SeedTree root(config.seed);
    const PreparedDgp prepared = prepare_dgp(config.dgp, root);

    BenchOptions options;
    options.b = config.b;
    options.jobs = jobs_or_fallback(jobs_override, config.jobs);
    options.propensity = config.propensity;

    BenchmarkReport report = run_benchmark(prepared, config.models, options, root);
    report.config_digest = config.digest;
    write_benchmark_outputs(report, config.output_dir);

    int failures = 0;
    for (const auto& model : report.models) failures += model.failures;
    std::cout << "wrote " << config.output_dir << "/summary.csv ("
              << report.models.size() << " models, B=" << report.b << ")\n";
    if (failures > 0) {
      std::cerr << failures << " model fits failed; see replications.csv\n";
      return 2;
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_fit(const std::string& config_path, const std::string& data_path,
            const std::string& out_dir, std::int64_t seed_override) {
  RunConfig config;
  try {
    config = load_run_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  if (config.models.empty()) {
    std::cerr << "config error: no [model ...] sections\n";
    return 1;
  }
  if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);

  CausalDataset data;
  try {
    const CsvTable table = read_csv(data_path);
    data = dataset_from_csv(table, config.data_treatment_column,
                            config.data_outcome_column);
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 1;
  }

  try {
    const auto standardized = standardize_covariates(data);
    const CausalDataset& fit_data = standardized.data;
    const SeedTree root(config.seed);

    Rng ps_rng = derive_stream(root, "propensity");
    const PropensityFit ps =
        estimate_propensity(fit_data, config.propensity, ps_rng);

    struct FittedColumn {
      std::string name;
      Vector tau;
    };
    std::vector<FittedColumn> columns;
    int failures = 0;
    for (std::size_t m = 0; m < config.models.size(); ++m) {
      const auto& model_config = config.models[m];
      try {
        const SeedTree node = root.child("model", m);
        const CateModelPtr model =
            fit_cate_model(model_config, fit_data, &ps, node);
        columns.push_back(
            {model_config.name, predict_cate(*model, fit_data.covariates)});
      } catch (const std::exception& e) {
        std::cerr << "model '" << model_config.name << "' failed: " << e.what()
                  << "\n";
        ++failures;
      }
    }

    std::filesystem::create_directories(out_dir);
    const auto comments = output_comments(config.digest, config.seed);

    std::vector<std::string> header = {"unit"};
    for (const auto& column : columns) header.push_back(column.name);
    std::vector<std::vector<std::string>> rows;
    for (Index i = 0; i < fit_data.n(); ++i) {
      std::vector<std::string> row = {std::to_string(i)};
      for (const auto& column : columns) row.push_back(format_double(column.tau[i]));
      rows.push_back(std::move(row));
    }
    write_csv((std::filesystem::path(out_dir) / "cate_estimates.csv").string(),
              comments, header, rows);

    std::vector<std::vector<std::string>> comparison_rows;
    for (std::size_t a = 0; a < columns.size(); ++a) {
      for (std::size_t b = a + 1; b < columns.size(); ++b) {
        const CateComparison cmp =
            compare_cate_estimates(columns[a].tau, columns[b].tau);
        comparison_rows.push_back(
            {columns[a].name, columns[b].name, format_double(cmp.pearson),
             format_double(cmp.spearman), format_double(cmp.sd_a),
             format_double(cmp.sd_b), format_double(cmp.mean_a),
             format_double(cmp.mean_b)});
      }
    }
    write_csv((std::filesystem::path(out_dir) / "comparison.csv").string(),
              comments,
              {"model_a", "model_b", "pearson", "spearman", "sd_a", "sd_b",
               "mean_a", "mean_b"},
              comparison_rows);

    std::cout << "wrote " << out_dir << "/cate_estimates.csv ("
              << columns.size() << " models, " << fit_data.n() << " units)\n";
    return failures > 0 ? 2 : 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_diagnose(const std::string& data_path, const std::string& treatment,
                 const std::string& outcome, const std::string& out_dir,
                 std::int64_t seed_flag) {
  const std::uint64_t seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : 0;
  try {
    const CsvTable table = read_csv(data_path);
    const CausalDataset data = dataset_from_csv(table, treatment, outcome);
    const auto standardized = standardize_covariates(data);

    PropensityOptions options;
    Rng rng = derive_stream(SeedTree(seed), "diagnose");
    const PropensityFit ps =
        estimate_propensity(standardized.data, options, rng);
    const OverlapReport report =
        overlap_diagnostics(ps.pi_hat, standardized.data.treatment);

    std::filesystem::create_directories(out_dir);
    const auto comments = output_comments("none", seed);

    std::vector<std::vector<std::string>> hist_rows;
    for (std::size_t b = 0; b + 1 < static_cast<std::size_t>(report.bin_edges.size());
         ++b) {
      hist_rows.push_back({format_double(report.bin_edges[static_cast<Index>(b)]),
                           format_double(report.bin_edges[static_cast<Index>(b + 1)]),
                           std::to_string(report.treated_counts[b]),
                           std::to_string(report.control_counts[b])});
    }
    write_csv((std::filesystem::path(out_dir) / "overlap_hist.csv").string(),
              comments, {"bin_low", "bin_high", "count_treated", "count_control"},
              hist_rows);

    std::vector<std::vector<std::string>> flagged_rows;
    for (const Index unit : report.flagged) {
      flagged_rows.push_back({std::to_string(unit), format_double(ps.pi_hat[unit])});
    }
    write_csv((std::filesystem::path(out_dir) / "overlap_flagged.csv").string(),
              comments, {"unit", "pi_hat"}, flagged_rows);

    std::cout << "overlap_coefficient=" << format_double(report.overlap_coefficient)
              << " flagged=" << report.flagged.size() << " of "
              << standardized.data.n() << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous-treatment-effect estimation toolkit"};
  app.require_subcommand(1);

  std::string config_path, data_path, out_dir = ".", treatment, outcome;
  int b_override = 0, jobs_override = 0;
  std::int64_t seed_override = -1;

  auto* bench = app.add_subcommand("bench", "Run a Monte-Carlo benchmark");
  bench->add_option("--config", config_path, "Run configuration")->required();
  bench->add_option("--b", b_override, "Override replication count");
  bench->add_option("--seed", seed_override, "Override master seed");
  bench->add_option("--jobs", jobs_override, "Worker threads");

  auto* fit = app.add_subcommand("fit", "Fit configured models on a CSV");
  fit->add_option("--config", config_path, "Run configuration")->required();
  fit->add_option("--data", data_path, "Input CSV")->required();
  fit->add_option("--out", out_dir, "Output directory");
  fit->add_option("--seed", seed_override, "Override master seed");

  auto* diagnose = app.add_subcommand("diagnose", "Propensity overlap report");
  diagnose->add_option("--data", data_path, "Input CSV")->required();
  diagnose->add_option("--treatment", treatment, "Treatment column")->required();
  diagnose->add_option("--outcome", outcome, "Outcome column to exclude");
  diagnose->add_option("--out", out_dir, "Output directory");
  diagnose->add_option("--seed", seed_override, "Seed for fold assignment");

  CLI11_PARSE(app, argc, argv);

  if (bench->parsed()) {
    return cmd_bench(config_path, b_override, seed_override, jobs_override);
  }
  if (fit->parsed()) {
    return cmd_fit(config_path, data_path, out_dir, seed_override);
  }
  return cmd_diagnose(data_path, treatment, outcome, out_dir, seed_override);
}
