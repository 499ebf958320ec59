#pragma once

#include <string>
#include <vector>

#include "hte/dgp.hpp"
#include "hte/meta_learners.hpp"
#include "hte/propensity.hpp"
#include "hte/rng.hpp"
#include "hte/split.hpp"
#include "hte/standardize.hpp"

namespace hte {

/// A materialized DGP: covariates standardized on the analysis sample and
/// a treatment vector, both held fixed across replications. Only the
/// outcome surface is redrawn per replication.
struct PreparedDgp {
  DgpName name = DgpName::kSynthetic;
  CausalDataset base;  // outcome column is all zeros
  Standardizer transform;
};

PreparedDgp prepare_dgp(const DgpSpec& spec, const SeedTree& root);

/// Draws one outcome surface on the prepared sample.
SimTruth simulate_outcomes(const PreparedDgp& prepared, Rng& rng);

struct ModelRunResult {
  std::string model;
  double train_sqrt_pehe = 0.0;
  double test_sqrt_pehe = 0.0;
  bool failed = false;
  std::string error;
};

struct ReplicationResult {
  int rep = 0;
  std::string seed_path;
  std::vector<ModelRunResult> models;
};

struct ModelSummary {
  std::string name;
  double train_mean = 0.0;
  double train_ci = 0.0;  // 1.96 * sd / sqrt(b)
  double test_mean = 0.0;
  double test_ci = 0.0;
  int ok = 0;
  int failures = 0;
};

struct BenchmarkReport {
  std::string dgp;
  int b = 0;
  std::uint64_t master_seed = 0;
  std::string config_digest;
  std::vector<ModelSummary> models;  // in configuration order
  std::vector<ReplicationResult> replications;
};

struct BenchOptions {
  int b = 200;
  double train_fraction = 0.7;
  int jobs = 1;
  PropensityOptions propensity;
};

/// One replication: simulate outcomes, split 70/30, fit every model on the
/// training split, score sqrt(PEHE) on both splits against the true CATE.
/// Every random draw derives from root.child("rep", rep_index), so
/// replications are independent of execution order. Per-model failures are
/// recorded and the replication continues.
ReplicationResult run_replication(const PreparedDgp& prepared,
                                  const std::vector<MetaLearnerConfig>& models,
                                  int rep_index, const SeedTree& root,
                                  const BenchOptions& options);

/// B replications, optionally across threads; aggregation is ordered by
/// replication index, so reports are identical for any job count.
BenchmarkReport run_benchmark(const PreparedDgp& prepared,
                              const std::vector<MetaLearnerConfig>& models,
                              const BenchOptions& options,
                              const SeedTree& root);

// Serialization: every file carries '# config_digest=... / # master_seed=...'
// comment lines ahead of the header row.
std::string summary_csv_string(const BenchmarkReport& report);
std::string replications_csv_string(const BenchmarkReport& report);
std::string report_md_string(const BenchmarkReport& report);
void write_benchmark_outputs(const BenchmarkReport& report,
                             const std::string& directory);

}  // namespace hte
