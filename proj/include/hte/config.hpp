#pragma once

#include <string>
#include <vector>

#include "hte/dgp.hpp"
#include "hte/meta_learners.hpp"
#include "hte/propensity.hpp"

namespace hte {

/// Parsed run configuration (INI-style sections, strict key whitelist).
struct RunConfig {
  DgpSpec dgp;
  std::vector<MetaLearnerConfig> models;
  int b = 200;
  std::uint64_t seed = 0;
  int jobs = 0;  // 0 = unset (fall back to HTE_LAB_JOBS, then 1)
  std::string output_dir = ".";
  PropensityOptions propensity;

  // Column designations for `fit` on a raw CSV.
  std::string data_treatment_column = "treatment";
  std::string data_outcome_column = "outcome";

  std::string digest;  // content hash of the config text
};

/// Throws SchemaError naming the offending key and line on any unknown
/// section or key.
RunConfig parse_run_config(const std::string& text, const std::string& origin);
RunConfig load_run_config(const std::string& path);

/// FNV-1a (64-bit) rendered as 16 hex characters.
std::string fnv1a_digest(const std::string& text);

}  // namespace hte
