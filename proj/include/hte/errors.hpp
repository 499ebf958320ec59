#pragma once

#include <stdexcept>
#include <string>

namespace hte {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidArgumentError : Error {
  using Error::Error;
};

/// A continuous column has zero variance and cannot be standardized.
struct DegenerateColumnError : Error {
  using Error::Error;
};

/// Unpenalized design matrix is rank deficient after intercept augmentation.
struct SingularDesignError : Error {
  using Error::Error;
};

/// Kernel matrix failed to factorize even after jitter escalation.
struct IllConditionedKernelError : Error {
  using Error::Error;
};

/// Cross-fitting folds cannot be stratified so that every training
/// complement contains both treatment arms.
struct StratificationError : Error {
  using Error::Error;
};

struct ArmTooSmallError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  using Error::Error;
};

/// Column-name or file-schema mismatch.
struct SchemaError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

}  // namespace hte
