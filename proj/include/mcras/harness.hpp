#pragma once

#include <cstdint>
#include <vector>

#include "mcras/distributions.hpp"
#include "mcras/estimators.hpp"

namespace mcras {

struct TrialRecord {
  std::int64_t trial_index;
  double estimate;
  double rel_error;  // estimate / true mean - 1
  bool failed;       // |rel_error| > epsilon
};

struct FailureRateReport {
  std::int64_t trials;
  std::int64_t failures;
  double empirical_rate;
  // Exact binomial 99% upper confidence bound on the true failure
  // probability; >= empirical_rate.
  double cp99_upper;
  std::int64_t draws_per_trial;
  double wall_time_seconds;
};

struct ExperimentConfig {
  EstimatorKind kind;
  Accuracy accuracy;
  RelativeSpread spread;
  DistributionSpec distribution;  // must carry an exact mean
  std::int64_t trials;
  std::uint64_t master_seed;
  int threads = 1;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;  // indexed by trial
  FailureRateReport report;
};

// Seed for one trial; pure in (master_seed, trial_index), so trials can run
// in any order or in parallel without changing any draw.
std::uint64_t trial_seed(std::uint64_t master_seed, std::int64_t trial_index);

// Runs config.trials independent estimates and aggregates failure counts.
// Results are identical for every thread count: records are written into
// preassigned slots and aggregation is order-independent.
ExperimentResult run_experiment(const ExperimentConfig& config);

}  // namespace mcras
