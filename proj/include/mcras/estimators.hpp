#pragma once

#include <cstdint>
#include <vector>

#include "mcras/distributions.hpp"
#include "mcras/plan.hpp"
#include "mcras/rng.hpp"

namespace mcras {

struct Estimate {
  double value;
  SamplingPlan plan;
  std::int64_t draws_consumed;  // always plan.total
};

struct EstimatorConfig {
  EstimatorKind kind;
  Accuracy accuracy;
  RelativeSpread spread;
  std::uint64_t seed;
};

// Mean of exactly k fresh draws, compensated summation. Non-finite draws
// are rejected.
double sample_mean(const SampleSource& src, std::int64_t k, RngStream& rng);

// Middle order statistic; length must be odd, entries finite.
double median(std::vector<double> values);

// One group mean per group; group i draws from stream (seed, i), so a
// group's draws depend only on (seed, i, group_size).
std::vector<double> group_means(const SampleSource& src,
                                const SamplingPlan& plan, std::uint64_t seed);

// One draw of the scaler R ~ Uniform[1-eps, 1+eps].
double uniform_scaler(RngStream& rng, double epsilon);

// Median of the group means.
Estimate mom_estimate(const SampleSource& src, const SamplingPlan& plan,
                      std::uint64_t seed);

// Median of group means each multiplied by an independent uniform scaler.
// Scaler i draws from stream (seed, num_groups + i), disjoint from every
// X stream, so changing epsilon never changes the group means. The plan
// must have been built for acc.epsilon. unit_scalers pins every scaler to
// 1, reducing the estimator to mom_estimate on the same draws (degenerate
// hook for tests).
Estimate scaled_median_estimate(const SampleSource& src,
                                const SamplingPlan& plan, Accuracy acc,
                                std::uint64_t seed, bool unit_scalers = false);

// Plans via plan_for(config.kind, ...) and runs the matching kernel.
Estimate estimate(const EstimatorConfig& config, const SampleSource& src);

}  // namespace mcras
