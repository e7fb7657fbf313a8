#include "mcras/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcras/numeric.hpp"

namespace mcras {

double sample_mean(const SampleSource& src, std::int64_t k, RngStream& rng) {
  if (k < 1) {
    throw std::domain_error("sample_mean needs k >= 1");
  }
  CompensatedSum sum;
  for (std::int64_t i = 0; i < k; ++i) {
    double draw = src.next_draw(rng);
    if (!std::isfinite(draw)) {
      throw std::domain_error("source produced a non-finite draw");
    }
    sum.add(draw);
  }
  return sum.value() / static_cast<double>(k);
}

double median(std::vector<double> values) {
  if (values.empty() || values.size() % 2 == 0) {
    throw std::invalid_argument("median needs an odd number of values");
  }
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("median needs finite values");
    }
  }
  auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

std::vector<double> group_means(const SampleSource& src,
                                const SamplingPlan& plan, std::uint64_t seed) {
  std::vector<double> means(static_cast<std::size_t>(plan.num_groups));
  for (std::int64_t i = 0; i < plan.num_groups; ++i) {
    RngStream rng(seed, static_cast<std::uint64_t>(i));
    means[static_cast<std::size_t>(i)] = sample_mean(src, plan.group_size, rng);
  }
  return means;
}

double uniform_scaler(RngStream& rng, double epsilon) {
  return (1.0 - epsilon) + 2.0 * epsilon * rng.next_unit();
}

Estimate mom_estimate(const SampleSource& src, const SamplingPlan& plan,
                      std::uint64_t seed) {
  if (plan.kind != EstimatorKind::median_of_means) {
    throw std::invalid_argument("plan was not built for median-of-means");
  }
  return {median(group_means(src, plan, seed)), plan, plan.total};
}

Estimate scaled_median_estimate(const SampleSource& src,
                                const SamplingPlan& plan, Accuracy acc,
                                std::uint64_t seed, bool unit_scalers) {
  if (plan.kind != EstimatorKind::scaled_median) {
    throw std::invalid_argument("plan was not built for the scaled median");
  }
  if (plan.built_epsilon != acc.epsilon) {
    throw std::invalid_argument("plan was built for a different epsilon");
  }
  std::vector<double> scaled = group_means(src, plan, seed);
  for (std::int64_t i = 0; i < plan.num_groups; ++i) {
    double r = 1.0;
    if (!unit_scalers) {
      RngStream rng(seed, static_cast<std::uint64_t>(plan.num_groups + i));
      r = uniform_scaler(rng, acc.epsilon);
    }
    scaled[static_cast<std::size_t>(i)] *= r;
  }
  return {median(std::move(scaled)), plan, plan.total};
}

Estimate estimate(const EstimatorConfig& config, const SampleSource& src) {
  SamplingPlan plan = plan_for(config.kind, config.spread, config.accuracy);
  switch (config.kind) {
    case EstimatorKind::mean_only: {
      RngStream rng(config.seed, 0);
      return {sample_mean(src, plan.total, rng), plan, plan.total};
    }
    case EstimatorKind::median_of_means:
      return mom_estimate(src, plan, config.seed);
    case EstimatorKind::scaled_median:
      return scaled_median_estimate(src, plan, config.accuracy, config.seed);
  }
  throw std::logic_error("unreachable estimator kind");
}

}  // namespace mcras
