#include "mcras/plan.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mcras {

namespace {

// ceil() on values that are integers up to rounding noise must not jump to
// the next integer: snap first when within 1e-12 relative of one.
double guarded_ceil(double x) {
  double nearest = std::round(x);
  if (std::fabs(x - nearest) <= 1e-12 * std::max(1.0, std::fabs(x))) {
    return nearest;
  }
  return std::ceil(x);
}

std::int64_t to_count(double x, const char* what) {
  if (!std::isfinite(x) || x < 1.0 ||
      x > 9.0e18) {  // stays below int64 range
    throw std::domain_error(std::string(what) + " out of range");
  }
  return static_cast<std::int64_t>(x);
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  __int128 wide = static_cast<__int128>(a) * static_cast<__int128>(b);
  if (wide > static_cast<__int128>(std::numeric_limits<std::int64_t>::max())) {
    throw std::domain_error("total draw count overflows 64 bits");
  }
  return static_cast<std::int64_t>(wide);
}

std::int64_t odd_group_count(double log_ratio, double log_base) {
  double repeats = guarded_ceil(log_ratio / log_base);
  if (repeats < 0.0) repeats = 0.0;
  return checked_mul(2, to_count(repeats + 1.0, "group count")) - 1;
}

}  // namespace

EstimatorKind kind_from_name(const std::string& name) {
  if (name == "mean") return EstimatorKind::mean_only;
  if (name == "mom") return EstimatorKind::median_of_means;
  if (name == "scaled") return EstimatorKind::scaled_median;
  throw std::invalid_argument("unknown estimator kind: " + name);
}

const char* kind_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::mean_only:
      return "mean";
    case EstimatorKind::median_of_means:
      return "mom";
    case EstimatorKind::scaled_median:
      return "scaled";
  }
  throw std::logic_error("unreachable estimator kind");
}

Accuracy::Accuracy(double epsilon_in, double delta_in)
    : epsilon(epsilon_in), delta(delta_in) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0 / 3.0)) {
    throw std::domain_error("epsilon must lie in (0, 1/3)");
  }
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
}

RelativeSpread::RelativeSpread(double c_in) : c(c_in) {
  if (!std::isfinite(c) || !(c > 0.0)) {
    throw std::domain_error("relative spread must be finite and positive");
  }
}

double nuisance_factor(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::domain_error("nuisance factor needs epsilon in (0, 1)");
  }
  double shrink = 1.0 - epsilon;
  return (1.0 + epsilon) /
         (shrink * shrink * (1.0 + epsilon - epsilon * epsilon));
}

double chebyshev_failure(double c, double epsilon, std::int64_t k) {
  if (!(c >= 0.0) || !(epsilon > 0.0) || k < 1) {
    throw std::domain_error("chebyshev_failure needs c >= 0, eps > 0, k >= 1");
  }
  double ratio = c / epsilon;
  return std::min(1.0, ratio * ratio / static_cast<double>(k));
}

double median_tail_bound(double p, std::int64_t k, BoundForm form) {
  if (!(p > 0.0) || !(p < 0.5) || k < 0) {
    throw std::domain_error("median_tail_bound needs p in (0, 1/2), k >= 0");
  }
  double factor = form == BoundForm::two_sided ? 4.0 : 2.0;
  double pi = 3.14159265358979323846;
  double value = factor / std::sqrt(pi * static_cast<double>(k + 1)) *
                 std::pow(4.0 * p * (1.0 - p), static_cast<double>(k));
  return std::min(1.0, value);
}

SamplingPlan mean_plan(RelativeSpread c, Accuracy acc) {
  double ratio = c.c / acc.epsilon;
  std::int64_t draws =
      to_count(guarded_ceil(ratio * ratio / acc.delta), "group size");
  return {draws, 1, draws, EstimatorKind::mean_only, acc.epsilon};
}

SamplingPlan mom_plan(RelativeSpread c, Accuracy acc) {
  double ratio = c.c / acc.epsilon;
  std::int64_t group_size =
      to_count(guarded_ceil(8.0 * ratio * ratio), "group size");
  std::int64_t num_groups =
      odd_group_count(std::log(1.0 / acc.delta), std::log(16.0 / 7.0));
  return {group_size, num_groups, checked_mul(group_size, num_groups),
          EstimatorKind::median_of_means, acc.epsilon};
}

SamplingPlan scaled_plan(RelativeSpread c, Accuracy acc) {
  double ratio = c.c / acc.epsilon;
  std::int64_t group_size = to_count(
      guarded_ceil(ratio * ratio * nuisance_factor(acc.epsilon)), "group size");
  std::int64_t num_groups =
      odd_group_count(std::log(2.0 / acc.delta), std::log(4.0 / 3.0));
  return {group_size, num_groups, checked_mul(group_size, num_groups),
          EstimatorKind::scaled_median, acc.epsilon};
}

SamplingPlan plan_for(EstimatorKind kind, RelativeSpread c, Accuracy acc) {
  switch (kind) {
    case EstimatorKind::mean_only:
      return mean_plan(c, acc);
    case EstimatorKind::median_of_means:
      return mom_plan(c, acc);
    case EstimatorKind::scaled_median:
      return scaled_plan(c, acc);
  }
  throw std::logic_error("unreachable estimator kind");
}

double mom_leading_constant() { return 16.0 / std::log(16.0 / 7.0); }

double scaled_leading_constant() { return 2.0 / std::log(4.0 / 3.0); }

}  // namespace mcras
