#pragma once

#include <cstdint>
#include <string>

namespace mcras {

enum class EstimatorKind { mean_only, median_of_means, scaled_median };

// "mean" | "mom" | "scaled"; throws std::invalid_argument otherwise.
EstimatorKind kind_from_name(const std::string& name);
const char* kind_name(EstimatorKind kind);

// Relative-error target: P(|est - mu| > epsilon * mu) <= delta.
// epsilon is restricted to (0, 1/3), the range on which every budget rule
// here is valid; delta to (0, 1). Violations throw std::domain_error.
struct Accuracy {
  double epsilon;
  double delta;
  Accuracy(double epsilon, double delta);
};

// Upper bound on sd(X)/E[X] for the input distribution; finite and > 0.
struct RelativeSpread {
  double c;
  explicit RelativeSpread(double c);
};

// Draw budget: num_groups groups of group_size draws each.
// built_epsilon records the epsilon the plan was sized for; estimators that
// depend on epsilon check it against the Accuracy they are invoked with.
struct SamplingPlan {
  std::int64_t group_size;
  std::int64_t num_groups;
  std::int64_t total;
  EstimatorKind kind;
  double built_epsilon;
};

// Variance inflation of a group mean after multiplication by an independent
// Uniform[1-eps, 1+eps] scaler, relative to the eps^2 accuracy budget:
//   (1-eps)^-2 (1+eps-eps^2)^-1 (1+eps)  =  1 + 2 eps + O(eps^2).
// Domain (0, 1); poles at the interval ends are rejected.
double nuisance_factor(double epsilon);

// Chebyshev bound min(1, c^2 / (eps^2 k)) on P(|mean_k - mu| >= eps mu)
// for k iid draws with sd/mean <= c. Requires c >= 0, eps > 0, k >= 1.
double chebyshev_failure(double c, double epsilon, std::int64_t k);

enum class BoundForm { two_sided, one_sided };

// Closed-form bound on the probability that the median of 2k+1 iid draws
// leaves an interval each (resp. whose complement's) tail of which has
// probability at most p:
//   two_sided: 4 (pi (k+1))^(-1/2) (4 p (1-p))^k
//   one_sided: 2 (pi (k+1))^(-1/2) (4 p (1-p))^k
// Clamped to [0, 1]. Requires p in (0, 1/2), k >= 0. The one-sided form is
// valid for p <= (3 - sqrt(5))/2 ~= 0.382; see uniform_median_tail for the
// exact reference value.
double median_tail_bound(double p, std::int64_t k, BoundForm form);

// Single-group plan from the Chebyshev inversion k = ceil(c^2/(eps^2 delta)).
SamplingPlan mean_plan(RelativeSpread c, Accuracy acc);

// Median of means: groups of ceil(8 (c/eps)^2) draws, each group's failure
// probability <= 1/8; num_groups = 2 ceil(ln(1/delta)/ln(16/7)) + 1.
SamplingPlan mom_plan(RelativeSpread c, Accuracy acc);

// Uniformly scaled median of means: groups of ceil((c/eps)^2 f(eps)) draws
// so that sd(group mean) <= eps mu / sqrt(f(eps)), which caps each tail of a
// scaled group at 1/4; num_groups = 2 ceil(ln(2/delta)/ln(4/3)) + 1.
SamplingPlan scaled_plan(RelativeSpread c, Accuracy acc);

// Dispatch to the plan rule matching the estimator kind.
SamplingPlan plan_for(EstimatorKind kind, RelativeSpread c, Accuracy acc);

// Leading constants of total draws * eps^2 / (c^2 ln(1/delta)) as
// (eps, delta) -> 0: 16/ln(16/7) = 19.3546 and 2/ln(4/3) = 6.9521.
double mom_leading_constant();
double scaled_leading_constant();

}  // namespace mcras
