#pragma once

#include <cstdint>

namespace mcras {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
// a, b > 0; x in [0, 1]. Relative accuracy around 1e-14 away from the
// endpoints.
double regularized_ibeta(double x, double a, double b);

// One-sided exact binomial upper confidence bound: the largest failure
// probability still compatible with seeing at most `failures` failures in
// `trials` tries at the given confidence, i.e. the p solving
// P(Bin(trials, p) <= failures) = 1 - confidence; 1.0 when all trials
// failed. Used to certify an empirical failure rate against a target.
double clopper_pearson_upper(std::int64_t failures, std::int64_t trials,
                             double confidence);

}  // namespace mcras
