#pragma once

#include <cstdint>

namespace mcras {

// Two-value random variable written as offsets around 1: value 1+k1 with
// probability p1, value 1+k2 with probability 1-p1, k1 <= 0 < k2. This is
// the extremal family for the scaled estimator's tail analysis: among all
// mean-1 variables with a given standard deviation, the worst scaled tails
// are attained on two points.
struct TwoPointSpec {
  double p1;
  double k1;
  double k2;

  // Mean-1 member with the given offsets: p1 = k2/(k2 - k1).
  static TwoPointSpec mean_one(double k1, double k2);
  // Mean-1 member with standard deviation alpha and upper offset k2:
  // k1 = -alpha^2/k2, p1 = k2^2/(k2^2 + alpha^2).
  static TwoPointSpec with_sd(double alpha, double k2);

  double mean() const;
  double variance() const;
};

// P(V*R >= 1+eps) and P(V*R <= 1-eps) for V two-point per spec and
// R ~ Uniform[1-eps, 1+eps], in closed form.
struct TailPair {
  double upper;
  double lower;
};
// Both supported values must be > 0; eps in (0, 1).
TailPair scaled_tail_probabilities(const TwoPointSpec& spec, double epsilon);

// Containment probability P(V*R <= 1+eps) for the sd-alpha family member
// with upper offset k2, as an explicit formula:
//   k2^2/(k2^2+a^2) + [k2 <= 2e/(1-e)] * a^2/(k2^2+a^2)
//                       * ((1+e)/(1+k2) - (1-e)) / (2e).
// The indicator marks where the scaled high value can still reach 1+eps;
// past it only the first term survives. Agrees with
// 1 - scaled_tail_probabilities(with_sd(alpha,k2), eps).upper and is kept
// as an independent route for cross-checking.
double upper_containment(double k2, double epsilon, double alpha);

// Containment probability P(V*R >= 1-eps) for the family member with lower
// offset k1 (so upper offset alpha^2/(-k1)):
//   k1^2/(k1^2+a^2) + [k1 >= -2e/(1+e)] * a^2/(k1^2+a^2)
//                       * (1+e - (1-e)/(1+k1)) / (2e).
// The additive term is live exactly while the scaled low value can reach
// 1-eps, i.e. (1-e)/(1+k1) <= 1+e; the bracket vanishes at the switch, so
// the function is continuous. Requires -1 < k1 <= 0.
double lower_containment(double k1, double epsilon, double alpha);

// Largest variance for which upper_containment at offset k2 stays >= 3/4:
//   k2^2 (k2+1) eps / (k2 (eps+2) - eps).
// Pole at k2 = eps/(eps+2); rejected. upper_containment(k2,eps,alpha) >= 3/4
// iff alpha^2 <= alpha_sq_limit(k2, eps) while the indicator is live.
double alpha_sq_limit(double k2, double epsilon);
// d/dk2 of the above, closed form; same pole.
double alpha_sq_limit_derivative(double k2, double epsilon);

// Minimizer of alpha_sq_limit over k2 > eps/(eps+2):
//   (eps - 1 + sqrt(5 eps^2 + 6 eps + 1)) / (2 (eps + 2)).
// Satisfies eps - eps^2 <= value <= eps on (0, 1/3).
double worst_upper_offset(double epsilon);

// Standard-deviation budget eps * sqrt((1-e)^2 (1+e-e^2) / (1+e)), equal to
// eps/sqrt(nuisance_factor(eps)); this is the sd at which both scaled tails
// stay at or below 1/4.
double spread_limit_upper(double epsilon);
// Looser reference budget eps * sqrt((1+e)^3 (1-2e) / (1 - 3e + 2e^2));
// >= spread_limit_upper on (0, 1/3], so the upper-side budget binds. It does
// not itself cap the worst one-sided tails at 1/4 (see worst_tail_scan).
// Domain (0, 1/2).
double spread_limit_lower(double epsilon);

enum class Side { upper, lower };

struct ContainmentMin {
  double min_value;
  double argmin;
};

// Minimum of upper_containment over k2 in (0, 2e/(1-e)] (beyond that bound
// the function is increasing, so the window suffices), or of
// lower_containment over k1 in [-2e/(1-e), 0). Dense grid of grid_points
// then golden-section refinement to 1e-10 in the offset. grid_points >= 1000.
ContainmentMin min_containment(double epsilon, double alpha, Side side,
                               int grid_points);

// Independent oracle for the same extremum: scans the sd-alpha family over
// the matching offset window, evaluates scaled_tail_probabilities exactly,
// and returns the worst (largest) tail on the requested side, refined by
// golden section. Equals 1 - min_containment(...).min_value up to the
// refinement tolerance.
double worst_tail_scan(double epsilon, double alpha, Side side,
                       int grid_points);

// P(M > 1-p) for M the median of 2k+1 iid Uniform[0,1] draws, i.e. the
// upper tail of Beta(k+1, k+1), by adaptive quadrature of the density.
// Absolute error < 1e-12. k = 0 returns exactly p; p = 1/2 returns 1/2.
double uniform_median_tail(double p, std::int64_t k);

}  // namespace mcras
