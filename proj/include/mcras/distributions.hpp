#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include "mcras/rng.hpp"

namespace mcras {

// Strictly positive random variable that can be sampled repeatedly.
// Implementations must be stateless apart from the stream handed in, so a
// source can be shared across threads.
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  virtual double next_draw(RngStream& rng) const = 0;
  virtual std::string descriptor() const = 0;
  // Exact moments where available; nullopt for families without them.
  virtual std::optional<double> true_mean() const = 0;
  virtual std::optional<double> true_relative_spread() const = 0;
};

enum class Family {
  constant,
  two_point,
  exponential,
  scaled_bernoulli,
  log_normal,
  uniform_positive,
};

// Parsed description of a distribution: family plus named parameters.
// Text form is "family:key=value,key=value", e.g. "exponential:mean=1".
struct DistributionSpec {
  Family family;
  std::map<std::string, double> params;

  static DistributionSpec parse(const std::string& text);
  std::string canonical_text() const;

  static DistributionSpec constant(double value);
  // Mass p at low, 1-p at high; 0 <= low < high and the mean must be > 0.
  static DistributionSpec two_point(double low, double high, double p);
  static DistributionSpec exponential(double mean);
  // value with probability p, zero otherwise; mean value*p, c = sqrt((1-p)/p).
  static DistributionSpec scaled_bernoulli(double value, double p);
  // Parameterized by the target mean and relative spread c = sd/mean.
  static DistributionSpec log_normal(double mean, double c);
  static DistributionSpec uniform_positive(double low, double high);
};

std::shared_ptr<const SampleSource> make_source(const DistributionSpec& spec);

// Two-point distribution with mean `mean` and sd/mean equal to the largest
// relative spread a plan built for epsilon is required to handle. Each point
// carries probability 1/2, so a scaled group mean lands in the extreme
// quarter-tails with the worst probability the certification allows.
std::shared_ptr<const SampleSource> worst_case_group_source(double epsilon,
                                                            double mean = 1.0);

}  // namespace mcras
