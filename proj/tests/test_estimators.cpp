#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "mcras/distributions.hpp"
#include "mcras/estimators.hpp"

using namespace mcras;

namespace {

// Forwards draws while counting them; lets tests audit the draw budget.
class CountingSource final : public SampleSource {
 public:
  explicit CountingSource(std::shared_ptr<const SampleSource> inner)
      : inner_(std::move(inner)) {}
  double next_draw(RngStream& rng) const override {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_->next_draw(rng);
  }
  std::string descriptor() const override { return inner_->descriptor(); }
  std::optional<double> true_mean() const override {
    return inner_->true_mean();
  }
  std::optional<double> true_relative_spread() const override {
    return inner_->true_relative_spread();
  }
  std::int64_t count() const { return count_.load(); }

 private:
  std::shared_ptr<const SampleSource> inner_;
  mutable std::atomic<std::int64_t> count_{0};
};

class NonFiniteSource final : public SampleSource {
 public:
  double next_draw(RngStream&) const override {
    return std::numeric_limits<double>::infinity();
  }
  std::string descriptor() const override { return "nonfinite"; }
  std::optional<double> true_mean() const override { return std::nullopt; }
  std::optional<double> true_relative_spread() const override {
    return std::nullopt;
  }
};

SamplingPlan synthetic_plan(std::int64_t gs, std::int64_t ng,
                            EstimatorKind kind, double eps) {
  return {gs, ng, gs * ng, kind, eps};
}

}  // namespace

TEST_CASE("sample mean of a constant source is exact") {
  auto src = make_source(DistributionSpec::constant(5.0));
  RngStream rng(1, 0);
  CHECK(sample_mean(*src, 10, rng) == 5.0);
}

TEST_CASE("sample mean of one draw is that draw") {
  auto src = make_source(DistributionSpec::exponential(1.0));
  RngStream a(9, 3);
  RngStream b(9, 3);
  CHECK(sample_mean(*src, 1, a) == src->next_draw(b));
}

TEST_CASE("sample mean converges on a symmetric two-point source") {
  auto src = make_source(DistributionSpec::two_point(0.0, 2.0, 0.5));
  RngStream rng(4, 0);
  double m = sample_mean(*src, 1000000, rng);
  CHECK(std::fabs(m - 1.0) < 0.01);
}

TEST_CASE("sample mean rejects bad inputs") {
  auto src = make_source(DistributionSpec::exponential(1.0));
  RngStream rng(1, 0);
  CHECK_THROWS_AS(sample_mean(*src, 0, rng), std::domain_error);
  CHECK_THROWS_AS(sample_mean(*src, -5, rng), std::domain_error);
  NonFiniteSource bad;
  CHECK_THROWS_AS(sample_mean(bad, 3, rng), std::domain_error);
}

TEST_CASE("median picks the middle order statistic") {
  CHECK(median({3.0}) == 3.0);
  CHECK(median({5.0, 1.0, 9.0}) == 5.0);
  CHECK(median({1.0, 1.0, 2.0, 2.0, 2.0}) == 2.0);
  CHECK(median({2.0, 1.0, 2.0, 1.0, 2.0}) == 2.0);
  // Permutation invariant.
  std::vector<double> v{7.0, 3.0, 9.0, 1.0, 5.0};
  double m = median(v);
  std::sort(v.begin(), v.end());
  do {
    CHECK(median(v) == m);
  } while (std::next_permutation(v.begin(), v.end()));
}

TEST_CASE("median rejects even, empty, and non-finite input") {
  CHECK_THROWS_AS(median({}), std::invalid_argument);
  CHECK_THROWS_AS(median({1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(median({1.0, std::nan(""), 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(
      median({1.0, std::numeric_limits<double>::infinity(), 2.0}),
      std::invalid_argument);
}

TEST_CASE("group means are keyed by (seed, group index, group size)") {
  auto src = make_source(DistributionSpec::exponential(1.0));
  SamplingPlan plan = synthetic_plan(50, 5, EstimatorKind::median_of_means, 0.1);
  std::vector<double> means = group_means(*src, plan, 123);
  REQUIRE(means.size() == 5);
  for (std::size_t i = 0; i < means.size(); ++i) {
    RngStream rng(123, i);
    CHECK(means[i] == sample_mean(*src, 50, rng));
  }
  // Same call, same values.
  CHECK(group_means(*src, plan, 123) == means);
}

TEST_CASE("uniform scaler stays inside its interval and centers at one") {
  RngStream rng(8, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    double r = uniform_scaler(rng, 0.25);
    CHECK(r >= 0.75);
    CHECK(r <= 1.25);
    sum += r;
  }
  // sd of the mean is (2 eps)/sqrt(12 n).
  CHECK(std::fabs(sum / n - 1.0) < 5.0 * 0.5 / std::sqrt(12.0 * n));
}

TEST_CASE("mom estimate is the median of the group means") {
  auto src = make_source(DistributionSpec::exponential(1.0));
  SamplingPlan plan = mom_plan(RelativeSpread(1.0), Accuracy(0.1, 0.5));
  Estimate est = mom_estimate(*src, plan, 77);
  CHECK(est.value == median(group_means(*src, plan, 77)));
  CHECK(est.draws_consumed == plan.total);
  CHECK(est.plan.kind == EstimatorKind::median_of_means);
  // Bit-identical on repeat.
  CHECK(mom_estimate(*src, plan, 77).value == est.value);
}

TEST_CASE("mom estimate on a constant source is exact") {
  auto src = make_source(DistributionSpec::constant(7.0));
  SamplingPlan plan = synthetic_plan(20, 9, EstimatorKind::median_of_means, 0.1);
  CHECK(mom_estimate(*src, plan, 1).value == 7.0);
}

TEST_CASE("estimators consume exactly the planned number of draws") {
  auto counting = std::make_shared<CountingSource>(
      make_source(DistributionSpec::exponential(1.0)));
  EstimatorConfig config{EstimatorKind::scaled_median, Accuracy(0.1, 0.05),
                         RelativeSpread(1.0), 5};
  Estimate est = estimate(config, *counting);
  CHECK(est.draws_consumed == 3375);
  CHECK(counting->count() == 3375);

  auto counting2 = std::make_shared<CountingSource>(
      make_source(DistributionSpec::exponential(1.0)));
  config.kind = EstimatorKind::median_of_means;
  CHECK(estimate(config, *counting2).draws_consumed == 7200);
  CHECK(counting2->count() == 7200);

  auto counting3 = std::make_shared<CountingSource>(
      make_source(DistributionSpec::exponential(1.0)));
  config.kind = EstimatorKind::mean_only;
  CHECK(estimate(config, *counting3).draws_consumed == 2000);
  CHECK(counting3->count() == 2000);
}

TEST_CASE("estimate dispatch is deterministic per kind and seed") {
  auto src = make_source(DistributionSpec::log_normal(2.0, 0.5));
  for (EstimatorKind kind :
       {EstimatorKind::mean_only, EstimatorKind::median_of_means,
        EstimatorKind::scaled_median}) {
    EstimatorConfig config{kind, Accuracy(0.1, 0.1), RelativeSpread(0.5), 42};
    Estimate a = estimate(config, *src);
    Estimate b = estimate(config, *src);
    CHECK(a.value == b.value);
    CHECK(a.value > 0.0);
    CHECK(std::isfinite(a.value));
  }
}

TEST_CASE("kind mismatches between plan and kernel are rejected") {
  auto src = make_source(DistributionSpec::exponential(1.0));
  SamplingPlan scaled = scaled_plan(RelativeSpread(1.0), Accuracy(0.1, 0.2));
  SamplingPlan mom = mom_plan(RelativeSpread(1.0), Accuracy(0.1, 0.2));
  CHECK_THROWS_AS(mom_estimate(*src, scaled, 1), std::invalid_argument);
  CHECK_THROWS_AS(scaled_median_estimate(*src, mom, Accuracy(0.1, 0.2), 1),
                  std::invalid_argument);
  // The plan must have been built for the accuracy it runs under.
  CHECK_THROWS_AS(scaled_median_estimate(*src, scaled, Accuracy(0.2, 0.2), 1),
                  std::invalid_argument);
}

TEST_CASE("pinning the scalers to one reduces scaled to plain mom") {
  auto src = make_source(DistributionSpec::exponential(1.0));
  SamplingPlan splan = synthetic_plan(40, 7, EstimatorKind::scaled_median, 0.15);
  SamplingPlan mplan =
      synthetic_plan(40, 7, EstimatorKind::median_of_means, 0.15);
  Accuracy acc(0.15, 0.3);
  Estimate pinned = scaled_median_estimate(*src, splan, acc, 99, true);
  Estimate plain = mom_estimate(*src, mplan, 99);
  CHECK(pinned.value == plain.value);
}

TEST_CASE("group means never depend on the accuracy the plan was built for") {
  // Scaler streams are disjoint from draw streams, so two plans of the same
  // shape built for different epsilons see identical group means.
  auto src = make_source(DistributionSpec::exponential(1.0));
  SamplingPlan a = synthetic_plan(40, 7, EstimatorKind::scaled_median, 0.1);
  SamplingPlan b = synthetic_plan(40, 7, EstimatorKind::scaled_median, 0.2);
  CHECK(group_means(*src, a, 5) == group_means(*src, b, 5));
  Estimate ea = scaled_median_estimate(*src, a, Accuracy(0.1, 0.3), 5, true);
  Estimate eb = scaled_median_estimate(*src, b, Accuracy(0.2, 0.3), 5, true);
  CHECK(ea.value == eb.value);
}

TEST_CASE("scaled median stays inside the scaled hull of the group means") {
  auto src = make_source(DistributionSpec::exponential(1.0));
  Accuracy acc(0.1, 0.3);
  SamplingPlan plan = scaled_plan(RelativeSpread(1.0), acc);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::vector<double> means = group_means(*src, plan, seed);
    double lo = *std::min_element(means.begin(), means.end());
    double hi = *std::max_element(means.begin(), means.end());
    double v = scaled_median_estimate(*src, plan, acc, seed).value;
    CHECK(v >= lo * 0.9 * (1.0 - 1e-12));
    CHECK(v <= hi * 1.1 * (1.0 + 1e-12));
  }
}

TEST_CASE("scaled median of a constant source lands inside the scaler range") {
  auto src = make_source(DistributionSpec::constant(7.0));
  Accuracy acc(0.1, 0.05);
  SamplingPlan plan = scaled_plan(RelativeSpread(0.01), acc);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    double v = scaled_median_estimate(*src, plan, acc, seed).value;
    CHECK(v >= 7.0 * 0.9 * (1.0 - 1e-12));
    CHECK(v <= 7.0 * 1.1 * (1.0 + 1e-12));
  }
}

TEST_CASE("estimates are scale equivariant") {
  // Doubling every support point doubles the estimate bit for bit: every
  // floating point operation involved scales exactly by powers of two.
  EstimatorConfig base{EstimatorKind::scaled_median, Accuracy(0.1, 0.2),
                       RelativeSpread(0.5), 21};
  auto unit = make_source(DistributionSpec::two_point(1.0, 3.0, 0.5));
  for (double lambda : {2.0, 0.5, 1024.0}) {
    auto stretched = make_source(
        DistributionSpec::two_point(lambda * 1.0, lambda * 3.0, 0.5));
    for (EstimatorKind kind :
         {EstimatorKind::mean_only, EstimatorKind::median_of_means,
          EstimatorKind::scaled_median}) {
      EstimatorConfig config = base;
      config.kind = kind;
      CHECK(estimate(config, *stretched).value ==
            lambda * estimate(config, *unit).value);
    }
  }
  // General factors hold to rounding error.
  auto tripled = make_source(DistributionSpec::two_point(3.0, 9.0, 0.5));
  Estimate a = estimate(base, *tripled);
  Estimate b = estimate(base, *unit);
  CHECK(a.value == doctest::Approx(3.0 * b.value).epsilon(1e-14));
}
