#include "mcras/harness.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <thread>

#include "mcras/stats.hpp"

namespace mcras {

namespace {
constexpr double kReportConfidence = 0.99;
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::int64_t trial_index) {
  return mix64(master_seed +
               (static_cast<std::uint64_t>(trial_index) + 1) * kGolden);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.trials < 1) {
    throw std::domain_error("trials must be >= 1");
  }
  if (config.threads < 1) {
    throw std::domain_error("threads must be >= 1");
  }
  auto source = make_source(config.distribution);
  auto mean = source->true_mean();
  if (!mean) {
    throw std::domain_error("distribution must carry an exact mean");
  }
  double mu = *mean;
  SamplingPlan plan = plan_for(config.kind, config.spread, config.accuracy);

  auto start = std::chrono::steady_clock::now();
  std::vector<TrialRecord> records(static_cast<std::size_t>(config.trials));
  std::int64_t stride =
      std::min<std::int64_t>(config.threads, config.trials);
  auto run_slice = [&](std::int64_t offset) {
    for (std::int64_t t = offset; t < config.trials; t += stride) {
      EstimatorConfig trial_config{config.kind, config.accuracy, config.spread,
                                   trial_seed(config.master_seed, t)};
      Estimate est = estimate(trial_config, *source);
      double rel = est.value / mu - 1.0;
      records[static_cast<std::size_t>(t)] = {
          t, est.value, rel, std::fabs(rel) > config.accuracy.epsilon};
    }
  };
  if (stride == 1) {
    run_slice(0);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(stride));
    for (std::int64_t w = 0; w < stride; ++w) {
      pool.emplace_back([&, w] {
        try {
          run_slice(w);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
        }
      });
    }
    for (auto& worker : pool) worker.join();
    for (auto& error : errors) {
      if (error) std::rethrow_exception(error);
    }
  }
  double wall = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();

  std::int64_t failures = 0;
  for (const auto& record : records) {
    failures += record.failed ? 1 : 0;
  }
  FailureRateReport report{
      config.trials,
      failures,
      static_cast<double>(failures) / static_cast<double>(config.trials),
      clopper_pearson_upper(failures, config.trials, kReportConfidence),
      plan.total,
      wall};
  return {std::move(records), report};
}

}  // namespace mcras
