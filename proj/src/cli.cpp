#include "mcras/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "mcras/distributions.hpp"
#include "mcras/estimators.hpp"
#include "mcras/harness.hpp"
#include "mcras/lemma_verify.hpp"
#include "mcras/plan.hpp"
#include "mcras/stats.hpp"

namespace mcras {

const char* const kVersion = "0.1.0";

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Options {
  std::string kind;
  double c = std::numeric_limits<double>::quiet_NaN();
  double epsilon = std::numeric_limits<double>::quiet_NaN();
  double delta = std::numeric_limits<double>::quiet_NaN();
  std::string distribution;
  std::int64_t trials = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output = "json";
  std::string config_path;
  double eps_min = 0.01;
  double eps_max = 0.33;
  double eps_step = 0.01;
  int grid_points = 2000;
  double inflate_alpha = 1.0;
};

void add_accuracy_options(CLI::App* sub, Options& opts) {
  sub->add_option("--kind", opts.kind, "estimator kind: mean, mom, or scaled");
  sub->add_option("--c", opts.c, "upper bound on sd/mean of the source");
  sub->add_option("--epsilon", opts.epsilon, "relative error target in (0,1/3)");
  sub->add_option("--delta", opts.delta, "failure probability target in (0,1)");
  sub->add_option("--config", opts.config_path,
                  "JSON file with option values; explicit flags win");
}

// Values from --config fill in whatever flags the command line left unset.
void apply_config(const CLI::App* sub, Options& opts, std::ostream& err) {
  if (opts.config_path.empty()) return;
  std::ifstream in(opts.config_path);
  if (!in) {
    throw std::domain_error("cannot open config file: " + opts.config_path);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw std::domain_error(std::string("bad config file: ") + e.what());
  }
  auto unset = [&](const char* flag) {
    const CLI::Option* opt = sub->get_option_no_throw(flag);
    return opt != nullptr && opt->count() == 0;
  };
  try {
    if (doc.contains("kind") && unset("--kind")) opts.kind = doc["kind"];
    if (doc.contains("c") && unset("--c")) opts.c = doc["c"];
    if (doc.contains("epsilon") && unset("--epsilon"))
      opts.epsilon = doc["epsilon"];
    if (doc.contains("delta") && unset("--delta")) opts.delta = doc["delta"];
    if (doc.contains("distribution") && unset("--distribution"))
      opts.distribution = doc["distribution"].get<std::string>();
    if (doc.contains("trials") && unset("--trials"))
      opts.trials = doc["trials"];
    if (doc.contains("seed") && unset("--seed"))
      opts.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("threads") && unset("--threads"))
      opts.threads = doc["threads"];
    if (doc.contains("output") && unset("--output"))
      opts.output = doc["output"].get<std::string>();
    if (doc.contains("eps_min") && unset("--eps-min"))
      opts.eps_min = doc["eps_min"];
    if (doc.contains("eps_max") && unset("--eps-max"))
      opts.eps_max = doc["eps_max"];
    if (doc.contains("eps_step") && unset("--eps-step"))
      opts.eps_step = doc["eps_step"];
    if (doc.contains("grid_points") && unset("--grid-points"))
      opts.grid_points = doc["grid_points"];
    if (doc.contains("inflate_alpha") && unset("--inflate-alpha"))
      opts.inflate_alpha = doc["inflate_alpha"];
  } catch (const nlohmann::json::exception& e) {
    throw std::domain_error(std::string("bad config value: ") + e.what());
  }
  (void)err;
}

double require_real(double value, const char* flag) {
  if (std::isnan(value)) {
    throw std::domain_error(std::string("missing required option ") + flag);
  }
  return value;
}

EstimatorKind require_kind(const Options& opts) {
  if (opts.kind.empty()) {
    throw std::domain_error("missing required option --kind");
  }
  return kind_from_name(opts.kind);
}

std::string require_distribution(const Options& opts) {
  if (opts.distribution.empty()) {
    throw std::domain_error("missing required option --distribution");
  }
  return opts.distribution;
}

std::string plan_json(const SamplingPlan& plan) {
  std::ostringstream out;
  out << "{\"kind\":\"" << kind_name(plan.kind)
      << "\",\"group_size\":" << plan.group_size
      << ",\"num_groups\":" << plan.num_groups << ",\"total\":" << plan.total
      << ",\"built_epsilon\":" << fmt(plan.built_epsilon) << "}";
  return out.str();
}

void write_envelope(std::ostream& out, const std::string& plan,
                    const std::string& config, const std::string& result,
                    std::uint64_t seed) {
  out << "{\"plan\":" << plan << ",\"config\":" << config
      << ",\"result\":" << result << ",\"seed\":" << seed << ",\"version\":\""
      << kVersion << "\"}\n";
}

int cmd_plan(const Options& opts, std::ostream& out) {
  EstimatorKind kind = require_kind(opts);
  RelativeSpread spread(require_real(opts.c, "--c"));
  Accuracy acc(require_real(opts.epsilon, "--epsilon"),
               require_real(opts.delta, "--delta"));
  SamplingPlan plan = plan_for(kind, spread, acc);
  double leading = static_cast<double>(plan.total) * acc.epsilon *
                   acc.epsilon /
                   (spread.c * spread.c * std::log(1.0 / acc.delta));
  std::ostringstream config;
  config << "{\"kind\":\"" << kind_name(kind) << "\",\"c\":" << fmt(spread.c)
         << ",\"epsilon\":" << fmt(acc.epsilon)
         << ",\"delta\":" << fmt(acc.delta) << "}";
  write_envelope(out, plan_json(plan), config.str(),
                 "{\"leading_constant\":" + fmt(leading) + "}", 0);
  return 0;
}

int cmd_estimate(const Options& opts, std::ostream& out) {
  EstimatorKind kind = require_kind(opts);
  RelativeSpread spread(require_real(opts.c, "--c"));
  Accuracy acc(require_real(opts.epsilon, "--epsilon"),
               require_real(opts.delta, "--delta"));
  DistributionSpec dist = DistributionSpec::parse(require_distribution(opts));
  auto source = make_source(dist);
  Estimate est = estimate({kind, acc, spread, opts.seed}, *source);
  std::ostringstream config;
  config << "{\"kind\":\"" << kind_name(kind) << "\",\"c\":" << fmt(spread.c)
         << ",\"epsilon\":" << fmt(acc.epsilon)
         << ",\"delta\":" << fmt(acc.delta) << ",\"distribution\":\""
         << source->descriptor() << "\"}";
  std::ostringstream result;
  result << "{\"value\":" << fmt(est.value)
         << ",\"draws_consumed\":" << est.draws_consumed;
  if (auto mu = source->true_mean()) {
    result << ",\"true_mean\":" << fmt(*mu)
           << ",\"rel_error\":" << fmt(est.value / *mu - 1.0);
  } else {
    result << ",\"true_mean\":null,\"rel_error\":null";
  }
  result << "}";
  write_envelope(out, plan_json(est.plan), config.str(), result.str(),
                 opts.seed);
  return 0;
}

int cmd_simulate(const Options& opts, std::ostream& out, std::ostream& err) {
  EstimatorKind kind = require_kind(opts);
  RelativeSpread spread(require_real(opts.c, "--c"));
  Accuracy acc(require_real(opts.epsilon, "--epsilon"),
               require_real(opts.delta, "--delta"));
  DistributionSpec dist = DistributionSpec::parse(require_distribution(opts));
  if (opts.output != "json" && opts.output != "csv") {
    throw std::domain_error("--output must be json or csv");
  }
  ExperimentConfig config{kind,        acc,       spread, dist,
                          opts.trials, opts.seed, opts.threads};
  ExperimentResult res = run_experiment(config);
  if (opts.output == "csv") {
    out << "trial_index,estimate,rel_error,failed\n";
    for (const auto& rec : res.records) {
      out << rec.trial_index << ',' << fmt(rec.estimate) << ','
          << fmt(rec.rel_error) << ',' << (rec.failed ? 1 : 0) << "\n";
    }
  } else {
    std::ostringstream config_json;
    config_json << "{\"kind\":\"" << kind_name(kind)
                << "\",\"c\":" << fmt(spread.c)
                << ",\"epsilon\":" << fmt(acc.epsilon)
                << ",\"delta\":" << fmt(acc.delta) << ",\"distribution\":\""
                << dist.canonical_text() << "\",\"trials\":" << opts.trials
                << ",\"threads\":" << opts.threads << "}";
    const FailureRateReport& rep = res.report;
    std::ostringstream result;
    result << "{\"trials\":" << rep.trials << ",\"failures\":" << rep.failures
           << ",\"empirical_rate\":" << fmt(rep.empirical_rate)
           << ",\"cp99_upper\":" << fmt(rep.cp99_upper)
           << ",\"draws_per_trial\":" << rep.draws_per_trial << "}";
    SamplingPlan plan = plan_for(kind, spread, acc);
    write_envelope(out, plan_json(plan), config_json.str(), result.str(),
                   opts.seed);
  }
  // Stderr only: timing would break byte-identical stdout.
  err << "note: wall time " << fmt(res.report.wall_time_seconds) << " s\n";
  return 0;
}

struct CheckTally {
  bool all_pass = true;
  std::ostream& out;
  void line(bool pass, const std::string& text) {
    out << (pass ? "PASS " : "FAIL ") << text << "\n";
    all_pass = all_pass && pass;
  }
};

int cmd_verify(const Options& opts, std::ostream& out) {
  if (!(opts.eps_min > 0.0) || !(opts.eps_max < 1.0 / 3.0) ||
      !(opts.eps_min <= opts.eps_max) || !(opts.eps_step > 0.0)) {
    throw std::domain_error(
        "need 0 < eps-min <= eps-max < 1/3 and eps-step > 0");
  }
  if (opts.grid_points < 1000) {
    throw std::domain_error("--grid-points must be at least 1000");
  }
  if (!(opts.inflate_alpha > 0.0)) {
    throw std::domain_error("--inflate-alpha must be positive");
  }
  std::vector<double> grid;
  for (double e = opts.eps_min; e <= opts.eps_max + 0.5 * opts.eps_step;
       e += opts.eps_step) {
    grid.push_back(std::min(e, opts.eps_max));
  }
  out << "constants: scaled " << fmt(scaled_leading_constant()) << " mom "
      << fmt(mom_leading_constant()) << "\n";
  CheckTally tally{true, out};

  {
    double worst_low = std::numeric_limits<double>::infinity();
    double worst_high = -std::numeric_limits<double>::infinity();
    for (double e : grid) {
      double k = worst_upper_offset(e);
      worst_low = std::min(worst_low, k - (e - e * e));
      worst_high = std::max(worst_high, k - e);
    }
    tally.line(worst_low >= 0.0 && worst_high <= 0.0,
               "offset bounds: eps-eps^2 <= worst_upper_offset <= eps (slack " +
                   fmt(worst_low) + ", " + fmt(-worst_high) + ")");
  }
  {
    // Probe points avoid the minimizer itself, where the derivative is zero
    // and a relative comparison is meaningless.
    double worst = 0.0;
    for (double e : grid) {
      for (double scale : {0.8, 1.5, 2.5, 5.0}) {
        double k2 = scale * worst_upper_offset(e);
        double h = k2 * 1e-6;
        double fd =
            (alpha_sq_limit(k2 + h, e) - alpha_sq_limit(k2 - h, e)) / (2 * h);
        double closed = alpha_sq_limit_derivative(k2, e);
        double rel = std::fabs(fd - closed) /
                     std::max(std::fabs(closed), std::fabs(fd));
        worst = std::max(worst, rel);
      }
    }
    tally.line(worst <= 1e-6,
               "variance-limit derivative matches closed form (max rel dev " +
                   fmt(worst) + ")");
  }
  {
    double worst = -std::numeric_limits<double>::infinity();
    double worst_id = 0.0;
    for (double e : grid) {
      worst = std::max(worst, spread_limit_upper(e) - spread_limit_lower(e));
      double identity =
          spread_limit_upper(e) * std::sqrt(nuisance_factor(e)) - e;
      worst_id = std::max(worst_id, std::fabs(identity));
    }
    tally.line(worst <= 0.0,
               "spread budget dominance: upper <= lower (max gap " +
                   fmt(-worst) + ")");
    tally.line(worst_id <= 1e-12,
               "spread budget identity: upper * sqrt(nuisance) = eps (max dev " +
                   fmt(worst_id) + ")");
  }
  {
    double min_up = std::numeric_limits<double>::infinity();
    double min_low = std::numeric_limits<double>::infinity();
    double worst_tail = -std::numeric_limits<double>::infinity();
    double worst_gap = 0.0;
    for (double e : grid) {
      double alpha = opts.inflate_alpha * spread_limit_upper(e);
      ContainmentMin up =
          min_containment(e, alpha, Side::upper, opts.grid_points);
      ContainmentMin low =
          min_containment(e, alpha, Side::lower, opts.grid_points);
      double scan_up = worst_tail_scan(e, alpha, Side::upper, opts.grid_points);
      double scan_low =
          worst_tail_scan(e, alpha, Side::lower, opts.grid_points);
      min_up = std::min(min_up, up.min_value);
      min_low = std::min(min_low, low.min_value);
      worst_tail = std::max({worst_tail, scan_up, scan_low});
      worst_gap = std::max({worst_gap,
                            std::fabs(1.0 - up.min_value - scan_up),
                            std::fabs(1.0 - low.min_value - scan_low)});
    }
    tally.line(min_up >= 0.75 - 1e-9,
               "upper containment stays above 3/4 (min " + fmt(min_up) + ")");
    tally.line(min_low >= 0.75 - 1e-9,
               "lower containment stays above 3/4 (min " + fmt(min_low) + ")");
    tally.line(worst_tail <= 0.25 + 1e-6,
               "scanned worst tails stay below 1/4 (max " + fmt(worst_tail) +
                   ")");
    tally.line(worst_gap <= 1e-6,
               "containment and tail scan agree (max gap " + fmt(worst_gap) +
                   ")");
  }
  {
    bool ok = true;
    double worst_ratio = 0.0;
    for (std::int64_t k = 1; k <= 50; ++k) {
      for (int pi = 1; pi <= 9; ++pi) {
        double p = 0.05 * pi;
        double exact = uniform_median_tail(p, k);
        double bound = median_tail_bound(p, k, BoundForm::two_sided);
        ok = ok && exact <= bound;
        worst_ratio = std::max(worst_ratio, exact / bound);
      }
    }
    tally.line(ok, "median tail oracle stays below closed-form bound "
                   "(max ratio " +
                       fmt(worst_ratio) + ")");
    double base_dev = 0.0;
    for (int pi = 1; pi <= 9; ++pi) {
      double p = 0.05 * pi;
      base_dev = std::max(base_dev, std::fabs(uniform_median_tail(p, 0) - p));
    }
    tally.line(base_dev <= 1e-12,
               "median tail base case k=0 is exact (max dev " + fmt(base_dev) +
                   ")");
  }
  out << (tally.all_pass ? "RESULT PASS\n" : "RESULT FAIL\n");
  return tally.all_pass ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"sample-efficient mean estimation with certified failure "
               "bounds"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  Options opts;

  CLI::App* plan_cmd =
      app.add_subcommand("plan", "print the draw budget for a target accuracy");
  add_accuracy_options(plan_cmd, opts);

  CLI::App* estimate_cmd =
      app.add_subcommand("estimate", "run one estimate on a distribution");
  add_accuracy_options(estimate_cmd, opts);
  estimate_cmd->add_option("--distribution", opts.distribution,
                           "source, e.g. exponential:mean=1");
  estimate_cmd->add_option("--seed", opts.seed, "RNG seed");

  CLI::App* simulate_cmd = app.add_subcommand(
      "simulate", "measure the failure rate over many seeded trials");
  add_accuracy_options(simulate_cmd, opts);
  simulate_cmd->add_option("--distribution", opts.distribution,
                           "source, e.g. exponential:mean=1");
  simulate_cmd->add_option("--trials", opts.trials, "number of trials")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--seed", opts.seed, "master seed");
  simulate_cmd->add_option("--threads", opts.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--output", opts.output, "json or csv");

  CLI::App* verify_cmd = app.add_subcommand(
      "verify-lemmas", "certify the tail bounds behind the plans");
  verify_cmd->add_option("--eps-min", opts.eps_min, "grid start");
  verify_cmd->add_option("--eps-max", opts.eps_max, "grid end (< 1/3)");
  verify_cmd->add_option("--eps-step", opts.eps_step, "grid step");
  verify_cmd->add_option("--grid-points", opts.grid_points,
                         "offset grid density (>= 1000)");
  verify_cmd
      ->add_option("--inflate-alpha", opts.inflate_alpha,
                   "multiply the certified spread budget (negative-control "
                   "hook)")
      ->group("");  // hidden
  verify_cmd->add_option("--config", opts.config_path,
                         "JSON file with option values; explicit flags win");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    CLI::App* active = nullptr;
    for (CLI::App* sub : {plan_cmd, estimate_cmd, simulate_cmd, verify_cmd}) {
      if (sub->parsed()) active = sub;
    }
    apply_config(active, opts, err);
    if (active == plan_cmd) return cmd_plan(opts, out);
    if (active == estimate_cmd) return cmd_estimate(opts, out);
    if (active == simulate_cmd) return cmd_simulate(opts, out, err);
    return cmd_verify(opts, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace mcras
