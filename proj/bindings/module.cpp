#include <pybind11/pybind11.h>

#include <cstdint>
#include <string>

#include "mcras/cli.hpp"
#include "mcras/distributions.hpp"
#include "mcras/estimators.hpp"
#include "mcras/harness.hpp"
#include "mcras/lemma_verify.hpp"
#include "mcras/plan.hpp"
#include "mcras/stats.hpp"

namespace py = pybind11;

namespace {

mcras::Side side_from_name(const std::string& name) {
  if (name == "upper") return mcras::Side::upper;
  if (name == "lower") return mcras::Side::lower;
  throw std::invalid_argument("side must be 'upper' or 'lower'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "sample-efficient mean estimation with certified failure bounds";
  m.attr("__version__") = mcras::kVersion;

  py::class_<mcras::SamplingPlan>(m, "SamplingPlan")
      .def_readonly("group_size", &mcras::SamplingPlan::group_size)
      .def_readonly("num_groups", &mcras::SamplingPlan::num_groups)
      .def_readonly("total", &mcras::SamplingPlan::total)
      .def_readonly("built_epsilon", &mcras::SamplingPlan::built_epsilon)
      .def_property_readonly(
          "kind",
          [](const mcras::SamplingPlan& plan) {
            return std::string(mcras::kind_name(plan.kind));
          })
      .def("__repr__", [](const mcras::SamplingPlan& plan) {
        return "SamplingPlan(kind=" + std::string(mcras::kind_name(plan.kind)) +
               ", group_size=" + std::to_string(plan.group_size) +
               ", num_groups=" + std::to_string(plan.num_groups) +
               ", total=" + std::to_string(plan.total) + ")";
      });

  m.def(
      "plan_for",
      [](const std::string& kind, double c, double epsilon, double delta) {
        return mcras::plan_for(mcras::kind_from_name(kind),
                               mcras::RelativeSpread(c),
                               mcras::Accuracy(epsilon, delta));
      },
      py::arg("kind"), py::arg("c"), py::arg("epsilon"), py::arg("delta"),
      "Draw budget for an estimator kind ('mean', 'mom', or 'scaled').");

  m.def("nuisance_factor", &mcras::nuisance_factor, py::arg("epsilon"));
  m.def(
      "chebyshev_failure",
      [](double c, double epsilon, std::int64_t k) {
        return mcras::chebyshev_failure(c, epsilon, k);
      },
      py::arg("c"), py::arg("epsilon"), py::arg("k"));
  m.def(
      "median_tail_bound",
      [](double p, std::int64_t k, bool two_sided) {
        return mcras::median_tail_bound(p, k,
                                        two_sided
                                            ? mcras::BoundForm::two_sided
                                            : mcras::BoundForm::one_sided);
      },
      py::arg("p"), py::arg("k"), py::arg("two_sided") = true);
  m.def("mom_leading_constant", &mcras::mom_leading_constant);
  m.def("scaled_leading_constant", &mcras::scaled_leading_constant);

  m.def("spread_limit_upper", &mcras::spread_limit_upper, py::arg("epsilon"));
  m.def("spread_limit_lower", &mcras::spread_limit_lower, py::arg("epsilon"));
  m.def("worst_upper_offset", &mcras::worst_upper_offset, py::arg("epsilon"));
  m.def("alpha_sq_limit", &mcras::alpha_sq_limit, py::arg("k2"),
        py::arg("epsilon"));
  m.def("uniform_median_tail", &mcras::uniform_median_tail, py::arg("p"),
        py::arg("k"));
  m.def(
      "scaled_tail_probabilities",
      [](double p1, double k1, double k2, double epsilon) {
        mcras::TailPair tails =
            mcras::scaled_tail_probabilities({p1, k1, k2}, epsilon);
        return py::make_tuple(tails.upper, tails.lower);
      },
      py::arg("p1"), py::arg("k1"), py::arg("k2"), py::arg("epsilon"),
      "Exact (upper, lower) tail pair for a scaled two-point variable.");
  m.def(
      "min_containment",
      [](double epsilon, double alpha, const std::string& side,
         int grid_points) {
        mcras::ContainmentMin result = mcras::min_containment(
            epsilon, alpha, side_from_name(side), grid_points);
        return py::make_tuple(result.min_value, result.argmin);
      },
      py::arg("epsilon"), py::arg("alpha"), py::arg("side"),
      py::arg("grid_points") = 2000);
  m.def(
      "worst_tail_scan",
      [](double epsilon, double alpha, const std::string& side,
         int grid_points) {
        return mcras::worst_tail_scan(epsilon, alpha, side_from_name(side),
                                      grid_points);
      },
      py::arg("epsilon"), py::arg("alpha"), py::arg("side"),
      py::arg("grid_points") = 2000);

  m.def("clopper_pearson_upper", &mcras::clopper_pearson_upper,
        py::arg("failures"), py::arg("trials"), py::arg("confidence") = 0.99);

  m.def(
      "estimate",
      [](const std::string& kind, double c, double epsilon, double delta,
         const std::string& distribution, std::uint64_t seed) {
        auto source =
            mcras::make_source(mcras::DistributionSpec::parse(distribution));
        mcras::Estimate est =
            mcras::estimate({mcras::kind_from_name(kind),
                             mcras::Accuracy(epsilon, delta),
                             mcras::RelativeSpread(c), seed},
                            *source);
        py::dict out;
        out["value"] = est.value;
        out["draws_consumed"] = est.draws_consumed;
        out["plan"] = est.plan;
        if (auto mu = source->true_mean()) {
          out["true_mean"] = *mu;
          out["rel_error"] = est.value / *mu - 1.0;
        } else {
          out["true_mean"] = py::none();
          out["rel_error"] = py::none();
        }
        return out;
      },
      py::arg("kind"), py::arg("c"), py::arg("epsilon"), py::arg("delta"),
      py::arg("distribution"), py::arg("seed") = 0,
      "One seeded estimate; distribution like 'exponential:mean=1'.");

  m.def(
      "simulate",
      [](const std::string& kind, double c, double epsilon, double delta,
         const std::string& distribution, std::int64_t trials,
         std::uint64_t seed, int threads) {
        mcras::ExperimentConfig config{
            mcras::kind_from_name(kind),  mcras::Accuracy(epsilon, delta),
            mcras::RelativeSpread(c),
            mcras::DistributionSpec::parse(distribution),
            trials,                       seed,
            threads};
        mcras::ExperimentResult result = mcras::run_experiment(config);
        py::dict out;
        out["trials"] = result.report.trials;
        out["failures"] = result.report.failures;
        out["empirical_rate"] = result.report.empirical_rate;
        out["cp99_upper"] = result.report.cp99_upper;
        out["draws_per_trial"] = result.report.draws_per_trial;
        out["wall_time_seconds"] = result.report.wall_time_seconds;
        return out;
      },
      py::arg("kind"), py::arg("c"), py::arg("epsilon"), py::arg("delta"),
      py::arg("distribution"), py::arg("trials") = 1000, py::arg("seed") = 0,
      py::arg("threads") = 1,
      "Seeded failure-rate experiment; deterministic for any thread count.");
}
