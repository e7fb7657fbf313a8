#include "mcras/distributions.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mcras/lemma_verify.hpp"

namespace mcras {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

struct FamilyInfo {
  Family family;
  const char* name;
  std::vector<std::pair<const char*, double>> keys;  // key -> default (NaN = required)
};

const std::vector<FamilyInfo>& family_table() {
  static const double req = std::nan("");
  static const std::vector<FamilyInfo> table = {
      {Family::constant, "constant", {{"value", req}}},
      {Family::two_point, "two_point", {{"low", req}, {"high", req}, {"p", 0.5}}},
      {Family::exponential, "exponential", {{"mean", 1.0}}},
      {Family::scaled_bernoulli, "scaled_bernoulli", {{"value", 1.0}, {"p", req}}},
      {Family::log_normal, "log_normal", {{"mean", 1.0}, {"c", req}}},
      {Family::uniform_positive, "uniform_positive", {{"low", req}, {"high", req}}},
  };
  return table;
}

const FamilyInfo& info_for(Family family) {
  for (const auto& info : family_table()) {
    if (info.family == family) return info;
  }
  throw std::logic_error("unknown distribution family");
}

const FamilyInfo& info_for_name(const std::string& name) {
  for (const auto& info : family_table()) {
    if (name == info.name) return info;
  }
  throw std::invalid_argument("unknown distribution family: " + name);
}

double require(const DistributionSpec& spec, const char* key) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) {
    throw std::invalid_argument(std::string("missing parameter: ") + key);
  }
  return it->second;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class ConstantSource final : public SampleSource {
 public:
  ConstantSource(DistributionSpec spec, double value)
      : spec_(std::move(spec)), value_(value) {}
  double next_draw(RngStream&) const override { return value_; }
  std::string descriptor() const override { return spec_.canonical_text(); }
  std::optional<double> true_mean() const override { return value_; }
  std::optional<double> true_relative_spread() const override { return 0.0; }

 private:
  DistributionSpec spec_;
  double value_;
};

class TwoPointSource final : public SampleSource {
 public:
  TwoPointSource(DistributionSpec spec, double low, double high, double p)
      : spec_(std::move(spec)), low_(low), high_(high), p_(p) {}
  double next_draw(RngStream& rng) const override {
    return rng.next_unit() < p_ ? low_ : high_;
  }
  std::string descriptor() const override { return spec_.canonical_text(); }
  std::optional<double> true_mean() const override {
    return p_ * low_ + (1.0 - p_) * high_;
  }
  std::optional<double> true_relative_spread() const override {
    double sd = (high_ - low_) * std::sqrt(p_ * (1.0 - p_));
    return sd / *true_mean();
  }

 private:
  DistributionSpec spec_;
  double low_, high_, p_;
};

class ExponentialSource final : public SampleSource {
 public:
  ExponentialSource(DistributionSpec spec, double mean)
      : spec_(std::move(spec)), mean_(mean) {}
  double next_draw(RngStream& rng) const override {
    return -mean_ * std::log(rng.next_open_unit());
  }
  std::string descriptor() const override { return spec_.canonical_text(); }
  std::optional<double> true_mean() const override { return mean_; }
  std::optional<double> true_relative_spread() const override { return 1.0; }

 private:
  DistributionSpec spec_;
  double mean_;
};

class ScaledBernoulliSource final : public SampleSource {
 public:
  ScaledBernoulliSource(DistributionSpec spec, double value, double p)
      : spec_(std::move(spec)), value_(value), p_(p) {}
  double next_draw(RngStream& rng) const override {
    return rng.next_unit() < p_ ? value_ : 0.0;
  }
  std::string descriptor() const override { return spec_.canonical_text(); }
  std::optional<double> true_mean() const override { return value_ * p_; }
  std::optional<double> true_relative_spread() const override {
    return std::sqrt((1.0 - p_) / p_);
  }

 private:
  DistributionSpec spec_;
  double value_, p_;
};

class LogNormalSource final : public SampleSource {
 public:
  LogNormalSource(DistributionSpec spec, double mean, double c)
      : spec_(std::move(spec)), mean_(mean), c_(c) {
    double s2 = std::log1p(c * c);
    sigma_ = std::sqrt(s2);
    mu_ = std::log(mean) - 0.5 * s2;
  }
  double next_draw(RngStream& rng) const override {
    double u1 = rng.next_open_unit();
    double u2 = rng.next_unit();
    double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    return std::exp(mu_ + sigma_ * z);
  }
  std::string descriptor() const override { return spec_.canonical_text(); }
  std::optional<double> true_mean() const override { return mean_; }
  std::optional<double> true_relative_spread() const override { return c_; }

 private:
  DistributionSpec spec_;
  double mean_, c_;
  double mu_, sigma_;
};

class UniformPositiveSource final : public SampleSource {
 public:
  UniformPositiveSource(DistributionSpec spec, double low, double high)
      : spec_(std::move(spec)), low_(low), high_(high) {}
  double next_draw(RngStream& rng) const override {
    return low_ + (high_ - low_) * rng.next_unit();
  }
  std::string descriptor() const override { return spec_.canonical_text(); }
  std::optional<double> true_mean() const override {
    return 0.5 * (low_ + high_);
  }
  std::optional<double> true_relative_spread() const override {
    double sd = (high_ - low_) / std::sqrt(12.0);
    return sd / *true_mean();
  }

 private:
  DistributionSpec spec_;
  double low_, high_;
};

void check_probability(double p, const char* what) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in (0, 1)");
  }
}

void check_positive(double v, const char* what) {
  if (!std::isfinite(v) || !(v > 0.0)) {
    throw std::invalid_argument(std::string(what) +
                                " must be finite and positive");
  }
}

}  // namespace

DistributionSpec DistributionSpec::parse(const std::string& text) {
  std::string::size_type colon = text.find(':');
  std::string name = text.substr(0, colon);
  const FamilyInfo& info = info_for_name(name);
  DistributionSpec spec{info.family, {}};
  for (const auto& [key, fallback] : info.keys) {
    if (!std::isnan(fallback)) spec.params[key] = fallback;
  }
  std::string rest =
      colon == std::string::npos ? std::string() : text.substr(colon + 1);
  std::string::size_type pos = 0;
  while (pos < rest.size()) {
    std::string::size_type comma = rest.find(',', pos);
    std::string item = rest.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::string::size_type eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument("expected key=value, got: " + item);
    }
    std::string key = item.substr(0, eq);
    bool known = false;
    for (const auto& [candidate, fallback] : info.keys) {
      known = known || key == candidate;
    }
    if (!known) {
      throw std::invalid_argument("unknown parameter " + key + " for " + name);
    }
    std::string value_text = item.substr(eq + 1);
    std::size_t used = 0;
    double value;
    try {
      value = std::stod(value_text, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad numeric value: " + value_text);
    }
    if (used != value_text.size()) {
      throw std::invalid_argument("bad numeric value: " + value_text);
    }
    spec.params[key] = value;
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  for (const auto& [key, fallback] : info.keys) {
    if (spec.params.find(key) == spec.params.end()) {
      throw std::invalid_argument(std::string("missing parameter ") + key +
                                  " for " + name);
    }
  }
  return spec;
}

std::string DistributionSpec::canonical_text() const {
  const FamilyInfo& info = info_for(family);
  std::string out = info.name;
  char sep = ':';
  for (const auto& [key, fallback] : info.keys) {
    auto it = params.find(key);
    if (it == params.end()) continue;
    out += sep;
    out += key;
    out += '=';
    out += format_value(it->second);
    sep = ',';
  }
  return out;
}

DistributionSpec DistributionSpec::constant(double value) {
  return {Family::constant, {{"value", value}}};
}

DistributionSpec DistributionSpec::two_point(double low, double high,
                                             double p) {
  return {Family::two_point, {{"low", low}, {"high", high}, {"p", p}}};
}

DistributionSpec DistributionSpec::exponential(double mean) {
  return {Family::exponential, {{"mean", mean}}};
}

DistributionSpec DistributionSpec::scaled_bernoulli(double value, double p) {
  return {Family::scaled_bernoulli, {{"value", value}, {"p", p}}};
}

DistributionSpec DistributionSpec::log_normal(double mean, double c) {
  return {Family::log_normal, {{"mean", mean}, {"c", c}}};
}

DistributionSpec DistributionSpec::uniform_positive(double low, double high) {
  return {Family::uniform_positive, {{"low", low}, {"high", high}}};
}

std::shared_ptr<const SampleSource> make_source(const DistributionSpec& spec) {
  switch (spec.family) {
    case Family::constant: {
      double value = require(spec, "value");
      check_positive(value, "value");
      return std::make_shared<ConstantSource>(spec, value);
    }
    case Family::two_point: {
      double low = require(spec, "low");
      double high = require(spec, "high");
      double p = require(spec, "p");
      check_probability(p, "p");
      if (!(low >= 0.0) || !(high > low)) {
        throw std::invalid_argument("two_point needs 0 <= low < high");
      }
      if (!(p * low + (1.0 - p) * high > 0.0)) {
        throw std::invalid_argument("two_point mean must be positive");
      }
      return std::make_shared<TwoPointSource>(spec, low, high, p);
    }
    case Family::exponential: {
      double mean = require(spec, "mean");
      check_positive(mean, "mean");
      return std::make_shared<ExponentialSource>(spec, mean);
    }
    case Family::scaled_bernoulli: {
      double value = require(spec, "value");
      double p = require(spec, "p");
      check_positive(value, "value");
      check_probability(p, "p");
      return std::make_shared<ScaledBernoulliSource>(spec, value, p);
    }
    case Family::log_normal: {
      double mean = require(spec, "mean");
      double c = require(spec, "c");
      check_positive(mean, "mean");
      check_positive(c, "c");
      return std::make_shared<LogNormalSource>(spec, mean, c);
    }
    case Family::uniform_positive: {
      double low = require(spec, "low");
      double high = require(spec, "high");
      if (!(low >= 0.0) || !(high > low)) {
        throw std::invalid_argument("uniform_positive needs 0 <= low < high");
      }
      if (!(low + high > 0.0)) {
        throw std::invalid_argument("uniform_positive mean must be positive");
      }
      return std::make_shared<UniformPositiveSource>(spec, low, high);
    }
  }
  throw std::logic_error("unknown distribution family");
}

std::shared_ptr<const SampleSource> worst_case_group_source(double epsilon,
                                                            double mean) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0 / 3.0)) {
    throw std::domain_error("worst_case_group_source needs epsilon in (0,1/3)");
  }
  check_positive(mean, "mean");
  double alpha = spread_limit_upper(epsilon);
  return make_source(DistributionSpec::two_point(
      mean * (1.0 - alpha), mean * (1.0 + alpha), 0.5));
}

}  // namespace mcras
