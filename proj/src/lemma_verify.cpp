#include "mcras/lemma_verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace mcras {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::domain_error("epsilon must lie in (0, 1)");
  }
}

void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw std::domain_error("alpha must be finite and positive");
  }
}

// Minimizes f on [lo, hi] by golden section to the given width.
template <typename F>
double golden_min(F&& f, double lo, double hi, double xtol) {
  const double ratio = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

struct GridBest {
  double x;
  double value;
  double lo;  // refinement bracket around x, clipped to the domain
  double hi;
};

// Evaluates f on an even grid over [lo, hi] (skipping the endpoints when
// open), keeps the best point under cmp, and returns it with its
// neighboring bracket.
template <typename F, typename Cmp>
GridBest grid_scan(F&& f, double lo, double hi, int points, bool skip_lo,
                   bool skip_hi, Cmp cmp) {
  double step = (hi - lo) / points;
  int first = skip_lo ? 1 : 0;
  int last = skip_hi ? points - 1 : points;
  GridBest best{0.0, 0.0, 0.0, 0.0};
  bool have = false;
  for (int i = first; i <= last; ++i) {
    double x = lo + step * i;
    double v = f(x);
    if (!have || cmp(v, best.value)) {
      best = {x, v, std::max(lo + (skip_lo ? 0.5 * step : 0.0), x - step),
              std::min(hi - (skip_hi ? 0.5 * step : 0.0), x + step)};
      have = true;
    }
  }
  return best;
}

void check_grid(int grid_points) {
  if (grid_points < 1000) {
    throw std::domain_error("grid must have at least 1000 points");
  }
}

}  // namespace

TwoPointSpec TwoPointSpec::mean_one(double k1, double k2) {
  if (!(k1 <= 0.0) || !(k2 > 0.0)) {
    throw std::domain_error("mean_one needs k1 <= 0 < k2");
  }
  return {k2 / (k2 - k1), k1, k2};
}

TwoPointSpec TwoPointSpec::with_sd(double alpha, double k2) {
  check_alpha(alpha);
  if (!(k2 > 0.0)) {
    throw std::domain_error("with_sd needs k2 > 0");
  }
  double k1 = -(alpha * alpha) / k2;
  return {(k2 * k2) / (k2 * k2 + alpha * alpha), k1, k2};
}

double TwoPointSpec::mean() const {
  return 1.0 + p1 * k1 + (1.0 - p1) * k2;
}

double TwoPointSpec::variance() const {
  double m = p1 * k1 + (1.0 - p1) * k2;
  return p1 * (k1 - m) * (k1 - m) + (1.0 - p1) * (k2 - m) * (k2 - m);
}

TailPair scaled_tail_probabilities(const TwoPointSpec& spec, double epsilon) {
  check_epsilon(epsilon);
  if (!(spec.p1 >= 0.0) || !(spec.p1 <= 1.0)) {
    throw std::domain_error("p1 must lie in [0, 1]");
  }
  double lo_value = 1.0 + spec.k1;
  double hi_value = 1.0 + spec.k2;
  if (!(lo_value > 0.0) || !(hi_value > 0.0)) {
    throw std::domain_error("two-point values must stay positive");
  }
  // P(R >= x) = clamp((1+eps - x)/(2 eps)) for the uniform scaler R.
  auto up = [&](double v) {
    return clamp01((1.0 + epsilon - (1.0 + epsilon) / v) / (2.0 * epsilon));
  };
  auto down = [&](double v) {
    return clamp01(((1.0 - epsilon) / v - (1.0 - epsilon)) / (2.0 * epsilon));
  };
  double q_up = spec.p1 * up(lo_value) + (1.0 - spec.p1) * up(hi_value);
  double q_down = spec.p1 * down(lo_value) + (1.0 - spec.p1) * down(hi_value);
  return {q_up, q_down};
}

double upper_containment(double k2, double epsilon, double alpha) {
  check_epsilon(epsilon);
  check_alpha(alpha);
  if (!(k2 > 0.0)) {
    throw std::domain_error("upper_containment needs k2 > 0");
  }
  double a2 = alpha * alpha;
  double base = (k2 * k2) / (k2 * k2 + a2);
  if (k2 > 2.0 * epsilon / (1.0 - epsilon)) {
    return base;
  }
  double bracket =
      ((1.0 + epsilon) / (1.0 + k2) - (1.0 - epsilon)) / (2.0 * epsilon);
  return base + (a2 / (k2 * k2 + a2)) * bracket;
}

double lower_containment(double k1, double epsilon, double alpha) {
  check_epsilon(epsilon);
  check_alpha(alpha);
  if (!(k1 <= 0.0) || !(k1 > -1.0)) {
    throw std::domain_error("lower_containment needs -1 < k1 <= 0");
  }
  double a2 = alpha * alpha;
  double base = (k1 * k1) / (k1 * k1 + a2);
  // The scaled low value reaches 1-eps only while
  // (1-eps)/(1+k1) <= 1+eps, i.e. k1 >= -2 eps/(1+eps); the bracket
  // vanishes at the switch.
  if (k1 < -2.0 * epsilon / (1.0 + epsilon)) {
    return base;
  }
  double bracket =
      (1.0 + epsilon - (1.0 - epsilon) / (1.0 + k1)) / (2.0 * epsilon);
  return base + (a2 / (k1 * k1 + a2)) * bracket;
}

double alpha_sq_limit(double k2, double epsilon) {
  check_epsilon(epsilon);
  double denom = k2 * (epsilon + 2.0) - epsilon;
  if (denom == 0.0) {
    throw std::domain_error("alpha_sq_limit pole at k2 = eps/(eps+2)");
  }
  return k2 * k2 * (k2 + 1.0) * epsilon / denom;
}

double alpha_sq_limit_derivative(double k2, double epsilon) {
  check_epsilon(epsilon);
  double denom = k2 * (epsilon + 2.0) - epsilon;
  if (denom == 0.0) {
    throw std::domain_error("alpha_sq_limit pole at k2 = eps/(eps+2)");
  }
  double quad = k2 * k2 * (epsilon + 2.0) + k2 * (1.0 - epsilon) - epsilon;
  return 2.0 * k2 * epsilon * quad / (denom * denom);
}

double worst_upper_offset(double epsilon) {
  check_epsilon(epsilon);
  double root = std::sqrt(5.0 * epsilon * epsilon + 6.0 * epsilon + 1.0);
  return (epsilon - 1.0 + root) / (2.0 * (epsilon + 2.0));
}

double spread_limit_upper(double epsilon) {
  check_epsilon(epsilon);
  double shrink = 1.0 - epsilon;
  double ratio =
      shrink * shrink * (1.0 + epsilon - epsilon * epsilon) / (1.0 + epsilon);
  return epsilon * std::sqrt(ratio);
}

double spread_limit_lower(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 0.5)) {
    throw std::domain_error("spread_limit_lower needs epsilon in (0, 1/2)");
  }
  double grow = 1.0 + epsilon;
  double num = grow * grow * grow * (1.0 - 2.0 * epsilon);
  double denom = 1.0 - 3.0 * epsilon + 2.0 * epsilon * epsilon;
  return epsilon * std::sqrt(num / denom);
}

ContainmentMin min_containment(double epsilon, double alpha, Side side,
                               int grid_points) {
  check_epsilon(epsilon);
  check_alpha(alpha);
  check_grid(grid_points);
  double bound = 2.0 * epsilon / (1.0 - epsilon);
  if (side == Side::upper) {
    auto f = [&](double k2) { return upper_containment(k2, epsilon, alpha); };
    GridBest best = grid_scan(f, 0.0, bound, grid_points, true, false,
                              std::less<double>());
    double xm = golden_min(f, best.lo, best.hi, 1e-10);
    double vm = f(xm);
    if (best.value < vm) return {best.value, best.x};
    return {vm, xm};
  }
  // The lower window needs 1+k1 > 0, which holds for eps < 1/3.
  auto f = [&](double k1) { return lower_containment(k1, epsilon, alpha); };
  GridBest best =
      grid_scan(f, -bound, 0.0, grid_points, false, true, std::less<double>());
  double xm = golden_min(f, best.lo, best.hi, 1e-10);
  double vm = f(xm);
  if (best.value < vm) return {best.value, best.x};
  return {vm, xm};
}

double worst_tail_scan(double epsilon, double alpha, Side side,
                       int grid_points) {
  check_epsilon(epsilon);
  check_alpha(alpha);
  check_grid(grid_points);
  double bound = 2.0 * epsilon / (1.0 - epsilon);
  if (side == Side::upper) {
    auto q = [&](double k2) {
      return scaled_tail_probabilities(TwoPointSpec::with_sd(alpha, k2),
                                       epsilon)
          .upper;
    };
    // Members need k2 > alpha^2 to keep the low value positive. Past the
    // window the tail is alpha^2/(k2^2+alpha^2), decreasing, so extending
    // to 4 alpha^2 covers oversized alphas without missing the supremum.
    double lo = alpha * alpha;
    double hi = std::max(bound, 4.0 * alpha * alpha);
    GridBest best =
        grid_scan(q, lo, hi, grid_points, true, false, std::greater<double>());
    auto neg = [&](double k2) { return -q(k2); };
    double xm = golden_min(neg, best.lo, best.hi, 1e-10);
    return std::max(best.value, q(xm));
  }
  auto q = [&](double k1) {
    double k2 = alpha * alpha / (-k1);
    return scaled_tail_probabilities(TwoPointSpec::with_sd(alpha, k2), epsilon)
        .lower;
  };
  GridBest best =
      grid_scan(q, -bound, 0.0, grid_points, false, true, std::greater<double>());
  auto neg = [&](double k1) { return -q(k1); };
  double xm = golden_min(neg, best.lo, best.hi, 1e-10);
  return std::max(best.value, q(xm));
}

namespace {

// Beta(k+1, k+1) density via logs; zero off the open interval for k >= 1.
struct MedianDensity {
  double k;
  double log_norm;  // lgamma(2k+2) - 2 lgamma(k+1)
  double operator()(double x) const {
    if (k == 0.0) return 1.0;
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::exp(log_norm + k * (std::log(x) + std::log1p(-x)));
  }
};

double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_step(F&& f, double a, double fa, double b, double fb,
                     double fm, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = simpson(a, fa, m, fm, flm);
  double right = simpson(m, fm, b, fb, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

template <typename F>
double adaptive_simpson(F&& f, double a, double b, double rel_tol) {
  // Coarse composite pass anchors the magnitude so the tolerance can be
  // relative; the integrand here is nonnegative.
  int n = 64;
  double h = (b - a) / n;
  double coarse = 0.0;
  for (int i = 0; i < n; ++i) {
    double x0 = a + i * h, x1 = x0 + h;
    coarse += simpson(x0, f(x0), x1, f(x1), f(0.5 * (x0 + x1)));
  }
  double tol = std::max(coarse * rel_tol, 1e-200);
  double m = 0.5 * (a + b);
  return adaptive_step(f, a, f(a), b, f(b), f(m),
                       simpson(a, f(a), b, f(b), f(m)), tol, 52);
}

}  // namespace

double uniform_median_tail(double p, std::int64_t k) {
  if (!(p > 0.0) || !(p < 1.0) || k < 0) {
    throw std::domain_error("uniform_median_tail needs p in (0,1), k >= 0");
  }
  double kd = static_cast<double>(k);
  MedianDensity density{kd, std::lgamma(2.0 * kd + 2.0) -
                                2.0 * std::lgamma(kd + 1.0)};
  return adaptive_simpson(density, 1.0 - p, 1.0, 1e-12);
}

}  // namespace mcras
