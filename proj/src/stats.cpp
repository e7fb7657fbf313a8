#include "mcras/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace mcras {

namespace {

// Lentz's method for the continued fraction of I_x(a, b); converges for
// x < (a+1)/(a+b+2), the caller flips otherwise.
double beta_cf(double x, double a, double b) {
  const double tiny = 1e-300;
  const double eps = 1e-16;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 400; ++m) {
    double md = static_cast<double>(m);
    double m2 = 2.0 * md;
    double aa = md * (b - md) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + md) * (qab + md) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction stalled");
}

}  // namespace

double regularized_ibeta(double x, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw std::domain_error("regularized_ibeta needs a, b > 0");
  }
  if (!(x >= 0.0) || !(x <= 1.0)) {
    throw std::domain_error("regularized_ibeta needs x in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                     a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(x, a, b) / a;
  }
  return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

double clopper_pearson_upper(std::int64_t failures, std::int64_t trials,
                             double confidence) {
  if (trials < 1 || failures < 0 || failures > trials) {
    throw std::domain_error("need 0 <= failures <= trials, trials >= 1");
  }
  if (!(confidence > 0.0) || !(confidence < 1.0)) {
    throw std::domain_error("confidence must lie in (0, 1)");
  }
  if (failures == trials) return 1.0;
  // P(Bin(n, p) <= f) = I_{1-p}(n - f, f + 1) is decreasing in p; bisect
  // for the p where it crosses 1 - confidence.
  double tail_target = 1.0 - confidence;
  double nf = static_cast<double>(trials - failures);
  double fp = static_cast<double>(failures) + 1.0;
  double lo = static_cast<double>(failures) / static_cast<double>(trials);
  double hi = 1.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-13; ++iter) {
    double mid = 0.5 * (lo + hi);
    double below = regularized_ibeta(1.0 - mid, nf, fp);
    if (below > tail_target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace mcras
