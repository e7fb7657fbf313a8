#pragma once

#include <cmath>

namespace mcras {

// Neumaier compensated accumulator; the result is independent of magnitude
// ordering to far better than plain summation.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::fabs(sum) >= std::fabs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

}  // namespace mcras
