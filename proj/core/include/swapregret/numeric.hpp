#pragma once

#include <span>

namespace swapregret {

// Compensated (Kahan) accumulator. Regret accounting over very long horizons
// sums millions of same-sign terms; the correction term keeps the drift flat.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

// log(sum_i exp(args[i])), stable under large magnitudes. Empty input is the
// caller's bug; -inf entries are tolerated.
double log_sum_exp(std::span<const double> args);

}  // namespace swapregret
