#include "swapregret/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "swapregret/errors.hpp"

namespace swapregret {

double log_sum_exp(std::span<const double> args) {
  if (args.empty()) throw ParameterError("log_sum_exp: empty input");
  double m = *std::max_element(args.begin(), args.end());
  if (!std::isfinite(m)) {
    // All -inf sums to -inf; a +inf or NaN argument propagates.
    return m;
  }
  double s = 0.0;
  for (double a : args) s += std::exp(a - m);
  return m + std::log(s);
}

}  // namespace swapregret
