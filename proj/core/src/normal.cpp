#include "jndsur/normal.hpp"

#include <cmath>
#include <numbers>

#include "jndsur/error.hpp"

namespace jndsur {

double normal_q(double z) noexcept { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidInput("normal_q_inverse: probability must lie in (0, 1)");
  }
  // Q is strictly decreasing; Q(-40) == 1 and Q(40) == 0 in double precision.
  double lo = -40.0;
  double hi = 40.0;
  for (int iter = 0; iter < 200 && hi - lo > 1e-14; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (normal_q(mid) > p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace jndsur
