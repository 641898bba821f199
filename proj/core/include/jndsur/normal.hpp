#pragma once

namespace jndsur {

/// Standard normal upper-tail probability Q(z) = P(Z > z).
[[nodiscard]] double normal_q(double z) noexcept;

/// Standard normal CDF, 1 - Q(z).
[[nodiscard]] double normal_cdf(double z) noexcept;

/// Returns z with Q(z) == p, found by bisection. p must lie in (0, 1).
[[nodiscard]] double normal_q_inverse(double p);

}  // namespace jndsur
