#pragma once

#include <cstdint>
#include <vector>

namespace jndsur {

/// Assigns each of `count` items to one of k test folds after a seeded
/// shuffle. Fold sizes differ by at most one. Requires count >= k >= 2.
[[nodiscard]] std::vector<int> kfold_split(std::size_t count, int k, std::uint64_t seed);

}  // namespace jndsur
