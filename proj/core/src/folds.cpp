#include "jndsur/folds.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "jndsur/error.hpp"

namespace jndsur {

std::vector<int> kfold_split(std::size_t count, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidInput("kfold_split: k must be at least 2");
  if (count < static_cast<std::size_t>(k)) {
    throw InvalidInput("kfold_split: " + std::to_string(count) + " items cannot fill " +
                       std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold(count);
  for (std::size_t pos = 0; pos < count; ++pos) {
    fold[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return fold;
}

}  // namespace jndsur
