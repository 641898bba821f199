#pragma once
// Small random epsilon-SVR problems shared by the solver tests and the
// acceptance run. C and epsilon are chosen so the solutions mix free and
// bounded support vectors.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "jndsur/svr.hpp"

namespace oracle {

struct SvrProblem {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  jndsur::SvrParams params;
};

inline SvrProblem random_svr_problem(std::size_t n, std::size_t dim, std::uint64_t seed, double c,
                                     double eps) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SvrProblem p;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> row(dim);
    for (auto& v : row) v = u(rng);
    double t = std::sin(2.0 * row[0]);
    if (dim > 1) t += 0.5 * row[1] * row[1];
    p.y.push_back(t + 0.3 * u(rng));
    p.x.push_back(std::move(row));
  }
  p.params.c = c;
  p.params.epsilon = eps;
  p.params.gamma = 1.0;
  p.params.tol = 1e-6;
  return p;
}

/// Every n <= 10 fixture: n in {1, 2, 3, 5, 8, 10} x dim in {1, 2, 4} x
/// three (C, epsilon) pairs.
inline std::vector<SvrProblem> svr_oracle_fixtures() {
  std::vector<SvrProblem> out;
  std::uint64_t seed = 1;
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 10u}) {
    for (std::size_t dim : {1u, 2u, 4u}) {
      out.push_back(random_svr_problem(n, dim, seed++, 1.0, 0.05));
      out.push_back(random_svr_problem(n, dim, seed++, 10.0, 0.2));
      out.push_back(random_svr_problem(n, dim, seed++, 0.3, 0.0));
    }
  }
  return out;
}

}  // namespace oracle
