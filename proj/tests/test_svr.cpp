#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "dense_qp.hpp"
#include "svr_fixtures.hpp"
#include "jndsur/error.hpp"
#include "jndsur/svr.hpp"

using namespace jndsur;

namespace {

using Problem = oracle::SvrProblem;

Problem random_problem(std::size_t n, std::size_t dim, std::uint64_t seed, double c, double eps) {
  return oracle::random_svr_problem(n, dim, seed, c, eps);
}

}  // namespace

TEST(SvrParams, Validation) {
  SvrParams p;
  EXPECT_NO_THROW(p.validate());
  p.c = 0;
  EXPECT_THROW(p.validate(), InvalidInput);
  p = SvrParams{};
  p.epsilon = -1;
  EXPECT_THROW(p.validate(), InvalidInput);
  p = SvrParams{};
  p.gamma = 0;
  EXPECT_THROW(p.validate(), InvalidInput);
}

TEST(Svr, TubeHoldsOnLine) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back({i / 19.0});
    y.push_back(i / 19.0);
  }
  SvrParams p;
  p.c = 100.0;
  p.epsilon = 0.1;
  p.gamma = 1.0;
  const SvrModel m = svr_train(x, y, p);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_LE(std::abs(m.predict(x[i]) - y[i]), 0.1 + p.tol) << i;
  }
}

TEST(Svr, SinglePoint) {
  SvrParams p;
  p.epsilon = 0.5;
  const std::vector<std::vector<double>> x{{1.0, 2.0}};
  const std::vector<double> y{7.0};
  const SvrModel m = svr_train(x, y, p);
  EXPECT_LE(std::abs(m.predict(x[0]) - 7.0), 0.5 + 1e-12);
}

TEST(Svr, PredictAtSupportVector) {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 20; ++i) {
    x.push_back({static_cast<double>(i) / 4.0});
    y.push_back(static_cast<double>(i) / 4.0);
  }
  SvrParams p;
  p.c = 100.0;
  p.epsilon = 0.05;
  p.gamma = 0.5;
  const SvrModel m = svr_train(x, y, p);
  ASSERT_FALSE(m.support.empty());
  const auto it = std::find(x.begin(), x.end(), m.support.front());
  ASSERT_NE(it, x.end());
  EXPECT_LT(std::abs(m.predict(*it) - y[static_cast<std::size_t>(it - x.begin())]), 0.1);
}

TEST(Svr, FarPointReturnsBias) {
  const Problem p = random_problem(10, 2, 77, 1.0, 0.1);
  const SvrModel m = svr_train(p.x, p.y, p.params);
  EXPECT_NEAR(m.predict(std::vector<double>{100.0, -100.0}), m.bias, 1e-300);
}

TEST(Svr, DimensionMismatch) {
  const Problem p = random_problem(6, 2, 5, 1.0, 0.1);
  const SvrModel m = svr_train(p.x, p.y, p.params);
  EXPECT_THROW((void)m.predict(std::vector<double>{1.0}), InvalidInput);
  auto bad = p.x;
  bad[3].push_back(0.0);
  EXPECT_THROW((void)svr_train(bad, p.y, p.params), InvalidInput);
  EXPECT_THROW((void)svr_train(p.x, std::vector<double>{1.0}, p.params), InvalidInput);
}

TEST(Svr, IdenticalRowsDifferentTargets) {
  const std::vector<std::vector<double>> x(6, std::vector<double>{0.5, 0.5});
  const std::vector<double> y{1, 2, 3, 4, 5, 6};
  SvrParams p;
  p.epsilon = 0.1;
  p.c = 1.0;
  SvrTrainInfo info;
  const SvrModel m = svr_train(x, y, p, &info);
  EXPECT_TRUE(info.converged);
  const double f = m.predict(x[0]);
  EXPECT_GE(f, 1.0);
  EXPECT_LE(f, 6.0);
}

TEST(Svr, ConstantTargets) {
  const Problem base = random_problem(15, 3, 8, 10.0, 0.5);
  const std::vector<double> y(15, 4.25);
  const SvrModel m = svr_train(base.x, y, base.params);
  for (const auto& row : base.x) EXPECT_NEAR(m.predict(row), 4.25, 1e-12);
  EXPECT_TRUE(m.support.empty());
}

TEST(Svr, DualFeasibilityAndMonotoneObjective) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Problem p = random_problem(30, 3, seed, 2.0, 0.1);
    SvrTrainInfo info;
    (void)svr_train(p.x, p.y, p.params, &info, true);
    EXPECT_TRUE(info.converged);
    double sum = 0.0;
    for (double b : info.beta) {
      EXPECT_LE(std::abs(b), p.params.c + 1e-12);
      sum += b;
    }
    EXPECT_NEAR(sum, 0.0, 1e-9);
    for (std::size_t k = 1; k < info.objective_trace.size(); ++k) {
      EXPECT_GE(info.objective_trace[k], info.objective_trace[k - 1] - 1e-12);
    }
  }
}

TEST(Svr, MatchesDenseQpOracle) {
  int with_free = 0;
  for (const Problem& p : oracle::svr_oracle_fixtures()) {
    SvrTrainInfo info;
    const SvrModel m = svr_train(p.x, p.y, p.params, &info);
    const auto ref = oracle::solve_svr_dual(p.x, p.y, p.params.c, p.params.epsilon, p.params.gamma);
    EXPECT_NEAR(info.dual_objective, ref.objective, 1e-4) << "n=" << p.x.size();

    bool has_free = false;
    for (double b : info.beta) has_free |= std::abs(b) > 1e-6 && std::abs(b) < p.params.c - 1e-6;
    with_free += has_free ? 1 : 0;
    if (!has_free) continue;  // bias is not unique without a free support vector
    std::mt19937_64 rng(p.x.size());
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    std::vector<std::vector<double>> queries = p.x;
    for (int k = 0; k < 5; ++k) {
      std::vector<double> q(p.x.front().size());
      for (auto& v : q) v = u(rng);
      queries.push_back(q);
    }
    for (const auto& q : queries) {
      EXPECT_NEAR(m.predict(q), oracle::dense_predict(ref, p.x, p.params.gamma, q), 1e-3);
    }
  }
  EXPECT_GT(with_free, 20);
}

TEST(Svr, EightPointTwoDimensionalFixture) {
  // Hand-written points on a saddle with a tight tube.
  const std::vector<std::vector<double>> x{{0, 0},    {1, 0},   {0, 1},   {1, 1},
                                           {0.5, 0.5}, {-1, 0}, {0, -1}, {-0.5, 0.8}};
  std::vector<double> y;
  for (const auto& r : x) y.push_back(r[0] * r[0] - r[1] * r[1]);
  SvrParams p;
  p.c = 5.0;
  p.epsilon = 0.05;
  p.gamma = 0.7;
  p.tol = 1e-6;
  SvrTrainInfo info;
  const SvrModel m = svr_train(x, y, p, &info);
  const auto ref = oracle::solve_svr_dual(x, y, p.c, p.epsilon, p.gamma);
  EXPECT_NEAR(info.dual_objective, ref.objective, 1e-4);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(info.beta[i], ref.beta(static_cast<Eigen::Index>(i)), 1e-3);
    EXPECT_NEAR(m.predict(x[i]), oracle::dense_predict(ref, x, p.gamma, x[i]), 1e-3);
  }
}
