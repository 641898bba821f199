#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace jndsur {

/// Hyperparameters of an epsilon-insensitive RBF support vector regressor.
struct SvrParams {
  double c = 10.0;        ///< box constraint on the dual coefficients
  double epsilon = 0.5;   ///< half-width of the insensitive tube
  double gamma = 1.0 / 36.0;
  double tol = 1e-3;      ///< stop once the maximal KKT violation drops below tol
  long max_iterations = 10'000'000;

  void validate() const;
};

/// Kernel expansion f(x) = sum_i coef_i * exp(-gamma * |x - sv_i|^2) + bias.
struct SvrModel {
  double gamma = 1.0;
  double bias = 0.0;
  std::size_t dim = 0;
  std::vector<std::vector<double>> support;
  std::vector<double> coef;

  [[nodiscard]] double predict(std::span<const double> x) const;
};

struct SvrTrainInfo {
  long iterations = 0;
  bool converged = false;
  double max_violation = 0.0;
  /// Dual objective -1/2 b'Kb - eps*|b|_1 + y'b at the returned solution.
  double dual_objective = 0.0;
  /// alpha_i - alpha_i^* for every training row, zeros included.
  std::vector<double> beta;
  /// Dual objective after each SMO step; filled only when requested.
  std::vector<double> objective_trace;
};

[[nodiscard]] double rbf_kernel(std::span<const double> a, std::span<const double> b,
                                double gamma);

/// Solves the epsilon-SVR dual with sequential minimal optimisation using
/// second-order working-set selection. At least one row is required.
[[nodiscard]] SvrModel svr_train(std::span<const std::vector<double>> rows,
                                 std::span<const double> targets, const SvrParams& params,
                                 SvrTrainInfo* info = nullptr, bool record_trace = false);

[[nodiscard]] double svr_predict(const SvrModel& model, std::span<const double> x);

}  // namespace jndsur
