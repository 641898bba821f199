#include "jndsur/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jndsur/error.hpp"

namespace jndsur {

void SvrParams::validate() const {
  if (!(c > 0.0)) throw InvalidInput("SvrParams: C must be positive");
  if (!(epsilon >= 0.0)) throw InvalidInput("SvrParams: epsilon must be non-negative");
  if (!(gamma > 0.0)) throw InvalidInput("SvrParams: gamma must be positive");
  if (!(tol > 0.0)) throw InvalidInput("SvrParams: tol must be positive");
  if (max_iterations < 1) throw InvalidInput("SvrParams: max_iterations must be positive");
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    d2 += d * d;
  }
  return std::exp(-gamma * d2);
}

double SvrModel::predict(std::span<const double> x) const {
  if (x.size() != dim) {
    throw InvalidInput("svr_predict: expected dimension " + std::to_string(dim) + ", got " +
                       std::to_string(x.size()));
  }
  double f = bias;
  for (std::size_t i = 0; i < support.size(); ++i) f += coef[i] * rbf_kernel(support[i], x, gamma);
  return f;
}

double svr_predict(const SvrModel& model, std::span<const double> x) { return model.predict(x); }

namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// The dual is written over 2n variables a = (alpha, alpha*) with signs
// s = (+1..., -1...):  min 1/2 a'Qa + p'a  s.t.  s'a = 0, 0 <= a <= C,
// where Q_tu = s_t s_u K(t mod n, u mod n), p = (eps - y, eps + y).
class SmoSolver {
 public:
  SmoSolver(const std::vector<double>& kernel, std::size_t n, std::span<const double> y,
            const SvrParams& params)
      : kernel_(kernel), n_(n), l_(2 * n), c_(params.c), tol_(params.tol),
        alpha_(l_, 0.0), grad_(l_), p_(l_) {
    for (std::size_t i = 0; i < n_; ++i) {
      p_[i] = params.epsilon - y[i];
      p_[i + n_] = params.epsilon + y[i];
    }
    grad_ = p_;
  }

  void solve(long max_iterations, SvrTrainInfo& info, bool record_trace) {
    long iter = 0;
    bool converged = false;
    double violation = 0.0;
    while (iter < max_iterations) {
      std::size_t i = 0;
      std::size_t j = 0;
      if (select_working_set(i, j, violation)) {
        converged = true;
        break;
      }
      ++iter;
      update_pair(i, j);
      if (record_trace) info.objective_trace.push_back(dual_objective());
    }
    if (!converged) {
      std::size_t i = 0;
      std::size_t j = 0;
      converged = select_working_set(i, j, violation);
    }
    info.iterations = iter;
    info.converged = converged;
    info.max_violation = violation;
  }

  [[nodiscard]] double dual_objective() const {
    double f = 0.0;
    for (std::size_t t = 0; t < l_; ++t) f += alpha_[t] * (grad_[t] + p_[t]);
    return -0.5 * f;
  }

  [[nodiscard]] double bias() const { return -rho(); }

  [[nodiscard]] std::vector<double> beta() const {
    std::vector<double> b(n_);
    for (std::size_t i = 0; i < n_; ++i) b[i] = alpha_[i] - alpha_[i + n_];
    return b;
  }

 private:
  [[nodiscard]] double sign(std::size_t t) const { return t < n_ ? 1.0 : -1.0; }
  [[nodiscard]] double q(std::size_t t, std::size_t u) const {
    return sign(t) * sign(u) * kernel_[(t % n_) * n_ + (u % n_)];
  }
  [[nodiscard]] bool at_upper(std::size_t t) const { return alpha_[t] >= c_; }
  [[nodiscard]] bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }

  // Returns true when the KKT conditions hold within tol.
  bool select_working_set(std::size_t& out_i, std::size_t& out_j, double& violation) const {
    double gmax = -kInf;
    double gmax2 = -kInf;
    std::size_t gmax_idx = l_;
    std::size_t gmin_idx = l_;
    double obj_diff_min = kInf;

    for (std::size_t t = 0; t < l_; ++t) {
      if (sign(t) > 0) {
        if (!at_upper(t) && -grad_[t] >= gmax) {
          gmax = -grad_[t];
          gmax_idx = t;
        }
      } else if (!at_lower(t) && grad_[t] >= gmax) {
        gmax = grad_[t];
        gmax_idx = t;
      }
    }

    const std::size_t i = gmax_idx;
    for (std::size_t t = 0; t < l_; ++t) {
      if (sign(t) > 0) {
        if (at_lower(t)) continue;
        const double grad_diff = gmax + grad_[t];
        gmax2 = std::max(gmax2, grad_[t]);
        if (grad_diff > 0.0 && i < l_) {
          double quad = q(i, i) + q(t, t) - 2.0 * sign(i) * q(i, t);
          if (quad <= 0.0) quad = kTau;
          const double obj_diff = -(grad_diff * grad_diff) / quad;
          if (obj_diff <= obj_diff_min) {
            gmin_idx = t;
            obj_diff_min = obj_diff;
          }
        }
      } else {
        if (at_upper(t)) continue;
        const double grad_diff = gmax - grad_[t];
        gmax2 = std::max(gmax2, -grad_[t]);
        if (grad_diff > 0.0 && i < l_) {
          double quad = q(i, i) + q(t, t) + 2.0 * sign(i) * q(i, t);
          if (quad <= 0.0) quad = kTau;
          const double obj_diff = -(grad_diff * grad_diff) / quad;
          if (obj_diff <= obj_diff_min) {
            gmin_idx = t;
            obj_diff_min = obj_diff;
          }
        }
      }
    }

    violation = gmax + gmax2;
    if (violation < tol_ || gmax_idx == l_ || gmin_idx == l_) return true;
    out_i = gmax_idx;
    out_j = gmin_idx;
    return false;
  }

  void update_pair(std::size_t i, std::size_t j) {
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    const double qij = q(i, j);
    double& ai = alpha_[i];
    double& aj = alpha_[j];

    if (sign(i) != sign(j)) {
      double quad = q(i, i) + q(j, j) + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else if (ai < 0.0) {
        ai = 0.0; aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c_) { ai = c_; aj = c_ - diff; }
      } else if (aj > c_) {
        aj = c_; ai = c_ + diff;
      }
    } else {
      double quad = q(i, i) + q(j, j) - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c_) {
        if (ai > c_) { ai = c_; aj = sum - c_; }
      } else if (aj < 0.0) {
        aj = 0.0; ai = sum;
      }
      if (sum > c_) {
        if (aj > c_) { aj = c_; ai = sum - c_; }
      } else if (ai < 0.0) {
        ai = 0.0; aj = sum;
      }
    }

    const double d_i = ai - old_i;
    const double d_j = aj - old_j;
    for (std::size_t t = 0; t < l_; ++t) grad_[t] += q(i, t) * d_i + q(j, t) * d_j;
  }

  [[nodiscard]] double rho() const {
    double ub = kInf;
    double lb = -kInf;
    double sum_free = 0.0;
    int free_count = 0;
    for (std::size_t t = 0; t < l_; ++t) {
      const double yg = sign(t) * grad_[t];
      if (at_upper(t)) {
        if (sign(t) < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (sign(t) > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        ++free_count;
        sum_free += yg;
      }
    }
    return free_count > 0 ? sum_free / free_count : 0.5 * (ub + lb);
  }

  const std::vector<double>& kernel_;
  std::size_t n_;
  std::size_t l_;
  double c_;
  double tol_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::vector<double> p_;
};

}  // namespace

SvrModel svr_train(std::span<const std::vector<double>> rows, std::span<const double> targets,
                   const SvrParams& params, SvrTrainInfo* info, bool record_trace) {
  params.validate();
  if (rows.empty()) throw InvalidInput("svr_train: no training rows");
  if (rows.size() != targets.size()) {
    throw InvalidInput("svr_train: " + std::to_string(rows.size()) + " rows but " +
                       std::to_string(targets.size()) + " targets");
  }
  const std::size_t dim = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != dim) throw InvalidInput("svr_train: inconsistent feature dimension");
    for (double v : r) {
      if (!std::isfinite(v)) throw InvalidInput("svr_train: non-finite feature value");
    }
  }
  for (double t : targets) {
    if (!std::isfinite(t)) throw InvalidInput("svr_train: non-finite target");
  }

  const std::size_t n = rows.size();
  std::vector<double> kernel(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    kernel[a * n + a] = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      const double k = rbf_kernel(rows[a], rows[b], params.gamma);
      kernel[a * n + b] = k;
      kernel[b * n + a] = k;
    }
  }

  SvrTrainInfo local;
  SvrTrainInfo& out = info != nullptr ? *info : local;
  out = SvrTrainInfo{};
  SmoSolver solver(kernel, n, targets, params);
  solver.solve(params.max_iterations, out, record_trace);
  out.beta = solver.beta();
  out.dual_objective = solver.dual_objective();

  SvrModel model;
  model.gamma = params.gamma;
  model.bias = solver.bias();
  model.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    if (out.beta[i] != 0.0) {
      model.support.push_back(rows[i]);
      model.coef.push_back(out.beta[i]);
    }
  }
  return model;
}

}  // namespace jndsur
