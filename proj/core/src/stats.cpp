#include "jndsur/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jndsur/error.hpp"
#include "jndsur/normal.hpp"

namespace jndsur {

void JndSampleSet::validate() const {
  if (jnd_order < 1 || jnd_order > 3) {
    throw InvalidInput("clip '" + clip_id + "': jnd_order must be 1, 2 or 3");
  }
  if (anchor_qp < 0 || anchor_qp >= kMaxQp) {
    throw InvalidInput("clip '" + clip_id + "': anchor_qp must lie in [0, 50]");
  }
  if (jnd_order == 1 && anchor_qp != 0) {
    throw InvalidInput("clip '" + clip_id + "': first JND must be anchored at QP 0");
  }
  for (double y : samples) {
    if (!(y > anchor_qp && y <= kMaxQp)) {
      throw InvalidInput("clip '" + clip_id + "': sample " + std::to_string(y) +
                         " outside (anchor_qp, 51]");
    }
  }
}

SurModel fit_normal(const JndSampleSet& set) {
  const auto n = set.samples.size();
  if (n < 2) {
    throw InvalidInput("fit_normal: at least 2 samples required, got " + std::to_string(n));
  }
  const double mean =
      std::accumulate(set.samples.begin(), set.samples.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double y : set.samples) ss += (y - mean) * (y - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  return SurModel{mean, std::max(sd, kSigmaFloor), set.anchor_qp};
}

double chi_square2_critical(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("alpha must lie in (0, 1)");
  }
  // chi-square(2) is exponential with mean 2, so the upper quantile is closed form.
  return -2.0 * std::log(alpha);
}

NormalityResult jarque_bera(std::span<const double> samples, double alpha) {
  const double critical = chi_square2_critical(alpha);
  const auto n = samples.size();
  if (n < 8) {
    throw InvalidInput("jarque_bera: at least 8 samples required, got " + std::to_string(n));
  }
  const double nd = static_cast<double>(n);
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / nd;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double y : samples) {
    const double d = y - mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= nd;
  m3 /= nd;
  m4 /= nd;

  NormalityResult result;
  result.alpha = alpha;
  result.critical_value = critical;
  if (m2 <= 0.0) {
    // All samples identical: skewness and kurtosis are undefined. Treat the
    // panel as a point mass, which no normality test accepts.
    result.statistic = std::numeric_limits<double>::infinity();
    result.passed = false;
    return result;
  }
  const double skew = m3 / std::pow(m2, 1.5);
  const double excess_kurtosis = m4 / (m2 * m2) - 3.0;
  result.statistic = nd / 6.0 * (skew * skew + excess_kurtosis * excess_kurtosis / 4.0);
  result.passed = result.statistic < critical;
  return result;
}

NormalityResult jarque_bera(const JndSampleSet& set, double alpha) {
  return jarque_bera(std::span<const double>(set.samples), alpha);
}

double empirical_sur(const JndSampleSet& set, int qp) {
  if (set.samples.empty()) {
    throw InvalidInput("empirical_sur: empty sample set");
  }
  if (qp < set.anchor_qp + 1 || qp > kMaxQp) {
    throw InvalidInput("empirical_sur: qp " + std::to_string(qp) + " outside [" +
                       std::to_string(set.anchor_qp + 1) + ", 51]");
  }
  const auto noticed = std::count_if(set.samples.begin(), set.samples.end(),
                                     [qp](double y) { return y <= qp; });
  return 1.0 - static_cast<double>(noticed) / static_cast<double>(set.samples.size());
}

double sur(const SurModel& model, double qp) noexcept {
  return normal_q((qp - model.mu) / model.sigma);
}

JndPoint jnd_point(const SurModel& model, double target) {
  if (!(target > 0.0 && target < 1.0)) {
    throw InvalidInput("jnd_point: target must lie in (0, 1)");
  }
  JndPoint point;
  point.qp = model.sigma <= kSigmaFloor
                 ? model.mu
                 : model.mu + model.sigma * normal_q_inverse(target);
  const double rounded = std::round(point.qp);
  point.qp_int = static_cast<int>(std::clamp(rounded, static_cast<double>(model.qp_lo()),
                                             static_cast<double>(model.qp_hi())));
  return point;
}

SurCurve sample_curve(const SurModel& model, int qp_lo, int qp_hi) {
  if (qp_lo > qp_hi) {
    throw InvalidInput("sample_curve: empty QP range");
  }
  SurCurve curve;
  curve.qp_grid.reserve(static_cast<std::size_t>(qp_hi - qp_lo + 1));
  curve.values.reserve(curve.qp_grid.capacity());
  for (int q = qp_lo; q <= qp_hi; ++q) {
    curve.qp_grid.push_back(q);
    curve.values.push_back(sur(model, q));
  }
  return curve;
}

SurCurve sample_curve(const SurModel& model) {
  return sample_curve(model, model.qp_lo(), model.qp_hi());
}

SurCurve empirical_curve(const JndSampleSet& set) {
  SurCurve curve;
  for (int q = set.anchor_qp + 1; q <= kMaxQp; ++q) {
    curve.qp_grid.push_back(q);
    curve.values.push_back(empirical_sur(set, q));
  }
  return curve;
}

double delta_sur(const SurCurve& pred, const SurCurve& truth) {
  if (pred.qp_grid != truth.qp_grid || pred.values.size() != pred.qp_grid.size() ||
      truth.values.size() != truth.qp_grid.size()) {
    throw InvalidInput("delta_sur: curves must share the same QP grid");
  }
  if (pred.qp_grid.empty()) {
    throw InvalidInput("delta_sur: empty QP grid");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    total += std::abs(pred.values[i] - truth.values[i]);
  }
  return total / static_cast<double>(pred.values.size());
}

std::map<PassRateKey, PassRate> normality_pass_rate(std::span<const JndSampleSet> dataset,
                                                    double alpha) {
  if (dataset.empty()) {
    throw InvalidInput("normality_pass_rate: empty dataset");
  }
  std::map<PassRateKey, PassRate> groups;
  for (const auto& set : dataset) {
    auto& group = groups[{set.resolution, set.jnd_order}];
    if (set.size() < 8) {
      ++group.skipped;
      continue;
    }
    ++group.tested;
    if (jarque_bera(set, alpha).passed) ++group.passed;
  }
  std::erase_if(groups, [](const auto& entry) { return entry.second.tested == 0; });
  return groups;
}

}  // namespace jndsur
