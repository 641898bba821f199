#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jndsur/types.hpp"

namespace jndsur {

/// Subject-wise JND locations for one (clip, resolution, JND order).
///
/// Each sample is the QP at which a subject first noticed a difference
/// against the anchor clip, so every sample lies in (anchor_qp, 51].
struct JndSampleSet {
  std::string clip_id;
  Resolution resolution = Resolution::k1080p;
  int jnd_order = 1;
  int anchor_qp = 0;
  std::vector<double> samples;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }

  /// Throws InvalidInput when the order, anchor or any sample is out of range.
  void validate() const;
};

/// Normal model of a JND sample set. The SUR curve is Q((qp - mu) / sigma).
struct SurModel {
  double mu = 0.0;
  double sigma = 1.0;
  int anchor_qp = 0;

  [[nodiscard]] int qp_lo() const noexcept { return anchor_qp + 1; }
  [[nodiscard]] int qp_hi() const noexcept { return kMaxQp; }
};

/// SUR values sampled on a strictly increasing integer QP grid.
struct SurCurve {
  std::vector<int> qp_grid;
  std::vector<double> values;

  friend bool operator==(const SurCurve&, const SurCurve&) = default;
};

struct NormalityResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  double alpha = 0.05;
  bool passed = false;
};

/// Real-valued model inversion plus the operational integer QP.
struct JndPoint {
  double qp = 0.0;
  int qp_int = 0;
};

/// Sample mean and Bessel-corrected standard deviation, floored at kSigmaFloor.
[[nodiscard]] SurModel fit_normal(const JndSampleSet& set);

/// Jarque-Bera normality test against the chi-square(2) critical value at 1 - alpha.
/// Requires at least 8 samples and alpha in (0, 1).
[[nodiscard]] NormalityResult jarque_bera(std::span<const double> samples, double alpha = 0.05);
[[nodiscard]] NormalityResult jarque_bera(const JndSampleSet& set, double alpha = 0.05);

/// Upper quantile of chi-square with 2 degrees of freedom: -2 ln(alpha).
[[nodiscard]] double chi_square2_critical(double alpha);

/// Fraction of subjects who do not notice a difference at `qp`:
/// 1 - #{m : Y_m <= qp} / M. `qp` must lie in [anchor_qp + 1, 51].
[[nodiscard]] double empirical_sur(const JndSampleSet& set, int qp);

/// Parametric SUR, Q((qp - mu) / sigma).
[[nodiscard]] double sur(const SurModel& model, double qp) noexcept;

/// QP where the parametric SUR equals `target`. The integer location is the
/// rounded value clamped to the model's QP range. A model at the sigma floor
/// is a step at mu and returns mu for every target.
[[nodiscard]] JndPoint jnd_point(const SurModel& model, double target = 0.75);

/// Samples the model on [qp_lo, qp_hi].
[[nodiscard]] SurCurve sample_curve(const SurModel& model, int qp_lo, int qp_hi);
/// Samples the model on its own range [anchor_qp + 1, 51].
[[nodiscard]] SurCurve sample_curve(const SurModel& model);

/// Empirical SUR sampled on [anchor_qp + 1, 51].
[[nodiscard]] SurCurve empirical_curve(const JndSampleSet& set);

/// Mean absolute difference between two curves on a shared grid.
[[nodiscard]] double delta_sur(const SurCurve& pred, const SurCurve& truth);

struct PassRate {
  std::size_t tested = 0;
  std::size_t passed = 0;
  std::size_t skipped = 0;  ///< sets with fewer than 8 samples

  [[nodiscard]] double rate() const noexcept {
    return tested == 0 ? 0.0 : static_cast<double>(passed) / static_cast<double>(tested);
  }
};

using PassRateKey = std::pair<Resolution, int>;

/// Jarque-Bera pass rate grouped by (resolution, JND order). Groups without
/// a single testable set are omitted.
[[nodiscard]] std::map<PassRateKey, PassRate> normality_pass_rate(
    std::span<const JndSampleSet> dataset, double alpha = 0.05);

}  // namespace jndsur
