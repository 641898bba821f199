#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "jndsur/features.hpp"
#include "jndsur/stats.hpp"
#include "jndsur/svr.hpp"

namespace jndsur {

/// One training clip: its raw (unstandardized) feature row and the fitted
/// ground-truth SUR model.
struct LabeledClip {
  std::string clip_id;
  std::vector<double> features;
  SurModel truth;  ///< anchor_qp must be the anchor the features were built at
};

struct PredictorParams {
  SvrParams mu_head{10.0, 0.5, 1.0 / kFeatureDim, 1e-3};
  SvrParams log_sigma_head{10.0, 0.05, 1.0 / kFeatureDim, 1e-3};

  /// Inner cross-validated grid search over C x gamma, per head.
  bool search = false;
  std::vector<double> c_grid{0.1, 1.0, 10.0, 100.0};
  std::vector<double> gamma_multipliers{0.5, 1.0, 2.0};  ///< times 1 / dim
  int inner_folds = 3;
  std::uint64_t seed = 1;
};

inline constexpr std::size_t kMinTrainingClips = 10;

/// Two SVR heads on standardized features: one for mu, one for log(sigma).
struct TrainedPredictor {
  FeatureScaling scaling;
  SvrModel mu_head;
  SvrModel log_sigma_head;
  SvrParams mu_params;
  SvrParams log_sigma_params;
  int fold = -1;
  int jnd_order = 1;
  std::string resolution;

  [[nodiscard]] std::size_t dim() const noexcept { return scaling.mean.size(); }
};

struct SurPrediction {
  SurModel model;
  SurCurve curve;
  JndPoint jnd;
};

/// Pairs feature rows with ground-truth models by clip id. Both lists must
/// name exactly the same clips; the result follows the order of `ids`.
[[nodiscard]] std::vector<LabeledClip> align_clips(std::span<const std::string> ids,
                                                   std::span<const std::vector<double>> features,
                                                   std::span<const std::string> model_ids,
                                                   std::span<const SurModel> models);

[[nodiscard]] TrainedPredictor train_sur_predictor(std::span<const LabeledClip> clips,
                                                   const PredictorParams& params = {});

/// Predicted normal parameters, the SUR curve on [anchor_qp + 1, 51] and the
/// 75% JND location.
[[nodiscard]] SurPrediction predict_sur_curve(const TrainedPredictor& predictor,
                                              std::span<const double> features, int anchor_qp);

/// Curve and JND point for an already known (mu, sigma), with the same
/// flooring and range rules as predict_sur_curve.
[[nodiscard]] SurPrediction prediction_from_params(double mu, double sigma, int anchor_qp);

}  // namespace jndsur
