#include "jndsur/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "jndsur/error.hpp"
#include "jndsur/folds.hpp"

namespace jndsur {

std::vector<LabeledClip> align_clips(std::span<const std::string> ids,
                                     std::span<const std::vector<double>> features,
                                     std::span<const std::string> model_ids,
                                     std::span<const SurModel> models) {
  if (ids.size() != features.size() || model_ids.size() != models.size()) {
    throw InvalidInput("align_clips: id and value lists differ in length");
  }
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < model_ids.size(); ++i) {
    if (!by_id.emplace(model_ids[i], i).second) {
      throw InvalidInput("align_clips: duplicate model for clip '" + model_ids[i] + "'");
    }
  }
  if (by_id.size() != ids.size()) {
    throw InvalidInput("align_clips: " + std::to_string(ids.size()) + " feature rows but " +
                       std::to_string(by_id.size()) + " models");
  }
  std::vector<LabeledClip> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto it = by_id.find(ids[i]);
    if (it == by_id.end()) {
      throw InvalidInput("align_clips: no ground-truth model for clip '" + ids[i] + "'");
    }
    out.push_back(LabeledClip{ids[i], features[i], models[it->second]});
  }
  return out;
}

namespace {

double inner_cv_mae(const std::vector<std::vector<double>>& raw_rows,
                    const std::vector<double>& targets, const std::vector<int>& folds, int k,
                    const SvrParams& params) {
  double total = 0.0;
  std::size_t count = 0;
  for (int f = 0; f < k; ++f) {
    std::vector<std::vector<double>> train_raw;
    std::vector<double> train_y;
    for (std::size_t i = 0; i < raw_rows.size(); ++i) {
      if (folds[i] != f) {
        train_raw.push_back(raw_rows[i]);
        train_y.push_back(targets[i]);
      }
    }
    const auto scaling = FeatureScaling::fit(train_raw);
    for (auto& r : train_raw) r = scaling.apply(r);
    const auto model = svr_train(train_raw, train_y, params);
    for (std::size_t i = 0; i < raw_rows.size(); ++i) {
      if (folds[i] == f) {
        total += std::abs(model.predict(scaling.apply(raw_rows[i])) - targets[i]);
        ++count;
      }
    }
  }
  return total / static_cast<double>(count);
}

SvrParams search_head(const std::vector<std::vector<double>>& raw_rows,
                      const std::vector<double>& targets, const SvrParams& base,
                      const PredictorParams& params) {
  const auto folds = kfold_split(raw_rows.size(), params.inner_folds, params.seed);
  const double dim = static_cast<double>(raw_rows.front().size());
  SvrParams best = base;
  double best_mae = std::numeric_limits<double>::infinity();
  for (double c : params.c_grid) {
    for (double mult : params.gamma_multipliers) {
      SvrParams trial = base;
      trial.c = c;
      trial.gamma = mult / dim;
      const double mae = inner_cv_mae(raw_rows, targets, folds, params.inner_folds, trial);
      if (mae < best_mae) {
        best_mae = mae;
        best = trial;
      }
    }
  }
  return best;
}

}  // namespace

TrainedPredictor train_sur_predictor(std::span<const LabeledClip> clips,
                                     const PredictorParams& params) {
  if (clips.size() < kMinTrainingClips) {
    throw InvalidInput("train_sur_predictor: at least " + std::to_string(kMinTrainingClips) +
                       " clips required, got " + std::to_string(clips.size()));
  }
  std::vector<std::vector<double>> raw;
  std::vector<double> mu;
  std::vector<double> log_sigma;
  raw.reserve(clips.size());
  for (const auto& clip : clips) {
    if (!raw.empty() && clip.features.size() != raw.front().size()) {
      throw InvalidInput("train_sur_predictor: inconsistent feature dimension at clip '" +
                         clip.clip_id + "'");
    }
    raw.push_back(clip.features);
    // The quality features are sampled relative to the anchor, so the mu head
    // learns the offset above it.
    mu.push_back(clip.truth.mu - clip.truth.anchor_qp);
    log_sigma.push_back(std::log(std::max(clip.truth.sigma, kSigmaFloor)));
  }

  TrainedPredictor predictor;
  predictor.mu_params = params.mu_head;
  predictor.log_sigma_params = params.log_sigma_head;
  if (params.search) {
    predictor.mu_params = search_head(raw, mu, params.mu_head, params);
    predictor.log_sigma_params = search_head(raw, log_sigma, params.log_sigma_head, params);
  }

  predictor.scaling = FeatureScaling::fit(raw);
  std::vector<std::vector<double>> rows;
  rows.reserve(raw.size());
  for (const auto& r : raw) rows.push_back(predictor.scaling.apply(r));
  predictor.mu_head = svr_train(rows, mu, predictor.mu_params);
  predictor.log_sigma_head = svr_train(rows, log_sigma, predictor.log_sigma_params);
  return predictor;
}

SurPrediction prediction_from_params(double mu, double sigma, int anchor_qp) {
  if (anchor_qp < 0 || anchor_qp >= kMaxQp) {
    throw InvalidInput("prediction: anchor_qp must lie in [0, 50]");
  }
  if (!std::isfinite(mu) || !std::isfinite(sigma)) {
    throw InvalidInput("prediction: non-finite SUR parameters");
  }
  SurPrediction out;
  out.model = SurModel{mu, std::max(sigma, kSigmaFloor), anchor_qp};
  out.curve = sample_curve(out.model);
  out.jnd = jnd_point(out.model, 0.75);
  return out;
}

SurPrediction predict_sur_curve(const TrainedPredictor& predictor,
                                std::span<const double> features, int anchor_qp) {
  const auto x = predictor.scaling.apply(features);
  const double mu = anchor_qp + predictor.mu_head.predict(x);
  const double sigma = std::exp(predictor.log_sigma_head.predict(x));
  return prediction_from_params(mu, sigma, anchor_qp);
}

}  // namespace jndsur
