#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "jndsur/error.hpp"
#include "jndsur/predictor.hpp"
#include "reference.hpp"

using namespace jndsur;

namespace {

// Clips whose first two features are the ground-truth (mu, sigma) and whose
// remaining features are uniform noise in [0, 1].
std::vector<LabeledClip> identity_clips(std::size_t n, std::uint64_t seed,
                                        int dim = kFeatureDim) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mu_d(20.0, 40.0);
  std::uniform_real_distribution<double> sigma_d(2.0, 6.0);
  std::uniform_real_distribution<double> noise(0.0, 1.0);
  std::vector<LabeledClip> clips;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledClip c;
    c.clip_id = "clip" + std::to_string(i);
    c.truth = SurModel{mu_d(rng), sigma_d(rng), 0};
    c.features = {c.truth.mu, c.truth.sigma};
    for (int k = 2; k < dim; ++k) c.features.push_back(noise(rng));
    clips.push_back(std::move(c));
  }
  return clips;
}

}  // namespace

TEST(Predictor, RequiresTenClips) {
  const auto clips = identity_clips(9, 1);
  EXPECT_THROW((void)train_sur_predictor(clips), InvalidInput);
  EXPECT_NO_THROW((void)train_sur_predictor(identity_clips(10, 1)));
}

TEST(Predictor, IdentityFeaturesGeneralise) {
  // Two noise dimensions next to the informative pair; with all 34 noise
  // dimensions the RBF distance is dominated by noise at this sample size.
  const auto clips = identity_clips(100, 2, 4);
  const std::vector<LabeledClip> train(clips.begin(), clips.begin() + 80);
  PredictorParams params;
  params.mu_head.gamma = 0.1;
  params.log_sigma_head.gamma = 0.1;
  const TrainedPredictor p = train_sur_predictor(train, params);
  double mae = 0.0;
  for (std::size_t i = 80; i < 100; ++i) {
    mae += std::abs(predict_sur_curve(p, clips[i].features, 0).model.mu - clips[i].truth.mu);
  }
  EXPECT_LT(mae / 20.0, 1.0);
}

TEST(Predictor, ConstantCorpusReproducesItsCurve) {
  auto clips = identity_clips(30, 3);
  for (auto& c : clips) c.truth = SurModel{30.0, 4.0, 0};
  const TrainedPredictor p = train_sur_predictor(clips);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5.0, 50.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(kFeatureDim);
    for (auto& v : x) v = u(rng);
    const SurPrediction pred = predict_sur_curve(p, x, 0);
    EXPECT_NEAR(pred.model.mu, 30.0, 1e-9);
    EXPECT_NEAR(pred.model.sigma, 4.0, 1e-9);
    ASSERT_EQ(pred.curve.qp_grid.size(), 51u);
    for (std::size_t i = 0; i < pred.curve.qp_grid.size(); ++i) {
      EXPECT_NEAR(pred.curve.values[i], oracle::normal_upper_tail((pred.curve.qp_grid[i] - 30.0) / 4.0),
                  1e-2);
    }
  }
}

TEST(Predictor, ClampsBelowAnchor) {
  const SurPrediction p = prediction_from_params(25.0, 2.0, 30);
  EXPECT_EQ(p.jnd.qp_int, 31);
  EXPECT_EQ(p.curve.qp_grid.front(), 31);
  for (double v : p.curve.values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Predictor, SigmaIsFloored) {
  const SurPrediction p = prediction_from_params(30.0, 0.0, 0);
  EXPECT_EQ(p.model.sigma, kSigmaFloor);
  EXPECT_THROW((void)prediction_from_params(NAN, 1.0, 0), InvalidInput);
  EXPECT_THROW((void)prediction_from_params(30.0, 1.0, 51), InvalidInput);
}

TEST(Predictor, SigmaAlwaysPositive) {
  const auto clips = identity_clips(40, 5);
  const TrainedPredictor p = train_sur_predictor(clips);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(kFeatureDim);
    for (auto& v : x) v = u(rng);
    EXPECT_GT(predict_sur_curve(p, x, 0).model.sigma, 0.0);
  }
}

TEST(Predictor, StandardizationAbsorbsAffineRescaling) {
  const auto clips = identity_clips(40, 7);
  auto scaled = clips;
  for (auto& c : scaled) {
    c.features[0] = 3.0 * c.features[0] - 17.0;
    c.features[5] = 0.01 * c.features[5] + 2.0;
  }
  const TrainedPredictor a = train_sur_predictor(clips);
  const TrainedPredictor b = train_sur_predictor(scaled);
  for (std::size_t i = 0; i < clips.size(); i += 3) {
    const auto pa = predict_sur_curve(a, clips[i].features, 0);
    const auto pb = predict_sur_curve(b, scaled[i].features, 0);
    EXPECT_NEAR(pa.model.mu, pb.model.mu, 1e-8);
    EXPECT_NEAR(pa.model.sigma, pb.model.sigma, 1e-8);
  }
}

TEST(Predictor, AnchorOffsetTarget) {
  // With anchored truths the mu head learns mu - anchor; predicting at the
  // same anchor restores the absolute location.
  auto clips = identity_clips(30, 8);
  for (auto& c : clips) c.truth = SurModel{40.0, 3.0, 30};
  const TrainedPredictor p = train_sur_predictor(clips);
  EXPECT_NEAR(predict_sur_curve(p, clips[0].features, 30).model.mu, 40.0, 1e-9);
  EXPECT_NEAR(predict_sur_curve(p, clips[0].features, 25).model.mu, 35.0, 1e-9);
}

TEST(Predictor, HeldOutFixture) {
  // Regression fixture recorded from one run with default parameters.
  const auto clips = identity_clips(60, 9);
  const std::vector<LabeledClip> train(clips.begin(), clips.end() - 1);
  const TrainedPredictor p = train_sur_predictor(train);
  const SurPrediction pred = predict_sur_curve(p, clips.back().features, 0);
  EXPECT_NEAR(pred.model.mu, 26.922907556763452, 1e-9);
  EXPECT_NEAR(pred.model.sigma, 3.8960251983744802, 1e-9);
}

TEST(Predictor, GridSearchPicksFromGrid) {
  const auto clips = identity_clips(45, 10);
  PredictorParams params;
  params.search = true;
  params.seed = 3;
  const TrainedPredictor a = train_sur_predictor(clips, params);
  const TrainedPredictor b = train_sur_predictor(clips, params);
  bool found = false;
  for (double c : params.c_grid) {
    for (double g : params.gamma_multipliers) {
      found |= a.mu_params.c == c && a.mu_params.gamma == g / kFeatureDim;
    }
  }
  EXPECT_TRUE(found);
  EXPECT_EQ(a.mu_params.c, b.mu_params.c);
  EXPECT_EQ(a.log_sigma_params.gamma, b.log_sigma_params.gamma);
  EXPECT_EQ(a.mu_head.coef, b.mu_head.coef);
}

TEST(Predictor, DimensionMismatchOnPredict) {
  const TrainedPredictor p = train_sur_predictor(identity_clips(12, 11));
  EXPECT_THROW((void)predict_sur_curve(p, std::vector<double>(5, 0.0), 0), InvalidInput);
}

TEST(AlignClips, JoinsById) {
  const std::vector<std::string> ids{"b", "a"};
  const std::vector<std::vector<double>> feats{{2.0}, {1.0}};
  const std::vector<std::string> model_ids{"a", "b"};
  const std::vector<SurModel> models{{10, 1, 0}, {20, 2, 0}};
  const auto clips = align_clips(ids, feats, model_ids, models);
  ASSERT_EQ(clips.size(), 2u);
  EXPECT_EQ(clips[0].clip_id, "b");
  EXPECT_EQ(clips[0].truth.mu, 20.0);
}

TEST(AlignClips, RejectsMisalignment) {
  const std::vector<std::string> ids{"a", "c"};
  const std::vector<std::vector<double>> feats{{1.0}, {2.0}};
  const std::vector<std::string> model_ids{"a", "b"};
  const std::vector<SurModel> models{{10, 1, 0}, {20, 2, 0}};
  EXPECT_THROW((void)align_clips(ids, feats, model_ids, models), InvalidInput);
  const std::vector<std::string> dup{"a", "a"};
  EXPECT_THROW((void)align_clips(ids, feats, dup, models), InvalidInput);
}
