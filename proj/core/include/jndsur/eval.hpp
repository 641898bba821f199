#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jndsur/corpus.hpp"
#include "jndsur/folds.hpp"
#include "jndsur/predictor.hpp"

namespace jndsur {

/// Which anchor the 2nd and 3rd JND predictions are made against.
enum class Setting {
  GroundTruthRef,  ///< measured previous JND
  PredictedRef,    ///< previous predicted JND, chained within the fold
  SameRef,         ///< pristine reference, full range [1, 51]
};

inline constexpr Setting kAllSettings[] = {Setting::GroundTruthRef, Setting::PredictedRef,
                                           Setting::SameRef};

[[nodiscard]] std::string_view to_string(Setting s) noexcept;
[[nodiscard]] Setting parse_setting(std::string_view text);

/// Highest anchor a prediction chain may use; a slope window needs
/// anchor + 1 <= 50 and the ladder beyond it.
inline constexpr int kMaxPredictionAnchor = 49;

struct EvalConfig {
  int folds = 5;
  std::uint64_t seed = 1;
  /// Independent fold assignments; every cell pools the records of all
  /// repetitions, so its means average over them. Repetition 0 uses `seed`.
  int repetitions = 1;
  PredictorParams predictor;
  std::vector<int> orders{1, 2, 3};
  std::vector<Setting> settings{Setting::GroundTruthRef, Setting::PredictedRef, Setting::SameRef};
  /// Replace the SVR with the ground truth; every error must then be zero.
  bool oracle_predictor = false;
};

struct ClipResult {
  std::string clip_id;
  int repetition = 0;
  int fold = 0;
  int anchor_qp = 0;  ///< anchor used for the prediction
  int qp_lo = 1;      ///< first QP of the comparison range, range ends at 51
  double truth_mu = 0.0;
  double truth_sigma = 0.0;
  double pred_mu = 0.0;
  double pred_sigma = 0.0;
  int truth_jnd = 0;
  int pred_jnd = 0;
  double delta_sur = 0.0;
  double delta_qp = 0.0;
  /// Fitted model vs empirical SUR of the ground truth; a modelling diagnostic.
  double model_vs_empirical = 0.0;
};

struct CellReport {
  Resolution resolution = Resolution::k1080p;
  int jnd_order = 1;
  Setting setting = Setting::GroundTruthRef;
  std::vector<ClipResult> clips;
  double mean_delta_sur = 0.0;
  double mean_delta_qp = 0.0;
  double mean_model_vs_empirical = 0.0;
};

struct FoldAssignment {
  Resolution resolution = Resolution::k1080p;
  int repetition = 0;
  std::vector<std::string> clip_ids;
  std::vector<int> folds;
};

struct EvalReport {
  std::vector<CellReport> cells;
  std::vector<FoldAssignment> folds;
  std::vector<std::string> skipped;
  int repetitions = 1;

  [[nodiscard]] const CellReport* find(Resolution r, int order, Setting s) const;
};

/// Deterministic fold assignment for a resolution group; the seed is mixed
/// with the resolution so groups get independent shuffles.
[[nodiscard]] std::vector<int> resolution_folds(const ResolutionCorpus& corpus,
                                                const EvalConfig& config);

/// Cross-validated per-clip errors for one (order, setting). The first JND
/// ignores `setting` (its reference is always the pristine clip).
[[nodiscard]] std::vector<ClipResult> evaluate_order(const ResolutionCorpus& corpus, int jnd_order,
                                                     Setting setting, const EvalConfig& config);

/// Fills the cell means from its per-clip records.
void summarize(CellReport& cell);

/// Seed of fold repetition `repetition`; repetition 0 keeps the master seed.
[[nodiscard]] std::uint64_t repetition_seed(std::uint64_t seed, int repetition);

/// Every resolution x order x setting cell the corpus supports. Order 1 has
/// a single cell; groups the corpus cannot support are listed in `skipped`.
[[nodiscard]] EvalReport run_full_evaluation(const Corpus& corpus, const EvalConfig& config);

}  // namespace jndsur
