#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jndsur/bisection.hpp"
#include "jndsur/corpus.hpp"
#include "jndsur/eval.hpp"
#include "jndsur/predictor.hpp"

namespace jndsur::io {

namespace fs = std::filesystem;

/// Shortest decimal text that parses back to the same double.
[[nodiscard]] std::string format_double(double value);

/// Collects output files in memory and publishes them together. Each file is
/// written to a temporary sibling and renamed into place, so a failure never
/// leaves a partially written output behind.
class OutputSet {
 public:
  void add(fs::path path, std::string content);
  void commit() const;
  [[nodiscard]] const std::vector<std::pair<fs::path, std::string>>& files() const noexcept {
    return files_;
  }

 private:
  std::vector<std::pair<fs::path, std::string>> files_;
};

void write_file_atomic(const fs::path& path, std::string_view content);
[[nodiscard]] std::string read_file(const fs::path& path);

// --- JND sample files -----------------------------------------------------
// clip_id,resolution,jnd_order,anchor_qp,subject_id,jnd_qp

[[nodiscard]] std::vector<JndSampleSet> parse_samples(std::string_view text,
                                                      const std::string& source = "<samples>");
[[nodiscard]] std::vector<JndSampleSet> read_samples(const fs::path& path);
[[nodiscard]] std::string format_samples(const std::vector<JndSampleSet>& sets);

// --- SUR curve files ------------------------------------------------------
// clip_id,jnd_order,qp,sur_value

struct CurveRow {
  std::string clip_id;
  int jnd_order = 1;
  SurCurve curve;
};

[[nodiscard]] std::string format_curves(const std::vector<CurveRow>& rows);
[[nodiscard]] std::vector<CurveRow> parse_curves(std::string_view text,
                                                 const std::string& source = "<curves>");

// --- fitted model tables (output of `fit`) --------------------------------

struct ModelRow {
  std::string clip_id;
  Resolution resolution = Resolution::k1080p;
  int jnd_order = 1;
  int subjects = 0;
  SurModel model;
  JndPoint jnd;
  std::optional<NormalityResult> normality;  ///< absent below 8 samples
};

[[nodiscard]] std::string format_models(const std::vector<ModelRow>& rows);
[[nodiscard]] std::vector<ModelRow> parse_models(std::string_view text,
                                                 const std::string& source = "<models>");
[[nodiscard]] std::vector<ModelRow> read_models(const fs::path& path);

[[nodiscard]] std::string format_pass_rates(const std::map<PassRateKey, PassRate>& rates);

// --- quality scores, masking and features ---------------------------------
// clip_id,qp,segment_id,score

[[nodiscard]] std::map<std::string, QualityLadder> parse_scores(
    std::string_view text, const std::string& source = "<scores>",
    const std::string& metric = "external");
[[nodiscard]] std::map<std::string, QualityLadder> read_scores(const fs::path& path);
[[nodiscard]] std::string format_scores(const std::vector<QualityLadder>& ladders);

// clip_id,spatial_mean,spatial_std,temporal_mean,temporal_std
[[nodiscard]] std::map<std::string, MaskingStats> parse_masking(
    std::string_view text, const std::string& source = "<masking>");
[[nodiscard]] std::map<std::string, MaskingStats> read_masking(const fs::path& path);
[[nodiscard]] std::string format_masking(
    const std::vector<std::pair<std::string, MaskingStats>>& rows);

// clip_id,anchor_qp,f0..f35
struct FeatureRow {
  std::string clip_id;
  FeatureVector features;
};

[[nodiscard]] std::string format_features(const std::vector<FeatureRow>& rows);
[[nodiscard]] std::vector<FeatureRow> parse_features(std::string_view text,
                                                     const std::string& source = "<features>");
[[nodiscard]] std::vector<FeatureRow> read_features(const fs::path& path);

// --- predictor persistence --------------------------------------------------

inline constexpr int kPredictorFormatVersion = 1;

[[nodiscard]] std::string serialize_predictor(const TrainedPredictor& predictor);
[[nodiscard]] TrainedPredictor deserialize_predictor(std::string_view text,
                                                     const std::string& source = "<predictor>");

// --- configuration ----------------------------------------------------------

/// Campaign file: one campaign object, or {"campaigns": [...]}.
[[nodiscard]] std::vector<CampaignSpec> load_campaigns(const fs::path& path);

inline constexpr int kManifestFormatVersion = 1;

struct ManifestClip {
  std::string id;
  Resolution resolution = Resolution::k1080p;
  int width = 0;
  int height = 0;
  int frames = 0;
  double frame_rate = 0.0;
  int temporal_len = 0;  ///< frames per segment; defaults to one second
  std::optional<fs::path> reference;
  std::map<int, fs::path> distorted;  ///< QP -> raw luma planes
  std::optional<fs::path> scores;     ///< precomputed quality-score file
  std::optional<MaskingStats> masking;
};

struct Manifest {
  int format_version = kManifestFormatVersion;
  std::vector<ManifestClip> clips;
  std::vector<int> feature_anchors{0};
};

/// Parses and validates a manifest. Relative paths resolve against the
/// manifest's directory and must exist.
[[nodiscard]] Manifest load_manifest(const fs::path& path);

[[nodiscard]] LumaClip read_luma(const fs::path& path, int width, int height, int frames);

struct EvalSetup {
  EvalConfig config;
  Corpus corpus;
  fs::path output_dir;
  std::string snapshot;  ///< normalized configuration echoed into the report
};

/// Loads an evaluation config and the corpus it names (files or synthetic).
[[nodiscard]] EvalSetup load_eval_setup(const fs::path& path);

/// Effective configuration (after command-line overrides) as JSON text.
[[nodiscard]] std::string describe_eval(const EvalSetup& setup);

struct TrainSetup {
  fs::path features;
  fs::path models;
  Resolution resolution = Resolution::k1080p;
  int jnd_order = 1;
  PredictorParams params;
  fs::path output;
};

[[nodiscard]] TrainSetup load_train_setup(const fs::path& path);

struct PredictSetup {
  fs::path model;
  fs::path features;
  std::optional<int> anchor_qp;
};

[[nodiscard]] PredictSetup load_predict_setup(const fs::path& path);

/// Report tables, per-clip records, plotting data and the config snapshot.
void add_report_files(OutputSet& out, const fs::path& dir, const EvalReport& report,
                      const std::string& snapshot);

}  // namespace jndsur::io
