// jndsur: command-line front end for SUR modelling, bisection simulation,
// feature extraction, SVR training/prediction and cross-validated evaluation.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jndsur/bisection.hpp"
#include "jndsur/error.hpp"
#include "jndsur/eval.hpp"
#include "jndsur/features.hpp"
#include "jndsur/io.hpp"
#include "jndsur/predictor.hpp"
#include "jndsur/segments.hpp"
#include "jndsur/stats.hpp"

namespace fs = std::filesystem;
using namespace jndsur;

namespace {

struct Options {
  std::string input;
  std::string config;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  double alpha = 0.05;
  bool oracle = false;
};

fs::path out_path(const Options& o, const fs::path& fallback_dir) {
  return o.out_dir.empty() ? fallback_dir : fs::path(o.out_dir);
}

// --- fit --------------------------------------------------------------------

int cmd_fit(const Options& o) {
  const auto sets = io::read_samples(o.input);
  if (sets.empty()) throw FormatError(o.input, 0, "no sample rows");
  const fs::path dir = out_path(o, ".");

  std::vector<io::ModelRow> rows;
  std::map<Resolution, std::vector<io::CurveRow>> curves;
  std::size_t partial = 0;
  for (const auto& set : sets) {
    io::ModelRow row;
    row.clip_id = set.clip_id;
    row.resolution = set.resolution;
    row.jnd_order = set.jnd_order;
    row.subjects = static_cast<int>(set.size());
    row.model = fit_normal(set);
    row.jnd = jnd_point(row.model);
    if (set.size() >= 8) {
      row.normality = jarque_bera(set, o.alpha);
    } else {
      ++partial;
    }
    curves[set.resolution].push_back(io::CurveRow{set.clip_id, set.jnd_order, sample_curve(row.model)});
    rows.push_back(std::move(row));
  }

  io::OutputSet out;
  out.add(dir / "models.csv", io::format_models(rows));
  out.add(dir / "normality_summary.csv", io::format_pass_rates(normality_pass_rate(sets, o.alpha)));
  for (const auto& [res, list] : curves) {
    out.add(dir / ("curves_" + std::string(to_string(res)) + ".csv"), io::format_curves(list));
  }
  out.commit();
  std::cout << "fit: " << rows.size() << " sample sets";
  if (partial) std::cout << " (" << partial << " below 8 samples, normality not tested)";
  std::cout << " -> " << dir.string() << '\n';
  return 0;
}

// --- simulate -----------------------------------------------------------------

int cmd_simulate(const Options& o) {
  auto campaigns = io::load_campaigns(o.config);
  if (o.seed) {
    for (std::size_t i = 0; i < campaigns.size(); ++i) campaigns[i].seed = *o.seed + i;
  }
  std::vector<JndSampleSet> sets;
  for (const auto& c : campaigns) sets.push_back(simulate_campaign(c));
  const fs::path dir = out_path(o, fs::path(o.config).parent_path());
  io::OutputSet out;
  out.add(dir / "samples.csv", io::format_samples(sets));
  out.commit();
  std::cout << "simulate: " << sets.size() << " campaigns -> " << (dir / "samples.csv").string()
            << '\n';
  return 0;
}

// --- extract ------------------------------------------------------------------

struct Extracted {
  std::vector<QualityLadder> ladders;
  std::vector<std::pair<std::string, MaskingStats>> masking;
  std::vector<io::FeatureRow> features;
};

int cmd_extract(const Options& o) {
  const io::Manifest manifest = io::load_manifest(o.config);
  std::map<fs::path, std::map<std::string, QualityLadder>> score_files;
  std::map<Resolution, Extracted> groups;

  for (const auto& clip : manifest.clips) {
    QualityLadder ladder;
    std::optional<LumaClip> reference;
    std::optional<SegmentGrid> grid;
    if (clip.reference) {
      reference = io::read_luma(*clip.reference, clip.width, clip.height, clip.frames);
      grid = segment_partition(clip.width, clip.height, clip.frames, clip.temporal_len);
    }
    if (clip.scores) {
      auto it = score_files.find(*clip.scores);
      if (it == score_files.end()) it = score_files.emplace(*clip.scores, io::read_scores(*clip.scores)).first;
      const auto found = it->second.find(clip.id);
      if (found == it->second.end()) {
        throw PipelineError("score file '" + clip.scores->string() + "' has no rows for clip '" +
                            clip.id + "'");
      }
      ladder = found->second;
    } else {
      ladder = QualityLadder(clip.id, grid->segment_count(), "psnr");
      for (int qp = 1; qp <= kMaxQp; ++qp) {
        const auto path = clip.distorted.find(qp);
        if (path == clip.distorted.end()) {
          throw PipelineError("clip '" + clip.id + "' has no distorted plane for QP " +
                              std::to_string(qp));
        }
        const LumaClip coded = io::read_luma(path->second, clip.width, clip.height, clip.frames);
        ladder.set_row(qp, segment_quality_psnr(*reference, coded, *grid));
      }
    }
    const MaskingStats masking = clip.masking ? *clip.masking : masking_features(*reference, *grid);

    Extracted& group = groups[clip.resolution];
    for (int anchor : manifest.feature_anchors) {
      group.features.push_back(
          io::FeatureRow{clip.id, build_feature_vector(ladder, masking, anchor)});
    }
    group.masking.emplace_back(clip.id, masking);
    group.ladders.push_back(std::move(ladder));
  }

  const fs::path dir = out_path(o, fs::path(o.config).parent_path());
  io::OutputSet out;
  for (const auto& [res, group] : groups) {
    const std::string tag(to_string(res));
    out.add(dir / ("scores_" + tag + ".csv"), io::format_scores(group.ladders));
    out.add(dir / ("masking_" + tag + ".csv"), io::format_masking(group.masking));
    out.add(dir / ("features_" + tag + ".csv"), io::format_features(group.features));
  }
  out.commit();
  std::cout << "extract: " << manifest.clips.size() << " clips -> " << dir.string() << '\n';
  return 0;
}

// --- train --------------------------------------------------------------------

int cmd_train(const Options& o) {
  io::TrainSetup setup = io::load_train_setup(o.config);
  if (o.seed) setup.params.seed = *o.seed;
  const auto features = io::read_features(setup.features);
  const auto models = io::read_models(setup.models);

  std::map<std::string, SurModel> truth;
  for (const auto& m : models) {
    if (m.resolution != setup.resolution || m.jnd_order != setup.jnd_order) continue;
    if (!truth.emplace(m.clip_id, m.model).second) {
      throw PipelineError("model table lists clip '" + m.clip_id + "' twice");
    }
  }
  std::vector<LabeledClip> clips;
  std::set<std::string> used;
  for (const auto& f : features) {
    const auto it = truth.find(f.clip_id);
    if (it == truth.end() || f.features.anchor_qp != it->second.anchor_qp) continue;
    clips.push_back(LabeledClip{f.clip_id, f.features.values, it->second});
    used.insert(f.clip_id);
  }
  for (const auto& [id, model] : truth) {
    if (!used.count(id)) {
      throw PipelineError("clip '" + id + "' has no feature row at anchor QP " +
                          std::to_string(model.anchor_qp));
    }
  }

  TrainedPredictor predictor = train_sur_predictor(clips, setup.params);
  predictor.jnd_order = setup.jnd_order;
  predictor.resolution = std::string(to_string(setup.resolution));
  const fs::path target =
      o.out_dir.empty() ? setup.output : fs::path(o.out_dir) / setup.output.filename();
  io::OutputSet out;
  out.add(target, io::serialize_predictor(predictor));
  out.commit();
  std::cout << "train: " << clips.size() << " clips -> " << target.string() << '\n';
  return 0;
}

// --- predict ------------------------------------------------------------------

int cmd_predict(const Options& o) {
  const io::PredictSetup setup = io::load_predict_setup(o.config);
  const TrainedPredictor predictor =
      io::deserialize_predictor(io::read_file(setup.model), setup.model.string());
  const auto features = io::read_features(setup.features);

  std::vector<io::CurveRow> curves;
  std::string table = "clip_id,anchor_qp,mu,sigma,jnd_qp,jnd_int\n";
  for (const auto& f : features) {
    const int anchor = setup.anchor_qp.value_or(f.features.anchor_qp);
    if (anchor != f.features.anchor_qp) continue;
    const SurPrediction p = predict_sur_curve(predictor, f.features.values, anchor);
    curves.push_back(io::CurveRow{f.clip_id, predictor.jnd_order, p.curve});
    table += f.clip_id + ',' + std::to_string(anchor) + ',' + io::format_double(p.model.mu) + ',' +
             io::format_double(p.model.sigma) + ',' + io::format_double(p.jnd.qp) + ',' +
             std::to_string(p.jnd.qp_int) + '\n';
  }
  if (curves.empty()) throw PipelineError("no feature rows match the requested anchor");
  const fs::path dir = out_path(o, fs::path(o.config).parent_path());
  io::OutputSet out;
  out.add(dir / "curves.csv", io::format_curves(curves));
  out.add(dir / "predictions.csv", std::move(table));
  out.commit();
  std::cout << "predict: " << curves.size() << " clips -> " << dir.string() << '\n';
  return 0;
}

// --- evaluate -----------------------------------------------------------------

int cmd_evaluate(const Options& o) {
  io::EvalSetup setup = io::load_eval_setup(o.config);
  if (o.seed) setup.config.seed = *o.seed;
  if (o.oracle) setup.config.oracle_predictor = true;
  const EvalReport report = run_full_evaluation(setup.corpus, setup.config);
  if (report.cells.empty()) throw PipelineError("no evaluation cell could be computed");

  const fs::path dir = o.out_dir.empty() ? setup.output_dir : fs::path(o.out_dir);
  io::OutputSet out;
  io::add_report_files(out, dir, report, io::describe_eval(setup));
  out.commit();
  for (const auto& cell : report.cells) {
    std::cout << to_string(cell.resolution) << " order " << cell.jnd_order << ' '
              << to_string(cell.setting) << ": clips=" << cell.clips.size()
              << " dSUR=" << io::format_double(cell.mean_delta_sur)
              << " dQP=" << io::format_double(cell.mean_delta_qp) << '\n';
  }
  for (const auto& s : report.skipped) std::cout << "skipped: " << s << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SUR curve modelling and JND prediction for compressed video"};
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "Override the configured random seed");
  };

  auto* fit = app.add_subcommand("fit", "Fit SUR models and test normality of JND samples");
  fit->add_option("samples", o.input, "JND sample file")->required();
  fit->add_option("--alpha", o.alpha, "Significance level of the normality test")
      ->check(CLI::Range(1e-9, 0.999999));
  fit->add_option("--out-dir", o.out_dir, "Output directory (default: current directory)");

  auto* simulate = app.add_subcommand("simulate", "Simulate bisection campaigns");
  simulate->add_option("--config", o.config, "Campaign file")->required();
  simulate->add_option("--out-dir", o.out_dir, "Output directory");
  add_seed(simulate);

  auto* extract = app.add_subcommand("extract", "Extract quality ladders, masking and features");
  extract->add_option("--config", o.config, "Clip manifest")->required();
  extract->add_option("--out-dir", o.out_dir, "Output directory");

  auto* train = app.add_subcommand("train", "Train a SUR predictor");
  train->add_option("--config", o.config, "Training config")->required();
  train->add_option("--out-dir", o.out_dir, "Output directory");
  add_seed(train);

  auto* predict = app.add_subcommand("predict", "Predict SUR curves from features");
  predict->add_option("--config", o.config, "Prediction config")->required();
  predict->add_option("--out-dir", o.out_dir, "Output directory");

  auto* evaluate = app.add_subcommand("evaluate", "Cross-validated evaluation harness");
  evaluate->add_option("--config", o.config, "Evaluation config")->required();
  evaluate->add_option("--out-dir", o.out_dir, "Output directory");
  evaluate->add_flag("--oracle-predictor", o.oracle,
                     "Replace the regressor with the ground truth (testing)");
  add_seed(evaluate);

  CLI11_PARSE(app, argc, argv);

  for (auto* sub : {simulate, train, evaluate}) {
    if (sub->parsed() && sub->count("--seed")) o.seed = seed;
  }

  try {
    if (fit->parsed()) return cmd_fit(o);
    if (simulate->parsed()) return cmd_simulate(o);
    if (extract->parsed()) return cmd_extract(o);
    if (train->parsed()) return cmd_train(o);
    if (predict->parsed()) return cmd_predict(o);
    if (evaluate->parsed()) return cmd_evaluate(o);
  } catch (const std::exception& e) {
    std::cerr << "jndsur: error: " << e.what() << '\n';
    return EXIT_FAILURE;
  }
  return EXIT_FAILURE;
}
