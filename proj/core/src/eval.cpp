#include "jndsur/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include "jndsur/error.hpp"

namespace jndsur {

std::string_view to_string(Setting s) noexcept {
  switch (s) {
    case Setting::GroundTruthRef: return "GroundTruthRef";
    case Setting::PredictedRef: return "PredictedRef";
    case Setting::SameRef: return "SameRef";
  }
  return "?";
}

Setting parse_setting(std::string_view text) {
  for (Setting s : kAllSettings) {
    if (to_string(s) == text) return s;
  }
  throw InvalidInput("unknown setting '" + std::string(text) + "'");
}

const CellReport* EvalReport::find(Resolution r, int order, Setting s) const {
  for (const auto& cell : cells) {
    if (cell.resolution == r && cell.jnd_order == order && cell.setting == s) return &cell;
  }
  return nullptr;
}

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t cell_seed(std::uint64_t master, std::initializer_list<std::uint64_t> key) {
  std::uint64_t h = mix(master);
  for (auto k : key) h = mix(h ^ k);
  return h;
}

class ResolutionEvaluator {
 public:
  ResolutionEvaluator(const ResolutionCorpus& corpus, const EvalConfig& config)
      : corpus_(corpus), config_(config), folds_(resolution_folds(corpus, config)) {
    truth_.resize(corpus_.clips.size());
    for (std::size_t c = 0; c < corpus_.clips.size(); ++c) {
      const auto& clip = corpus_.clips[c];
      for (const auto& set : clip.orders) {
        if (set.samples.empty()) break;
        truth_[c].push_back(fit_normal(set));
      }
    }
  }

  [[nodiscard]] const std::vector<int>& folds() const { return folds_; }

  std::vector<ClipResult> evaluate(int order, Setting setting) {
    require_order(order);
    if (order == 1) setting = Setting::GroundTruthRef;

    std::vector<ClipResult> results;
    results.reserve(corpus_.clips.size());
    for (std::size_t c = 0; c < corpus_.clips.size(); ++c) {
      const int fold = folds_[c];
      const SurModel& truth = truth_[c][static_cast<std::size_t>(order - 1)];

      int anchor = 0;
      switch (setting) {
        case Setting::GroundTruthRef: anchor = gt_anchor(c, order); break;
        case Setting::PredictedRef: anchor = predicted_anchor(fold, c, order); break;
        case Setting::SameRef: anchor = 0; break;
      }
      const bool zero_anchor = order == 1 || setting == Setting::SameRef;
      const SurPrediction pred = predict(fold, c, order, anchor, zero_anchor);

      ClipResult r;
      r.clip_id = corpus_.clips[c].clip_id;
      r.fold = fold;
      r.anchor_qp = anchor;
      r.qp_lo = anchor + 1;
      r.truth_mu = truth.mu;
      r.truth_sigma = truth.sigma;
      r.pred_mu = pred.model.mu;
      r.pred_sigma = pred.model.sigma;
      r.truth_jnd = jnd_point(truth).qp_int;
      r.pred_jnd = pred.jnd.qp_int;
      r.delta_sur = delta_sur(pred.curve, sample_curve(truth, r.qp_lo, kMaxQp));
      r.delta_qp = std::abs(r.pred_jnd - r.truth_jnd);
      r.model_vs_empirical =
          delta_sur(sample_curve(truth), empirical_curve(corpus_.clips[c].orders[order - 1]));
      results.push_back(std::move(r));
    }
    return results;
  }

 private:
  void require_order(int order) const {
    if (order < 1 || order > 3) throw InvalidInput("jnd_order must be 1, 2 or 3");
    for (std::size_t c = 0; c < corpus_.clips.size(); ++c) {
      if (truth_[c].size() < static_cast<std::size_t>(order)) {
        throw PipelineError(std::string(to_string(corpus_.resolution)) + " clip '" +
                            corpus_.clips[c].clip_id + "' has no ground truth for JND order " +
                            std::to_string(order));
      }
    }
  }

  int gt_anchor(std::size_t clip, int order) const {
    return corpus_.clips[clip].orders[static_cast<std::size_t>(order - 1)].anchor_qp;
  }

  const std::vector<double>& features(std::size_t clip, int anchor) {
    const auto key = std::make_pair(clip, anchor);
    auto it = features_.find(key);
    if (it == features_.end()) {
      const auto& rec = corpus_.clips[clip];
      it = features_.emplace(key, build_feature_vector(rec.ladder, rec.masking, anchor).values)
               .first;
    }
    return it->second;
  }

  const TrainedPredictor& predictor(int fold, int order, bool zero_anchor) {
    const auto key = std::make_tuple(fold, order, zero_anchor);
    auto it = predictors_.find(key);
    if (it != predictors_.end()) return it->second;

    std::vector<LabeledClip> train;
    for (std::size_t c = 0; c < corpus_.clips.size(); ++c) {
      if (folds_[c] == fold) continue;
      const int anchor = zero_anchor ? 0 : gt_anchor(c, order);
      SurModel target = truth_[c][static_cast<std::size_t>(order - 1)];
      target.anchor_qp = anchor;
      train.push_back(LabeledClip{corpus_.clips[c].clip_id, features(c, anchor), target});
    }
    PredictorParams params = config_.predictor;
    params.seed = cell_seed(config_.seed, {static_cast<std::uint64_t>(corpus_.resolution),
                                           static_cast<std::uint64_t>(order),
                                           static_cast<std::uint64_t>(fold),
                                           static_cast<std::uint64_t>(zero_anchor)});
    TrainedPredictor trained = train_sur_predictor(train, params);
    trained.fold = fold;
    trained.jnd_order = order;
    trained.resolution = std::string(to_string(corpus_.resolution));
    return predictors_.emplace(key, std::move(trained)).first->second;
  }

  SurPrediction predict(int fold, std::size_t clip, int order, int anchor, bool zero_anchor) {
    if (config_.oracle_predictor) {
      const SurModel& truth = truth_[clip][static_cast<std::size_t>(order - 1)];
      return prediction_from_params(truth.mu, truth.sigma, anchor);
    }
    return predict_sur_curve(predictor(fold, order, zero_anchor), features(clip, anchor), anchor);
  }

  // Anchor for `order` when every earlier reference is itself predicted.
  int predicted_anchor(int fold, std::size_t clip, int order) {
    int anchor = 0;
    for (int k = 1; k < order; ++k) {
      const SurPrediction p = predict(fold, clip, k, anchor, k == 1);
      anchor = std::min(p.jnd.qp_int, kMaxPredictionAnchor);
    }
    return anchor;
  }

  const ResolutionCorpus& corpus_;
  const EvalConfig& config_;
  std::vector<int> folds_;
  std::vector<std::vector<SurModel>> truth_;
  std::map<std::pair<std::size_t, int>, std::vector<double>> features_;
  std::map<std::tuple<int, int, bool>, TrainedPredictor> predictors_;
};

}  // namespace

std::uint64_t repetition_seed(std::uint64_t seed, int repetition) {
  if (repetition == 0) return seed;
  return cell_seed(seed, {0x7265706574ULL, static_cast<std::uint64_t>(repetition)});
}

std::vector<int> resolution_folds(const ResolutionCorpus& corpus, const EvalConfig& config) {
  return kfold_split(corpus.clips.size(), config.folds,
                     cell_seed(config.seed, {static_cast<std::uint64_t>(corpus.resolution)}));
}

void summarize(CellReport& cell) {
  if (cell.clips.empty()) {
    cell.mean_delta_sur = cell.mean_delta_qp = cell.mean_model_vs_empirical = 0.0;
    return;
  }
  double sur_sum = 0.0;
  double qp_sum = 0.0;
  double gap_sum = 0.0;
  for (const auto& r : cell.clips) {
    sur_sum += r.delta_sur;
    qp_sum += r.delta_qp;
    gap_sum += r.model_vs_empirical;
  }
  const double n = static_cast<double>(cell.clips.size());
  cell.mean_delta_sur = sur_sum / n;
  cell.mean_delta_qp = qp_sum / n;
  cell.mean_model_vs_empirical = gap_sum / n;
}

std::vector<ClipResult> evaluate_order(const ResolutionCorpus& corpus, int jnd_order,
                                       Setting setting, const EvalConfig& config) {
  ResolutionEvaluator evaluator(corpus, config);
  return evaluator.evaluate(jnd_order, setting);
}

EvalReport run_full_evaluation(const Corpus& corpus, const EvalConfig& config) {
  if (config.folds < 2) throw InvalidInput("evaluation: at least 2 folds required");
  std::vector<int> orders = config.orders;
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  for (int k : orders) {
    if (k < 1 || k > 3) throw InvalidInput("evaluation: JND orders must be 1, 2 or 3");
  }

  if (config.repetitions < 1) throw InvalidInput("evaluation: at least 1 repetition required");

  EvalReport report;
  report.repetitions = config.repetitions;
  for (const auto& group : corpus.groups) {
    const std::string res(to_string(group.resolution));
    if (group.clips.size() < static_cast<std::size_t>(config.folds)) {
      report.skipped.push_back(res + ": " + std::to_string(group.clips.size()) +
                               " clips cannot fill " + std::to_string(config.folds) + " folds");
      continue;
    }
    std::vector<int> usable;
    for (int order : orders) {
      const auto missing = std::find_if(group.clips.begin(), group.clips.end(), [&](const auto& c) {
        for (int k = 1; k <= order; ++k) {
          if (!c.has_order(k)) return true;
        }
        return false;
      });
      if (missing != group.clips.end()) {
        report.skipped.push_back(res + " order " + std::to_string(order) + ": clip '" +
                                 missing->clip_id + "' lacks JND samples");
      } else {
        usable.push_back(order);
      }
    }

    const std::size_t first_cell = report.cells.size();
    for (int rep = 0; rep < config.repetitions; ++rep) {
      EvalConfig rep_config = config;
      rep_config.seed = repetition_seed(config.seed, rep);
      ResolutionEvaluator evaluator(group, rep_config);
      FoldAssignment assignment;
      assignment.resolution = group.resolution;
      assignment.repetition = rep;
      assignment.folds = evaluator.folds();
      for (const auto& clip : group.clips) assignment.clip_ids.push_back(clip.clip_id);
      report.folds.push_back(std::move(assignment));

      std::size_t cell_index = first_cell;
      for (int order : usable) {
        std::vector<Setting> settings;
        if (order == 1) {
          settings.push_back(Setting::GroundTruthRef);
        } else {
          settings = config.settings;
        }
        for (Setting s : settings) {
          if (rep == 0) {
            CellReport cell;
            cell.resolution = group.resolution;
            cell.jnd_order = order;
            cell.setting = s;
            report.cells.push_back(std::move(cell));
          }
          CellReport& cell = report.cells[cell_index++];
          for (ClipResult& r : evaluator.evaluate(order, s)) {
            r.repetition = rep;
            cell.clips.push_back(std::move(r));
          }
        }
      }
    }
    for (std::size_t i = first_cell; i < report.cells.size(); ++i) summarize(report.cells[i]);
  }
  return report;
}

}  // namespace jndsur
