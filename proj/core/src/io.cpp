#include "jndsur/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include "json.hpp"
#include "jndsur/error.hpp"

namespace jndsur::io {

using nlohmann::json;

std::string format_double(double value) {
  if (!std::isfinite(value)) {
    if (std::isnan(value)) return "nan";
    return value > 0 ? "inf" : "-inf";
  }
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

// --- files ----------------------------------------------------------------

void write_file_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw PipelineError("cannot open '" + tmp.string() + "' for writing");
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    if (!os) {
      os.close();
      fs::remove(tmp);
      throw PipelineError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw PipelineError("cannot move output into place at '" + path.string() + "': " +
                        ec.message());
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PipelineError("missing input file '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void OutputSet::add(fs::path path, std::string content) {
  files_.emplace_back(std::move(path), std::move(content));
}

void OutputSet::commit() const {
  for (const auto& [path, content] : files_) write_file_atomic(path, content);
}

// --- delimited text -------------------------------------------------------

namespace {

struct CsvRow {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                    : comma - start);
    while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
      field.remove_suffix(1);
    }
    out.emplace_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += ',';
    out += cols[i];
  }
  return out;
}

// Returns the data rows after checking the header. Blank lines and lines
// starting with '#' are ignored.
std::vector<CsvRow> parse_table(std::string_view text, const std::string& source,
                                const std::vector<std::string>& header) {
  std::vector<CsvRow> rows;
  bool seen_header = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view trimmed = line;
    while (!trimmed.empty() && (trimmed.back() == '\r' || trimmed.back() == ' ')) {
      trimmed.remove_suffix(1);
    }
    if (trimmed.empty() || trimmed.front() == '#') continue;
    auto fields = split(trimmed);
    if (!seen_header) {
      if (fields != header) {
        throw FormatError(source, line_no, "expected header '" + join(header) + "'");
      }
      seen_header = true;
      continue;
    }
    if (fields.size() != header.size()) {
      throw FormatError(source, line_no,
                        "expected " + std::to_string(header.size()) + " fields, got " +
                            std::to_string(fields.size()));
    }
    rows.push_back(CsvRow{line_no, std::move(fields)});
  }
  if (!seen_header) throw FormatError(source, 0, "empty input");
  return rows;
}

int parse_int(const std::string& field, const std::string& source, std::size_t line,
              std::string_view column) {
  int value = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
    throw FormatError(source, line,
                      "column " + std::string(column) + ": '" + field + "' is not an integer");
  }
  return value;
}

double parse_real(const std::string& field, const std::string& source, std::size_t line,
                  std::string_view column) {
  double value = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw FormatError(source, line,
                      "column " + std::string(column) + ": '" + field + "' is not a finite number");
  }
  return value;
}

Resolution parse_res(const std::string& field, const std::string& source, std::size_t line) {
  try {
    return parse_resolution(field);
  } catch (const InvalidInput& e) {
    throw FormatError(source, line, e.what());
  }
}

const std::vector<std::string> kSampleHeader{"clip_id", "resolution", "jnd_order",
                                             "anchor_qp", "subject_id", "jnd_qp"};
const std::vector<std::string> kCurveHeader{"clip_id", "jnd_order", "qp", "sur_value"};
const std::vector<std::string> kModelHeader{"clip_id",  "resolution",   "jnd_order",
                                            "anchor_qp", "subjects",    "mu",
                                            "sigma",    "jnd_qp",       "jnd_int",
                                            "jb_statistic", "jb_critical", "jb_passed"};
const std::vector<std::string> kScoreHeader{"clip_id", "qp", "segment_id", "score"};
const std::vector<std::string> kMaskingHeader{"clip_id", "spatial_mean", "spatial_std",
                                              "temporal_mean", "temporal_std"};

std::vector<std::string> feature_header() {
  std::vector<std::string> h{"clip_id", "anchor_qp"};
  for (int i = 0; i < kFeatureDim; ++i) h.push_back("f" + std::to_string(i));
  return h;
}

}  // namespace

// --- samples --------------------------------------------------------------

std::vector<JndSampleSet> parse_samples(std::string_view text, const std::string& source) {
  const auto rows = parse_table(text, source, kSampleHeader);
  std::vector<JndSampleSet> sets;
  std::map<std::tuple<std::string, Resolution, int>, std::size_t> index;
  std::map<std::size_t, std::set<std::string>> subjects;
  std::map<std::size_t, std::size_t> first_line;
  for (const auto& row : rows) {
    const auto& f = row.fields;
    if (f[0].empty()) throw FormatError(source, row.line, "empty clip_id");
    const Resolution res = parse_res(f[1], source, row.line);
    const int order = parse_int(f[2], source, row.line, "jnd_order");
    const int anchor = parse_int(f[3], source, row.line, "anchor_qp");
    const double qp = parse_real(f[5], source, row.line, "jnd_qp");
    const auto key = std::make_tuple(f[0], res, order);
    auto it = index.find(key);
    if (it == index.end()) {
      JndSampleSet set;
      set.clip_id = f[0];
      set.resolution = res;
      set.jnd_order = order;
      set.anchor_qp = anchor;
      it = index.emplace(key, sets.size()).first;
      first_line[sets.size()] = row.line;
      sets.push_back(std::move(set));
    }
    auto& set = sets[it->second];
    if (set.anchor_qp != anchor) {
      throw FormatError(source, row.line, "anchor_qp differs from earlier rows of the same set");
    }
    if (!subjects[it->second].insert(f[4]).second) {
      throw FormatError(source, row.line, "duplicate subject_id '" + f[4] + "'");
    }
    if (!(qp > anchor && qp <= kMaxQp)) {
      throw FormatError(source, row.line, "jnd_qp must lie in (anchor_qp, 51]");
    }
    set.samples.push_back(qp);
  }
  for (std::size_t i = 0; i < sets.size(); ++i) {
    try {
      sets[i].validate();
    } catch (const InvalidInput& e) {
      throw FormatError(source, first_line[i], e.what());
    }
  }
  return sets;
}

std::vector<JndSampleSet> read_samples(const fs::path& path) {
  return parse_samples(read_file(path), path.string());
}

std::string format_samples(const std::vector<JndSampleSet>& sets) {
  std::string out = join(kSampleHeader) + "\n";
  for (const auto& set : sets) {
    for (std::size_t m = 0; m < set.samples.size(); ++m) {
      out += set.clip_id + ',' + std::string(to_string(set.resolution)) + ',' +
             std::to_string(set.jnd_order) + ',' + std::to_string(set.anchor_qp) + ",s" +
             std::to_string(m + 1) + ',' + format_double(set.samples[m]) + '\n';
    }
  }
  return out;
}

// --- curves ---------------------------------------------------------------

std::string format_curves(const std::vector<CurveRow>& rows) {
  std::string out = join(kCurveHeader) + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.curve.qp_grid.size(); ++i) {
      out += row.clip_id + ',' + std::to_string(row.jnd_order) + ',' +
             std::to_string(row.curve.qp_grid[i]) + ',' + format_double(row.curve.values[i]) +
             '\n';
    }
  }
  return out;
}

std::vector<CurveRow> parse_curves(std::string_view text, const std::string& source) {
  const auto rows = parse_table(text, source, kCurveHeader);
  std::vector<CurveRow> out;
  for (const auto& row : rows) {
    const int order = parse_int(row.fields[1], source, row.line, "jnd_order");
    const int qp = parse_int(row.fields[2], source, row.line, "qp");
    const double v = parse_real(row.fields[3], source, row.line, "sur_value");
    if (v < 0.0 || v > 1.0) throw FormatError(source, row.line, "sur_value outside [0, 1]");
    if (out.empty() || out.back().clip_id != row.fields[0] || out.back().jnd_order != order) {
      out.push_back(CurveRow{row.fields[0], order, {}});
    }
    auto& curve = out.back().curve;
    if (!curve.qp_grid.empty() && qp <= curve.qp_grid.back()) {
      throw FormatError(source, row.line, "qp grid must be strictly increasing");
    }
    curve.qp_grid.push_back(qp);
    curve.values.push_back(v);
  }
  return out;
}

// --- fitted models ----------------------------------------------------------

std::string format_models(const std::vector<ModelRow>& rows) {
  std::string out = join(kModelHeader) + "\n";
  for (const auto& r : rows) {
    out += r.clip_id + ',' + std::string(to_string(r.resolution)) + ',' +
           std::to_string(r.jnd_order) + ',' + std::to_string(r.model.anchor_qp) + ',' +
           std::to_string(r.subjects) + ',' + format_double(r.model.mu) + ',' +
           format_double(r.model.sigma) + ',' + format_double(r.jnd.qp) + ',' +
           std::to_string(r.jnd.qp_int) + ',';
    if (r.normality) {
      out += format_double(r.normality->statistic) + ',' +
             format_double(r.normality->critical_value) + ',' +
             (r.normality->passed ? "1" : "0");
    } else {
      out += "NA,NA,NA";
    }
    out += '\n';
  }
  return out;
}

std::vector<ModelRow> parse_models(std::string_view text, const std::string& source) {
  const auto rows = parse_table(text, source, kModelHeader);
  std::vector<ModelRow> out;
  for (const auto& row : rows) {
    const auto& f = row.fields;
    ModelRow r;
    r.clip_id = f[0];
    r.resolution = parse_res(f[1], source, row.line);
    r.jnd_order = parse_int(f[2], source, row.line, "jnd_order");
    r.model.anchor_qp = parse_int(f[3], source, row.line, "anchor_qp");
    r.subjects = parse_int(f[4], source, row.line, "subjects");
    r.model.mu = parse_real(f[5], source, row.line, "mu");
    r.model.sigma = parse_real(f[6], source, row.line, "sigma");
    r.jnd.qp = parse_real(f[7], source, row.line, "jnd_qp");
    r.jnd.qp_int = parse_int(f[8], source, row.line, "jnd_int");
    if (r.model.sigma < kSigmaFloor) throw FormatError(source, row.line, "sigma below floor");
    if (f[9] != "NA") {
      NormalityResult n;
      n.statistic = parse_real(f[9], source, row.line, "jb_statistic");
      n.critical_value = parse_real(f[10], source, row.line, "jb_critical");
      n.passed = parse_int(f[11], source, row.line, "jb_passed") != 0;
      r.normality = n;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ModelRow> read_models(const fs::path& path) {
  return parse_models(read_file(path), path.string());
}

std::string format_pass_rates(const std::map<PassRateKey, PassRate>& rates) {
  std::string out = "resolution,jnd_order,tested,passed,skipped,pass_rate\n";
  for (const auto& [key, rate] : rates) {
    out += std::string(to_string(key.first)) + ',' + std::to_string(key.second) + ',' +
           std::to_string(rate.tested) + ',' + std::to_string(rate.passed) + ',' +
           std::to_string(rate.skipped) + ',' + format_double(rate.rate()) + '\n';
  }
  return out;
}

// --- scores / masking / features -------------------------------------------

std::map<std::string, QualityLadder> parse_scores(std::string_view text, const std::string& source,
                                                  const std::string& metric) {
  const auto rows = parse_table(text, source, kScoreHeader);
  struct Cell {
    int qp;
    int segment;
    double score;
    std::size_t line;
  };
  std::map<std::string, std::vector<Cell>> cells;
  for (const auto& row : rows) {
    const int qp = parse_int(row.fields[1], source, row.line, "qp");
    const int seg = parse_int(row.fields[2], source, row.line, "segment_id");
    const double score = parse_real(row.fields[3], source, row.line, "score");
    if (qp < 1 || qp > kMaxQp) throw FormatError(source, row.line, "qp outside [1, 51]");
    if (seg < 0) throw FormatError(source, row.line, "negative segment_id");
    cells[row.fields[0]].push_back(Cell{qp, seg, score, row.line});
  }
  std::map<std::string, QualityLadder> ladders;
  for (auto& [clip, list] : cells) {
    int max_seg = 0;
    for (const auto& c : list) max_seg = std::max(max_seg, c.segment);
    QualityLadder ladder(clip, max_seg + 1, metric);
    for (const auto& c : list) ladder.set_score(c.qp, c.segment, c.score);
    try {
      ladder.require_complete();
    } catch (const InvalidInput& e) {
      throw FormatError(source, 0, e.what());
    }
    ladders.emplace(clip, std::move(ladder));
  }
  return ladders;
}

std::map<std::string, QualityLadder> read_scores(const fs::path& path) {
  return parse_scores(read_file(path), path.string());
}

std::string format_scores(const std::vector<QualityLadder>& ladders) {
  std::string out = join(kScoreHeader) + "\n";
  for (const auto& ladder : ladders) {
    for (int q = 1; q <= kMaxQp; ++q) {
      for (int s = 0; s < ladder.segment_count(); ++s) {
        out += ladder.clip_id() + ',' + std::to_string(q) + ',' + std::to_string(s) + ',' +
               format_double(ladder.score(q, s)) + '\n';
      }
    }
  }
  return out;
}

std::map<std::string, MaskingStats> parse_masking(std::string_view text,
                                                  const std::string& source) {
  const auto rows = parse_table(text, source, kMaskingHeader);
  std::map<std::string, MaskingStats> out;
  for (const auto& row : rows) {
    MaskingStats m;
    m.spatial_mean = parse_real(row.fields[1], source, row.line, "spatial_mean");
    m.spatial_std = parse_real(row.fields[2], source, row.line, "spatial_std");
    m.temporal_mean = parse_real(row.fields[3], source, row.line, "temporal_mean");
    m.temporal_std = parse_real(row.fields[4], source, row.line, "temporal_std");
    if (m.spatial_mean < 0 || m.spatial_std < 0 || m.temporal_mean < 0 || m.temporal_std < 0) {
      throw FormatError(source, row.line, "masking statistics must be non-negative");
    }
    if (!out.emplace(row.fields[0], m).second) {
      throw FormatError(source, row.line, "duplicate clip '" + row.fields[0] + "'");
    }
  }
  return out;
}

std::map<std::string, MaskingStats> read_masking(const fs::path& path) {
  return parse_masking(read_file(path), path.string());
}

std::string format_masking(const std::vector<std::pair<std::string, MaskingStats>>& rows) {
  std::string out = join(kMaskingHeader) + "\n";
  for (const auto& [clip, m] : rows) {
    out += clip + ',' + format_double(m.spatial_mean) + ',' + format_double(m.spatial_std) + ',' +
           format_double(m.temporal_mean) + ',' + format_double(m.temporal_std) + '\n';
  }
  return out;
}

std::string format_features(const std::vector<FeatureRow>& rows) {
  std::string out = join(feature_header()) + "\n";
  for (const auto& row : rows) {
    if (row.features.values.size() != static_cast<std::size_t>(kFeatureDim)) {
      throw InvalidInput("format_features: feature vector of clip '" + row.clip_id +
                         "' has the wrong length");
    }
    out += row.clip_id + ',' + std::to_string(row.features.anchor_qp);
    for (double v : row.features.values) out += ',' + format_double(v);
    out += '\n';
  }
  return out;
}

std::vector<FeatureRow> parse_features(std::string_view text, const std::string& source) {
  const auto rows = parse_table(text, source, feature_header());
  std::vector<FeatureRow> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    FeatureRow r;
    r.clip_id = row.fields[0];
    r.features.anchor_qp = parse_int(row.fields[1], source, row.line, "anchor_qp");
    for (int i = 0; i < kFeatureDim; ++i) {
      r.features.values.push_back(parse_real(row.fields[static_cast<std::size_t>(i) + 2], source,
                                             row.line, "f" + std::to_string(i)));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<FeatureRow> read_features(const fs::path& path) {
  return parse_features(read_file(path), path.string());
}

// --- predictor persistence --------------------------------------------------

namespace {

json params_to_json(const SvrParams& p) {
  return json{{"C", p.c},
              {"epsilon", p.epsilon},
              {"gamma", p.gamma},
              {"tol", p.tol},
              {"max_iterations", p.max_iterations}};
}

SvrParams params_from_json(const json& j, SvrParams base = {}) {
  if (j.contains("C")) base.c = j.at("C").get<double>();
  if (j.contains("epsilon")) base.epsilon = j.at("epsilon").get<double>();
  if (j.contains("gamma")) base.gamma = j.at("gamma").get<double>();
  if (j.contains("tol")) base.tol = j.at("tol").get<double>();
  if (j.contains("max_iterations")) base.max_iterations = j.at("max_iterations").get<long>();
  base.validate();
  return base;
}

json head_to_json(const SvrModel& m, const SvrParams& p) {
  return json{{"params", params_to_json(p)}, {"gamma", m.gamma},     {"bias", m.bias},
              {"dim", m.dim},                {"support", m.support}, {"coef", m.coef}};
}

SvrModel head_from_json(const json& j) {
  SvrModel m;
  m.gamma = j.at("gamma").get<double>();
  m.bias = j.at("bias").get<double>();
  m.dim = j.at("dim").get<std::size_t>();
  m.support = j.at("support").get<std::vector<std::vector<double>>>();
  m.coef = j.at("coef").get<std::vector<double>>();
  if (m.support.size() != m.coef.size()) {
    throw InvalidInput("support vector and coefficient counts differ");
  }
  for (const auto& sv : m.support) {
    if (sv.size() != m.dim) throw InvalidInput("support vector has the wrong dimension");
  }
  return m;
}

}  // namespace

std::string serialize_predictor(const TrainedPredictor& p) {
  json j;
  j["format"] = "jndsur-predictor";
  j["version"] = kPredictorFormatVersion;
  j["resolution"] = p.resolution;
  j["jnd_order"] = p.jnd_order;
  j["fold"] = p.fold;
  j["scaling"] = {{"mean", p.scaling.mean}, {"scale", p.scaling.scale}};
  j["heads"] = {{"mu", head_to_json(p.mu_head, p.mu_params)},
                {"log_sigma", head_to_json(p.log_sigma_head, p.log_sigma_params)}};
  return j.dump(1) + "\n";
}

TrainedPredictor deserialize_predictor(std::string_view text, const std::string& source) {
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string()) != "jndsur-predictor") {
      throw FormatError(source, 0, "not a predictor file");
    }
    const int version = j.at("version").get<int>();
    if (version != kPredictorFormatVersion) {
      throw FormatError(source, 0,
                        "unsupported predictor format version " + std::to_string(version));
    }
    TrainedPredictor p;
    p.resolution = j.value("resolution", std::string());
    p.jnd_order = j.value("jnd_order", 1);
    p.fold = j.value("fold", -1);
    p.scaling.mean = j.at("scaling").at("mean").get<std::vector<double>>();
    p.scaling.scale = j.at("scaling").at("scale").get<std::vector<double>>();
    if (p.scaling.mean.size() != p.scaling.scale.size()) {
      throw FormatError(source, 0, "scaling vectors differ in length");
    }
    const auto& heads = j.at("heads");
    p.mu_head = head_from_json(heads.at("mu"));
    p.log_sigma_head = head_from_json(heads.at("log_sigma"));
    p.mu_params = params_from_json(heads.at("mu").at("params"));
    p.log_sigma_params = params_from_json(heads.at("log_sigma").at("params"));
    if (p.mu_head.dim != p.dim() || p.log_sigma_head.dim != p.dim()) {
      throw FormatError(source, 0, "head dimension does not match scaling");
    }
    return p;
  } catch (const json::exception& e) {
    throw FormatError(source, 0, e.what());
  } catch (const InvalidInput& e) {
    throw FormatError(source, 0, e.what());
  }
}

// --- configuration ----------------------------------------------------------

namespace {

json load_json(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(path.string(), 0, e.what());
  }
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

fs::path require_existing(const fs::path& base_dir, const std::string& p, const std::string& what) {
  fs::path path = resolve(base_dir, p);
  if (!fs::exists(path)) {
    throw PipelineError("missing " + what + " '" + path.string() + "'");
  }
  return path;
}

CampaignSpec campaign_from_json(const json& j) {
  CampaignSpec s;
  s.mu = j.at("mu").get<double>();
  s.sigma = j.at("sigma").get<double>();
  s.subjects = j.value("subjects", j.value("M", s.subjects));
  s.rounds = j.value("rounds", j.value("L", s.rounds));
  s.anchor_qp = j.value("anchor_qp", s.anchor_qp);
  s.noise = j.value("noise", s.noise);
  s.seed = j.value("seed", s.seed);
  s.clip_id = j.value("clip_id", s.clip_id);
  s.resolution = parse_resolution(j.value("resolution", std::string("1080p")));
  s.jnd_order = j.value("jnd_order", s.jnd_order);
  s.validate();
  return s;
}

PredictorParams predictor_from_json(const json& j) {
  PredictorParams p;
  if (j.is_null()) return p;
  if (j.contains("mu")) p.mu_head = params_from_json(j.at("mu"), p.mu_head);
  if (j.contains("log_sigma")) p.log_sigma_head = params_from_json(j.at("log_sigma"), p.log_sigma_head);
  p.search = j.value("search", p.search);
  if (j.contains("c_grid")) p.c_grid = j.at("c_grid").get<std::vector<double>>();
  if (j.contains("gamma_multipliers")) {
    p.gamma_multipliers = j.at("gamma_multipliers").get<std::vector<double>>();
  }
  p.inner_folds = j.value("inner_folds", p.inner_folds);
  if (p.search && (p.c_grid.empty() || p.gamma_multipliers.empty() || p.inner_folds < 2)) {
    throw InvalidInput("svr search needs a non-empty grid and at least 2 inner folds");
  }
  return p;
}

json predictor_to_json(const PredictorParams& p) {
  return json{{"mu", params_to_json(p.mu_head)},
              {"log_sigma", params_to_json(p.log_sigma_head)},
              {"search", p.search},
              {"c_grid", p.c_grid},
              {"gamma_multipliers", p.gamma_multipliers},
              {"inner_folds", p.inner_folds}};
}

}  // namespace

std::vector<CampaignSpec> load_campaigns(const fs::path& path) {
  const json j = load_json(path);
  try {
    std::vector<CampaignSpec> out;
    if (j.contains("campaigns")) {
      for (const auto& c : j.at("campaigns")) out.push_back(campaign_from_json(c));
    } else {
      out.push_back(campaign_from_json(j));
    }
    if (out.empty()) throw InvalidInput("no campaigns listed");
    return out;
  } catch (const json::exception& e) {
    throw FormatError(path.string(), 0, e.what());
  } catch (const InvalidInput& e) {
    throw FormatError(path.string(), 0, e.what());
  }
}

Manifest load_manifest(const fs::path& path) {
  const json j = load_json(path);
  const fs::path base = path.parent_path();
  Manifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kManifestFormatVersion) {
      throw FormatError(path.string(), 0,
                        "unsupported manifest format version " + std::to_string(m.format_version));
    }
    if (j.contains("feature_anchors")) {
      m.feature_anchors = j.at("feature_anchors").get<std::vector<int>>();
    }
    std::set<std::pair<std::string, Resolution>> seen;
    for (const auto& c : j.at("clips")) {
      ManifestClip clip;
      clip.id = c.at("id").get<std::string>();
      clip.resolution = parse_resolution(c.at("resolution").get<std::string>());
      if (!seen.emplace(clip.id, clip.resolution).second) {
        throw InvalidInput("duplicate clip id '" + clip.id + "'");
      }
      const FrameSize nominal = frame_size(clip.resolution);
      clip.width = c.value("width", nominal.width);
      clip.height = c.value("height", nominal.height);
      clip.frames = c.value("frames", 0);
      clip.frame_rate = c.value("frame_rate", 30.0);
      clip.temporal_len =
          c.value("temporal_len", std::max(1, static_cast<int>(std::lround(clip.frame_rate))));
      clip.temporal_len = std::min(clip.temporal_len, std::max(clip.frames, 1));
      if (c.contains("reference")) {
        clip.reference = require_existing(base, c.at("reference").get<std::string>(), "reference");
      }
      if (c.contains("distorted")) {
        for (const auto& [qp_text, p] : c.at("distorted").items()) {
          const int qp = std::stoi(qp_text);
          clip.distorted[qp] = require_existing(base, p.get<std::string>(), "distorted clip");
        }
      }
      if (c.contains("distorted_pattern")) {
        const std::string pattern = c.at("distorted_pattern").get<std::string>();
        const auto at = pattern.find("{qp}");
        if (at == std::string::npos) throw InvalidInput("distorted_pattern needs a {qp} field");
        for (int qp = 1; qp <= kMaxQp; ++qp) {
          std::string p = pattern;
          p.replace(at, 4, std::to_string(qp));
          clip.distorted[qp] = require_existing(base, p, "distorted clip");
        }
      }
      if (c.contains("scores")) {
        clip.scores = require_existing(base, c.at("scores").get<std::string>(), "score file");
      }
      if (c.contains("masking")) {
        const auto& mj = c.at("masking");
        MaskingStats ms;
        ms.spatial_mean = mj.at("spatial_mean").get<double>();
        ms.spatial_std = mj.at("spatial_std").get<double>();
        ms.temporal_mean = mj.at("temporal_mean").get<double>();
        ms.temporal_std = mj.at("temporal_std").get<double>();
        clip.masking = ms;
      }
      if (clip.distorted.empty() == !clip.scores.has_value()) {
        throw InvalidInput("clip '" + clip.id + "' needs either distorted planes or a score file");
      }
      if (!clip.distorted.empty() && !clip.reference) {
        throw InvalidInput("clip '" + clip.id + "' lists distorted planes without a reference");
      }
      if (!clip.reference && !clip.masking) {
        throw InvalidInput("clip '" + clip.id + "' needs a reference clip or masking values");
      }
      if (clip.reference && clip.frames < 1) {
        throw InvalidInput("clip '" + clip.id + "' needs a positive frame count");
      }
      m.clips.push_back(std::move(clip));
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string(), 0, e.what());
  } catch (const InvalidInput& e) {
    throw FormatError(path.string(), 0, e.what());
  }
  return m;
}

LumaClip read_luma(const fs::path& path, int width, int height, int frames) {
  std::string bytes = read_file(path);
  const auto expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                        static_cast<std::size_t>(frames);
  if (bytes.size() != expected) {
    throw FormatError(path.string(), 0,
                      "expected " + std::to_string(expected) + " bytes of luma, found " +
                          std::to_string(bytes.size()));
  }
  LumaClip clip;
  clip.width = width;
  clip.height = height;
  clip.pixels.assign(bytes.begin(), bytes.end());
  return clip;
}

EvalSetup load_eval_setup(const fs::path& path) {
  const json j = load_json(path);
  const fs::path base = path.parent_path();
  EvalSetup setup;
  json snapshot;
  try {
    auto& cfg = setup.config;
    cfg.folds = j.value("folds", cfg.folds);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.repetitions = j.value("repetitions", cfg.repetitions);
    if (cfg.repetitions < 1) throw InvalidInput("repetitions must be at least 1");
    if (j.contains("orders")) cfg.orders = j.at("orders").get<std::vector<int>>();
    if (j.contains("settings")) {
      cfg.settings.clear();
      for (const auto& s : j.at("settings")) cfg.settings.push_back(parse_setting(s.get<std::string>()));
    }
    cfg.predictor = predictor_from_json(j.value("svr", json()));
    cfg.oracle_predictor = j.value("oracle_predictor", false);
    setup.output_dir = resolve(base, j.value("output_dir", std::string("eval_out")));

    const json& corpus = j.at("corpus");
    snapshot["corpus"] = corpus;
    if (corpus.contains("synthetic")) {
      const json& sj = corpus.at("synthetic");
      SyntheticCorpusSpec spec;
      spec.clips = sj.value("clips", spec.clips);
      spec.seed = sj.value("seed", spec.seed);
      spec.subjects = sj.value("subjects", spec.subjects);
      spec.protocol_noise = sj.value("protocol_noise", spec.protocol_noise);
      spec.score_noise = sj.value("score_noise", spec.score_noise);
      spec.masking_noise = sj.value("masking_noise", spec.masking_noise);
      spec.temporal_segments = sj.value("temporal_segments", spec.temporal_segments);
      if (sj.contains("resolutions")) {
        spec.resolutions.clear();
        for (const auto& r : sj.at("resolutions")) spec.resolutions.push_back(parse_resolution(r.get<std::string>()));
      }
      setup.corpus = make_synthetic_corpus(spec);
    } else {
      const auto sets = read_samples(require_existing(base, corpus.at("samples").get<std::string>(),
                                                      "sample file"));
      for (const auto& [res_text, files] : corpus.at("resolutions").items()) {
        ResolutionCorpus group;
        group.resolution = parse_resolution(res_text);
        const auto ladders = read_scores(
            require_existing(base, files.at("scores").get<std::string>(), "score file"));
        const auto masking = read_masking(
            require_existing(base, files.at("masking").get<std::string>(), "masking file"));
        for (const auto& [clip_id, ladder] : ladders) {
          ClipRecord rec;
          rec.clip_id = clip_id;
          rec.ladder = ladder;
          const auto m = masking.find(clip_id);
          if (m == masking.end()) {
            throw PipelineError(res_text + " clip '" + clip_id + "' has no masking statistics");
          }
          rec.masking = m->second;
          for (const auto& set : sets) {
            if (set.clip_id != clip_id || set.resolution != group.resolution) continue;
            if (rec.orders.size() < static_cast<std::size_t>(set.jnd_order)) {
              rec.orders.resize(static_cast<std::size_t>(set.jnd_order));
            }
            rec.orders[static_cast<std::size_t>(set.jnd_order - 1)] = set;
          }
          group.clips.push_back(std::move(rec));
        }
        setup.corpus.groups.push_back(std::move(group));
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string(), 0, e.what());
  } catch (const InvalidInput& e) {
    throw FormatError(path.string(), 0, e.what());
  }
  setup.snapshot = snapshot.dump();
  return setup;
}

TrainSetup load_train_setup(const fs::path& path) {
  const json j = load_json(path);
  const fs::path base = path.parent_path();
  TrainSetup t;
  try {
    t.features = require_existing(base, j.at("features").get<std::string>(), "feature file");
    t.models = require_existing(base, j.at("models").get<std::string>(), "model table");
    t.resolution = parse_resolution(j.at("resolution").get<std::string>());
    t.jnd_order = j.value("jnd_order", 1);
    t.params = predictor_from_json(j.value("svr", json()));
    t.params.seed = j.value("seed", t.params.seed);
    t.output = resolve(base, j.value("output", std::string("predictor.json")));
  } catch (const json::exception& e) {
    throw FormatError(path.string(), 0, e.what());
  } catch (const InvalidInput& e) {
    throw FormatError(path.string(), 0, e.what());
  }
  return t;
}

PredictSetup load_predict_setup(const fs::path& path) {
  const json j = load_json(path);
  const fs::path base = path.parent_path();
  PredictSetup p;
  try {
    p.model = require_existing(base, j.at("model").get<std::string>(), "predictor file");
    p.features = require_existing(base, j.at("features").get<std::string>(), "feature file");
    if (j.contains("anchor_qp")) p.anchor_qp = j.at("anchor_qp").get<int>();
  } catch (const json::exception& e) {
    throw FormatError(path.string(), 0, e.what());
  }
  return p;
}

std::string describe_eval(const EvalSetup& setup) {
  json j = json::parse(setup.snapshot);
  const auto& cfg = setup.config;
  j["folds"] = cfg.folds;
  j["seed"] = cfg.seed;
  j["repetitions"] = cfg.repetitions;
  j["orders"] = cfg.orders;
  std::vector<std::string> settings;
  for (Setting s : cfg.settings) settings.emplace_back(to_string(s));
  j["settings"] = settings;
  j["svr"] = predictor_to_json(cfg.predictor);
  j["oracle_predictor"] = cfg.oracle_predictor;
  return j.dump(1) + "\n";
}

// --- reports ------------------------------------------------------------------

void add_report_files(OutputSet& out, const fs::path& dir, const EvalReport& report,
                      const std::string& snapshot) {
  std::string summary =
      "resolution,jnd_order,setting,clips,qp_range,mean_delta_sur,mean_delta_qp,"
      "mean_model_vs_empirical\n";
  std::string records =
      "resolution,jnd_order,setting,clip_id,repetition,fold,anchor_qp,qp_lo,qp_hi,truth_mu,"
      "truth_sigma,pred_mu,pred_sigma,truth_jnd,pred_jnd,delta_sur,delta_qp,model_vs_empirical\n";
  std::string curves = "resolution,jnd_order,setting,clip_id,qp,truth_sur,pred_sur\n";
  std::string scatter = "resolution,jnd_order,setting,clip_id,truth_jnd,pred_jnd\n";
  std::string histogram = "resolution,jnd_order,setting,bin_lo,bin_hi,count\n";

  constexpr int kBins = 20;
  constexpr double kBinWidth = 0.01;
  for (const auto& cell : report.cells) {
    const std::string key = std::string(to_string(cell.resolution)) + ',' +
                            std::to_string(cell.jnd_order) + ',' +
                            std::string(to_string(cell.setting));
    std::string range_rule;
    if (cell.jnd_order == 1 || cell.setting == Setting::SameRef) {
      range_rule = "[1;51]";
    } else if (cell.setting == Setting::GroundTruthRef) {
      range_rule = "[Y" + std::to_string(cell.jnd_order - 1) + "+1;51]";
    } else {
      range_rule = "[Yhat" + std::to_string(cell.jnd_order - 1) + "+1;51]";
    }
    const std::size_t clips = cell.clips.size() / static_cast<std::size_t>(report.repetitions);
    summary += key + ',' + std::to_string(clips) + ',' + range_rule + ',' +
               format_double(cell.mean_delta_sur) + ',' + format_double(cell.mean_delta_qp) + ',' +
               format_double(cell.mean_model_vs_empirical) + '\n';

    std::vector<int> bins(kBins + 1, 0);
    for (const auto& r : cell.clips) {
      records += key + ',' + r.clip_id + ',' + std::to_string(r.repetition) + ',' +
                 std::to_string(r.fold) + ',' +
                 std::to_string(r.anchor_qp) + ',' + std::to_string(r.qp_lo) + ",51," +
                 format_double(r.truth_mu) + ',' + format_double(r.truth_sigma) + ',' +
                 format_double(r.pred_mu) + ',' + format_double(r.pred_sigma) + ',' +
                 std::to_string(r.truth_jnd) + ',' + std::to_string(r.pred_jnd) + ',' +
                 format_double(r.delta_sur) + ',' + format_double(r.delta_qp) + ',' +
                 format_double(r.model_vs_empirical) + '\n';
      scatter += key + ',' + r.clip_id + ',' + std::to_string(r.truth_jnd) + ',' +
                 std::to_string(r.pred_jnd) + '\n';
      const SurModel truth{r.truth_mu, r.truth_sigma, r.anchor_qp};
      const SurModel pred{r.pred_mu, r.pred_sigma, r.anchor_qp};
      for (int q = r.qp_lo; q <= kMaxQp; ++q) {
        curves += key + ',' + r.clip_id + ',' + std::to_string(q) + ',' +
                  format_double(sur(truth, q)) + ',' + format_double(sur(pred, q)) + '\n';
      }
      const int bin = std::min(kBins, static_cast<int>(r.delta_sur / kBinWidth));
      ++bins[static_cast<std::size_t>(bin)];
    }
    for (int b = 0; b <= kBins; ++b) {
      histogram += key + ',' + format_double(b * kBinWidth) + ',' +
                   (b == kBins ? std::string("inf") : format_double((b + 1) * kBinWidth)) + ',' +
                   std::to_string(bins[static_cast<std::size_t>(b)]) + '\n';
    }
  }

  std::string folds = "resolution,repetition,clip_id,fold\n";
  for (const auto& f : report.folds) {
    for (std::size_t i = 0; i < f.clip_ids.size(); ++i) {
      folds += std::string(to_string(f.resolution)) + ',' + std::to_string(f.repetition) + ',' +
               f.clip_ids[i] + ',' +
               std::to_string(f.folds[i]) + '\n';
    }
  }
  std::string skipped;
  for (const auto& s : report.skipped) skipped += s + '\n';

  out.add(dir / "summary.csv", std::move(summary));
  out.add(dir / "records.csv", std::move(records));
  out.add(dir / "curves.csv", std::move(curves));
  out.add(dir / "scatter.csv", std::move(scatter));
  out.add(dir / "delta_sur_histogram.csv", std::move(histogram));
  out.add(dir / "folds.csv", std::move(folds));
  out.add(dir / "skipped.txt", std::move(skipped));
  out.add(dir / "config.json", snapshot);
}

}  // namespace jndsur::io
