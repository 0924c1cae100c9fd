#include "seadsc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "fs_util.hpp"
#include "seadsc/error.hpp"

namespace seadsc {
namespace {

using nlohmann::json;

/// Rejects missing and unexpected keys so config files cannot silently carry
/// typos.
void require_keys(const json& obj, const std::string& name, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(name + " must be a JSON object");
  std::set<std::string> expected(keys.begin(), keys.end());
  for (const auto& [key, value] : obj.items()) {
    if (!expected.count(key)) throw ConfigError(name + ": unexpected key '" + key + "'");
  }
  for (const std::string& key : expected) {
    if (!obj.contains(key)) throw ConfigError(name + ": missing key '" + key + "'");
  }
}

json config_to_json_obj(const PipelineConfig& cfg) {
  return json{
      {"encoder",
       {{"patch_height", cfg.encoder.patch_height}, {"patch_width", cfg.encoder.patch_width}}},
      {"loss", {{"beta", cfg.loss.beta}}},
      {"similarity",
       {{"grid_rows", cfg.similarity.grid_rows},
        {"grid_cols", cfg.similarity.grid_cols},
        {"n_top", cfg.similarity.n_top},
        {"delta_sim", cfg.similarity.delta_sim}}},
      {"window",
       {{"window_len", cfg.window.window_len},
        {"stride", cfg.window.stride},
        {"skip", cfg.window.skip},
        {"fps", cfg.window.fps}}},
      {"detector",
       {{"k", cfg.detector.k},
        {"seed", cfg.detector.seed},
        {"max_iters", cfg.detector.max_iters},
        {"rel_tol", cfg.detector.rel_tol},
        {"standardize", cfg.detector.standardize}}},
      {"paths",
       {{"frames", cfg.paths.frames},
        {"codebook", cfg.paths.codebook},
        {"maps", cfg.paths.maps},
        {"output", cfg.paths.output}}},
      {"seed", cfg.seed},
  };
}

PipelineConfig config_from_json_obj(const json& doc) {
  require_keys(doc, "config",
               {"encoder", "loss", "similarity", "window", "detector", "paths", "seed"});
  require_keys(doc["encoder"], "config.encoder", {"patch_height", "patch_width"});
  require_keys(doc["loss"], "config.loss", {"beta"});
  require_keys(doc["similarity"], "config.similarity",
               {"grid_rows", "grid_cols", "n_top", "delta_sim"});
  require_keys(doc["window"], "config.window", {"window_len", "stride", "skip", "fps"});
  require_keys(doc["detector"], "config.detector",
               {"k", "seed", "max_iters", "rel_tol", "standardize"});
  require_keys(doc["paths"], "config.paths", {"frames", "codebook", "maps", "output"});

  PipelineConfig cfg;
  try {
    cfg.encoder.patch_height = doc["encoder"]["patch_height"].get<int>();
    cfg.encoder.patch_width = doc["encoder"]["patch_width"].get<int>();
    cfg.loss.beta = doc["loss"]["beta"].get<double>();
    cfg.similarity.grid_rows = doc["similarity"]["grid_rows"].get<int>();
    cfg.similarity.grid_cols = doc["similarity"]["grid_cols"].get<int>();
    cfg.similarity.n_top = doc["similarity"]["n_top"].get<int>();
    cfg.similarity.delta_sim = doc["similarity"]["delta_sim"].get<int>();
    cfg.window.window_len = doc["window"]["window_len"].get<int>();
    cfg.window.stride = doc["window"]["stride"].get<int>();
    cfg.window.skip = doc["window"]["skip"].get<int>();
    cfg.window.fps = doc["window"]["fps"].get<double>();
    cfg.detector.k = doc["detector"]["k"].get<int>();
    cfg.detector.seed = doc["detector"]["seed"].get<std::uint64_t>();
    cfg.detector.max_iters = doc["detector"]["max_iters"].get<int>();
    cfg.detector.rel_tol = doc["detector"]["rel_tol"].get<double>();
    cfg.detector.standardize = doc["detector"]["standardize"].get<bool>();
    cfg.paths.frames = doc["paths"]["frames"].get<std::string>();
    cfg.paths.codebook = doc["paths"]["codebook"].get<std::string>();
    cfg.paths.maps = doc["paths"]["maps"].get<std::string>();
    cfg.paths.output = doc["paths"]["output"].get<std::string>();
    cfg.seed = doc["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

json window_to_json(const WindowScore& score, const WindowLabel& label) {
  return json{{"start", score.start},   {"end", score.end},
              {"mean", score.mean},     {"std", score.std_dev},
              {"cluster", label.cluster_id}, {"label", to_string(label.label)}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

void validate_config(const PipelineConfig& cfg) {
  if (cfg.encoder.patch_height < 1 || cfg.encoder.patch_width < 1) {
    throw ConfigError("patch dims must be >= 1");
  }
  if (!(cfg.loss.beta >= 0.0) || !std::isfinite(cfg.loss.beta)) {
    throw ConfigError("beta must be finite and >= 0");
  }
  validate_params(cfg.similarity);
  validate_config(cfg.window);
  validate_config(cfg.detector);
}

std::string config_to_json(const PipelineConfig& cfg) { return config_to_json_obj(cfg).dump(2); }

PipelineConfig config_from_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json_obj(doc);
}

DetectionResult run_detection(const MapAccessor& maps, int n_frames, const PipelineConfig& cfg) {
  validate_config(cfg);

  const auto spans = enumerate_windows(n_frames, cfg.window);
  if (spans.empty()) {
    throw DataError("no complete windows: " + std::to_string(n_frames) +
                    " frames but window_len is " + std::to_string(cfg.window.window_len));
  }

  DetectionResult result;
  result.n_frames = n_frames;
  result.scores.reserve(spans.size());
  for (const WindowSpan& span : spans) {
    result.scores.push_back(score_window(maps, span, cfg.window, cfg.similarity));
  }

  std::vector<Point2> points;
  points.reserve(result.scores.size());
  for (const WindowScore& s : result.scores) points.push_back(Point2{s.mean, s.std_dev});

  result.clustering = kmeans_fit(points, cfg.detector);
  result.windows = label_windows(result.scores, result.clustering);
  result.frame_labels = frames_from_windows(result.windows, n_frames);
  return result;
}

std::vector<LabelSegment> rle_encode(const std::vector<Label>& labels) {
  std::vector<LabelSegment> segments;
  int start = 0;
  for (int i = 1; i <= static_cast<int>(labels.size()); ++i) {
    if (i == static_cast<int>(labels.size()) ||
        labels[static_cast<std::size_t>(i)] != labels[static_cast<std::size_t>(start)]) {
      segments.push_back(LabelSegment{start, i, labels[static_cast<std::size_t>(start)]});
      start = i;
    }
  }
  return segments;
}

std::vector<Label> rle_decode(const std::vector<LabelSegment>& segments) {
  std::vector<Label> labels;
  int expected = 0;
  for (const LabelSegment& seg : segments) {
    if (seg.start != expected || seg.end <= seg.start) {
      throw DataError("label segments must tile [0, n): expected start " +
                      std::to_string(expected) + ", got [" + std::to_string(seg.start) + ", " +
                      std::to_string(seg.end) + ")");
    }
    labels.insert(labels.end(), static_cast<std::size_t>(seg.end - seg.start), seg.label);
    expected = seg.end;
  }
  return labels;
}

std::string prediction_to_json(const Prediction& pred) {
  if (pred.result.scores.size() != pred.result.windows.size()) {
    throw ShapeError("prediction has " + std::to_string(pred.result.scores.size()) +
                     " scores but " + std::to_string(pred.result.windows.size()) + " windows");
  }
  json windows = json::array();
  for (std::size_t i = 0; i < pred.result.windows.size(); ++i) {
    windows.push_back(window_to_json(pred.result.scores[i], pred.result.windows[i]));
  }

  json rle = json::array();
  for (const LabelSegment& seg : rle_encode(pred.result.frame_labels)) {
    rle.push_back(json{{"start", seg.start}, {"end", seg.end}, {"label", to_string(seg.label)}});
  }

  const auto& c = pred.result.clustering.centroids;
  json doc{
      {"config", config_to_json_obj(pred.config)},
      {"n_frames", pred.result.n_frames},
      {"windows", windows},
      {"frame_labels_rle", rle},
      {"clustering",
       {{"centroids", json::array({json::array({c[0][0], c[0][1]}), json::array({c[1][0], c[1][1]})})},
        {"degenerate", pred.result.clustering.degenerate}}},
      {"degenerate_clusters", pred.degenerate_clusters},
      {"version", pred.version},
      {"seed", pred.config.seed},
      {"timestamp", pred.timestamp},
  };
  return doc.dump(2);
}

void write_prediction(const std::filesystem::path& path, const Prediction& pred) {
  detail::atomic_write(path, prediction_to_json(pred) + "\n");
}

LoadedPrediction read_prediction(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open prediction file " + path.string());

  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + " is not valid JSON: " + e.what());
  }

  LoadedPrediction out;
  try {
    out.config = config_from_json_obj(doc.at("config"));
    out.n_frames = doc.at("n_frames").get<int>();
    out.version = doc.at("version").get<std::string>();

    std::vector<LabelSegment> segments;
    for (const json& seg : doc.at("frame_labels_rle")) {
      segments.push_back(LabelSegment{seg.at("start").get<int>(), seg.at("end").get<int>(),
                                      label_from_string(seg.at("label").get<std::string>())});
    }
    out.frame_labels = rle_decode(segments);

    for (const json& w : doc.at("windows")) {
      const WindowSpan span{w.at("start").get<int>(), w.at("end").get<int>()};
      out.scores.push_back(
          WindowScore{span.start, span.end, w.at("mean").get<double>(), w.at("std").get<double>()});
      out.windows.push_back(WindowLabel{span, label_from_string(w.at("label").get<std::string>()),
                                        w.at("cluster").get<int>(), 0.0});
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }

  if (static_cast<int>(out.frame_labels.size()) != out.n_frames) {
    throw CorruptionError(path.string() + ": label segments cover " +
                          std::to_string(out.frame_labels.size()) + " frames but n_frames is " +
                          std::to_string(out.n_frames));
  }
  return out;
}

void write_plot_csv(const std::filesystem::path& path, const std::vector<WindowScore>& scores,
                    const std::vector<WindowLabel>& windows) {
  if (scores.size() != windows.size()) {
    throw ShapeError("got " + std::to_string(scores.size()) + " scores but " +
                     std::to_string(windows.size()) + " window labels");
  }
  std::string buf = "window_start,mean,std,label\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    buf += std::to_string(scores[i].start) + "," + format_double(scores[i].mean) + "," +
           format_double(scores[i].std_dev) + ",";
    buf += to_string(windows[i].label);
    buf += "\n";
  }
  detail::atomic_write(path, buf);
}

}  // namespace seadsc
