#include "seadsc/pipeline.hpp"

#include <cstdint>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "seadsc/error.hpp"
#include "test_support.hpp"

using namespace seadsc;
namespace ts = test_support;

namespace {

constexpr Label C = Label::changed;
constexpr Label N = Label::not_changed;

/// Small but fully wired configuration: 2x2 maps, single-cell grid,
/// 4-frame windows.
PipelineConfig tiny_config() {
  PipelineConfig cfg;
  cfg.encoder = EncoderConfig{2, 2};
  cfg.similarity.grid_rows = 1;
  cfg.similarity.grid_cols = 1;
  cfg.similarity.n_top = 5;
  cfg.similarity.delta_sim = 1;
  cfg.window.window_len = 4;
  cfg.window.stride = 4;
  cfg.window.skip = 1;
  cfg.window.fps = 2.0;
  return cfg;
}

/// 16 frames: the first 8 share one map (self-similar windows), the last 8
/// use pairwise disjoint codes (zero-similarity windows).
std::vector<CodeIndexMap> static_then_changing() {
  std::vector<CodeIndexMap> maps;
  for (int i = 0; i < 8; ++i) maps.push_back(ts::constant_map(2, 2, 7));
  for (int i = 8; i < 16; ++i) {
    maps.push_back(ts::constant_map(2, 2, static_cast<std::uint32_t>(100 + i)));
  }
  return maps;
}

MapAccessor accessor_over(const std::vector<CodeIndexMap>& maps) {
  return [&maps](int i) -> const CodeIndexMap* {
    if (i < 0 || i >= static_cast<int>(maps.size())) return nullptr;
    return &maps[static_cast<std::size_t>(i)];
  };
}

void check_configs_equal(const PipelineConfig& a, const PipelineConfig& b) {
  CHECK(a.encoder.patch_height == b.encoder.patch_height);
  CHECK(a.encoder.patch_width == b.encoder.patch_width);
  CHECK(a.loss.beta == b.loss.beta);
  CHECK(a.similarity.grid_rows == b.similarity.grid_rows);
  CHECK(a.similarity.grid_cols == b.similarity.grid_cols);
  CHECK(a.similarity.n_top == b.similarity.n_top);
  CHECK(a.similarity.delta_sim == b.similarity.delta_sim);
  CHECK(a.window.window_len == b.window.window_len);
  CHECK(a.window.stride == b.window.stride);
  CHECK(a.window.skip == b.window.skip);
  CHECK(a.window.fps == b.window.fps);
  CHECK(a.detector.k == b.detector.k);
  CHECK(a.detector.seed == b.detector.seed);
  CHECK(a.detector.max_iters == b.detector.max_iters);
  CHECK(a.detector.rel_tol == b.detector.rel_tol);
  CHECK(a.detector.standardize == b.detector.standardize);
  CHECK(a.paths.frames == b.paths.frames);
  CHECK(a.paths.codebook == b.paths.codebook);
  CHECK(a.paths.maps == b.paths.maps);
  CHECK(a.paths.output == b.paths.output);
  CHECK(a.seed == b.seed);
}

Prediction make_prediction(const DetectionResult& result, const PipelineConfig& cfg) {
  Prediction pred;
  pred.config = cfg;
  pred.result = result;
  pred.version = "0.1.0";
  pred.timestamp = "2026-01-01T00:00:00Z";
  pred.degenerate_clusters = result.clustering.degenerate;
  return pred;
}

}  // namespace

TEST_CASE("config JSON round trips every field") {
  PipelineConfig cfg;
  cfg.encoder = EncoderConfig{3, 5};
  cfg.loss.beta = 0.5;
  cfg.similarity.grid_rows = 4;
  cfg.similarity.n_top = 7;
  cfg.similarity.delta_sim = 3;
  cfg.window.window_len = 60;
  cfg.window.stride = 30;
  cfg.window.skip = 3;
  cfg.window.fps = 25.0;
  cfg.detector.seed = 99;
  cfg.detector.standardize = true;
  cfg.paths.frames = "/data/frames";
  cfg.paths.output = "pred.json";
  cfg.seed = 1234;

  const std::string json_text = config_to_json(cfg);
  const PipelineConfig loaded = config_from_json(json_text);
  check_configs_equal(cfg, loaded);

  // Serialization is deterministic (key-sorted objects).
  CHECK(config_to_json(cfg) == json_text);
  CHECK(config_to_json(loaded) == json_text);
}

TEST_CASE("config_from_json rejects malformed documents") {
  CHECK_THROWS_AS(config_from_json("not json at all {"), FormatError);
  CHECK_THROWS_AS(config_from_json("[1, 2, 3]"), ConfigError);

  const std::string base = config_to_json(PipelineConfig{});

  nlohmann::json missing = nlohmann::json::parse(base);
  missing.erase("seed");
  CHECK_THROWS_WITH_AS(config_from_json(missing.dump()), doctest::Contains("seed"), ConfigError);

  nlohmann::json extra = nlohmann::json::parse(base);
  extra["surprise"] = 1;
  CHECK_THROWS_WITH_AS(config_from_json(extra.dump()), doctest::Contains("surprise"), ConfigError);

  nlohmann::json nested = nlohmann::json::parse(base);
  nested["window"].erase("fps");
  CHECK_THROWS_WITH_AS(config_from_json(nested.dump()), doctest::Contains("fps"), ConfigError);

  nlohmann::json wrong_type = nlohmann::json::parse(base);
  wrong_type["window"]["window_len"] = "one hundred twenty";
  CHECK_THROWS_AS(config_from_json(wrong_type.dump()), ConfigError);
}

TEST_CASE("validate_config delegates to every module") {
  CHECK_NOTHROW(validate_config(PipelineConfig{}));

  PipelineConfig cfg;
  cfg.encoder.patch_height = 0;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  cfg = PipelineConfig{};
  cfg.loss.beta = -0.5;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  cfg = PipelineConfig{};
  cfg.similarity.delta_sim = 99;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  cfg = PipelineConfig{};
  cfg.window.window_len = 121;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);

  cfg = PipelineConfig{};
  cfg.detector.k = 1;
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("run_detection separates static from changing windows") {
  const auto maps = static_then_changing();
  const PipelineConfig cfg = tiny_config();
  const DetectionResult result = run_detection(accessor_over(maps), 16, cfg);

  CHECK(result.n_frames == 16);
  REQUIRE(result.scores.size() == 4u);
  REQUIRE(result.windows.size() == 4u);
  REQUIRE(result.frame_labels.size() == 16u);

  // Windows over the static half score 1.0, over the changing half 0.0.
  CHECK(result.scores[0].mean == 1.0);
  CHECK(result.scores[1].mean == 1.0);
  CHECK(result.scores[2].mean == 0.0);
  CHECK(result.scores[3].mean == 0.0);
  for (const WindowScore& s : result.scores) CHECK(s.std_dev == 0.0);

  // Scores are ordered by window start.
  for (std::size_t i = 1; i < result.scores.size(); ++i) {
    CHECK(result.scores[i].start > result.scores[i - 1].start);
  }

  CHECK_FALSE(result.clustering.degenerate);
  CHECK(result.windows[0].label == N);
  CHECK(result.windows[1].label == N);
  CHECK(result.windows[2].label == C);
  CHECK(result.windows[3].label == C);

  for (int f = 0; f < 8; ++f) CHECK(result.frame_labels[static_cast<std::size_t>(f)] == N);
  for (int f = 8; f < 16; ++f) CHECK(result.frame_labels[static_cast<std::size_t>(f)] == C);
}

TEST_CASE("run_detection is deterministic") {
  const auto maps = static_then_changing();
  const PipelineConfig cfg = tiny_config();
  const DetectionResult a = run_detection(accessor_over(maps), 16, cfg);
  const DetectionResult b = run_detection(accessor_over(maps), 16, cfg);
  CHECK(a.clustering.centroids == b.clustering.centroids);
  CHECK(a.clustering.assignments == b.clustering.assignments);
  CHECK(a.frame_labels == b.frame_labels);
}

TEST_CASE("run_detection demands at least one complete window") {
  const auto maps = static_then_changing();
  CHECK_THROWS_WITH_AS(run_detection(accessor_over(maps), 3, tiny_config()),
                       doctest::Contains("no complete windows"), DataError);
}

TEST_CASE("rle round trips arbitrary label sequences") {
  std::mt19937_64 rng(131);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = static_cast<int>(rng() % 40);
    std::vector<Label> labels;
    for (int i = 0; i < n; ++i) labels.push_back(rng() % 2 ? C : N);
    const auto segments = rle_encode(labels);
    REQUIRE(rle_decode(segments) == labels);
    // Adjacent segments always alternate labels.
    for (std::size_t i = 1; i < segments.size(); ++i) {
      REQUIRE(segments[i].label != segments[i - 1].label);
      REQUIRE(segments[i].start == segments[i - 1].end);
    }
  }
}

TEST_CASE("rle_encode compresses runs") {
  const auto segments = rle_encode({C, C, N, N, N, C});
  REQUIRE(segments.size() == 3u);
  CHECK(segments[0].start == 0);
  CHECK(segments[0].end == 2);
  CHECK(segments[0].label == C);
  CHECK(segments[1].start == 2);
  CHECK(segments[1].end == 5);
  CHECK(segments[1].label == N);
  CHECK(segments[2].start == 5);
  CHECK(segments[2].end == 6);
  CHECK(segments[2].label == C);

  CHECK(rle_encode({}).empty());
  CHECK(rle_encode({N}).size() == 1u);
}

TEST_CASE("rle_decode rejects non-tiling segments") {
  CHECK(rle_decode({}).empty());
  CHECK_THROWS_AS(rle_decode({LabelSegment{1, 3, C}}), DataError);
  CHECK_THROWS_AS(rle_decode({LabelSegment{0, 3, C}, LabelSegment{4, 6, N}}), DataError);
  CHECK_THROWS_AS(rle_decode({LabelSegment{0, 3, C}, LabelSegment{2, 6, N}}), DataError);
  CHECK_THROWS_AS(rle_decode({LabelSegment{0, 0, C}}), DataError);
}

TEST_CASE("prediction JSON carries windows, labels and clustering") {
  const auto maps = static_then_changing();
  const PipelineConfig cfg = tiny_config();
  const Prediction pred = make_prediction(run_detection(accessor_over(maps), 16, cfg), cfg);

  const nlohmann::json doc = nlohmann::json::parse(prediction_to_json(pred));
  CHECK(doc.at("n_frames") == 16);
  CHECK(doc.at("version") == "0.1.0");
  CHECK(doc.at("seed") == 42);
  CHECK(doc.at("timestamp") == "2026-01-01T00:00:00Z");
  CHECK(doc.at("degenerate_clusters") == false);

  REQUIRE(doc.at("windows").size() == 4u);
  CHECK(doc.at("windows")[0].at("start") == 0);
  CHECK(doc.at("windows")[0].at("end") == 4);
  CHECK(doc.at("windows")[0].at("mean") == 1.0);
  CHECK(doc.at("windows")[0].at("std") == 0.0);
  CHECK(doc.at("windows")[0].at("label") == "not_changed");
  CHECK(doc.at("windows")[3].at("label") == "changed");

  REQUIRE(doc.at("frame_labels_rle").size() == 2u);
  CHECK(doc.at("frame_labels_rle")[0].at("start") == 0);
  CHECK(doc.at("frame_labels_rle")[0].at("end") == 8);
  CHECK(doc.at("frame_labels_rle")[0].at("label") == "not_changed");
  CHECK(doc.at("frame_labels_rle")[1].at("end") == 16);

  CHECK(doc.at("clustering").at("degenerate") == false);
  REQUIRE(doc.at("clustering").at("centroids").size() == 2u);

  // The config echo parses back to the exact configuration.
  check_configs_equal(cfg, config_from_json(doc.at("config").dump()));
}

TEST_CASE("prediction JSON is deterministic up to the timestamp") {
  const auto maps = static_then_changing();
  const PipelineConfig cfg = tiny_config();
  const DetectionResult result = run_detection(accessor_over(maps), 16, cfg);

  Prediction a = make_prediction(result, cfg);
  Prediction b = make_prediction(result, cfg);
  CHECK(prediction_to_json(a) == prediction_to_json(b));

  b.timestamp = "2026-02-02T00:00:00Z";
  nlohmann::json da = nlohmann::json::parse(prediction_to_json(a));
  nlohmann::json db = nlohmann::json::parse(prediction_to_json(b));
  CHECK(da != db);
  da.erase("timestamp");
  db.erase("timestamp");
  CHECK(da == db);
}

TEST_CASE("prediction_to_json rejects inconsistent window tables") {
  const auto maps = static_then_changing();
  const PipelineConfig cfg = tiny_config();
  Prediction pred = make_prediction(run_detection(accessor_over(maps), 16, cfg), cfg);
  pred.result.windows.pop_back();
  CHECK_THROWS_AS(prediction_to_json(pred), ShapeError);
}

TEST_CASE("predictions round trip through disk") {
  const ts::TempDir dir("pred");
  const auto maps = static_then_changing();
  const PipelineConfig cfg = tiny_config();
  const DetectionResult result = run_detection(accessor_over(maps), 16, cfg);
  const Prediction pred = make_prediction(result, cfg);

  const auto path = dir / "pred.json";
  write_prediction(path, pred);
  CHECK_FALSE(std::filesystem::exists(dir / "pred.json.tmp"));

  const LoadedPrediction loaded = read_prediction(path);
  CHECK(loaded.n_frames == 16);
  CHECK(loaded.version == "0.1.0");
  CHECK(loaded.frame_labels == result.frame_labels);
  check_configs_equal(cfg, loaded.config);

  REQUIRE(loaded.windows.size() == result.windows.size());
  REQUIRE(loaded.scores.size() == result.scores.size());
  for (std::size_t i = 0; i < loaded.windows.size(); ++i) {
    CHECK(loaded.windows[i].span == result.windows[i].span);
    CHECK(loaded.windows[i].label == result.windows[i].label);
    CHECK(loaded.windows[i].cluster_id == result.windows[i].cluster_id);
    CHECK(loaded.scores[i].mean == result.scores[i].mean);
    CHECK(loaded.scores[i].std_dev == result.scores[i].std_dev);
  }
}

TEST_CASE("read_prediction reports each failure mode") {
  const ts::TempDir dir("pred");
  CHECK_THROWS_AS(read_prediction(dir / "absent.json"), DataError);

  const auto garbled = dir / "garbled.json";
  std::ofstream(garbled) << "{ not json";
  CHECK_THROWS_AS(read_prediction(garbled), FormatError);

  // A syntactically valid document with a wrong frame total is corrupt.
  const auto maps = static_then_changing();
  const PipelineConfig cfg = tiny_config();
  const Prediction pred = make_prediction(run_detection(accessor_over(maps), 16, cfg), cfg);
  nlohmann::json doc = nlohmann::json::parse(prediction_to_json(pred));
  doc["n_frames"] = 99;
  const auto tampered = dir / "tampered.json";
  std::ofstream(tampered) << doc.dump(2);
  CHECK_THROWS_AS(read_prediction(tampered), CorruptionError);

  doc["n_frames"] = 16;
  doc.erase("windows");
  const auto missing = dir / "missing.json";
  std::ofstream(missing) << doc.dump(2);
  CHECK_THROWS_AS(read_prediction(missing), FormatError);
}

TEST_CASE("write_plot_csv renders one row per window") {
  const ts::TempDir dir("plot");
  std::vector<WindowScore> scores;
  scores.push_back(WindowScore{0, 4, 1.0, 0.0});
  scores.push_back(WindowScore{4, 8, 0.25, 0.125});
  std::vector<WindowLabel> windows;
  windows.push_back(WindowLabel{WindowSpan{0, 4}, N, 0, 0.0});
  windows.push_back(WindowLabel{WindowSpan{4, 8}, C, 1, 0.0});

  const auto path = dir / "plot.csv";
  write_plot_csv(path, scores, windows);

  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == "window_start,mean,std,label\n0,1,0,not_changed\n4,0.25,0.125,changed\n");

  windows.pop_back();
  CHECK_THROWS_AS(write_plot_csv(path, scores, windows), ShapeError);
}
