#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "seadsc/detector.hpp"
#include "seadsc/evaluation.hpp"
#include "seadsc/io.hpp"
#include "seadsc/quantizer.hpp"
#include "seadsc/similarity.hpp"
#include "seadsc/windowing.hpp"

namespace seadsc {

/// Every parameter of the pipeline in one place, serializable as JSON and
/// echoed verbatim into prediction files.
struct PipelineConfig {
  EncoderConfig encoder;
  LossConfig loss;
  SimilarityParams similarity;
  WindowConfig window;
  DetectorConfig detector;
  struct Paths {
    std::string frames;
    std::string codebook;
    std::string maps;
    std::string output;
  } paths;
  std::uint64_t seed = 42;
};

/// Validates every sub-config against its module's invariants.
void validate_config(const PipelineConfig& cfg);

std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const std::string& json_text);

/// Output of one detection run over a frame sequence.
struct DetectionResult {
  int n_frames = 0;
  std::vector<WindowScore> scores;     // ordered by window start
  std::vector<WindowLabel> windows;    // same order
  std::vector<Label> frame_labels;     // length n_frames
  KMeansResult clustering;
};

/// Scores every window, clusters the (mean, std) table, and projects labels
/// to frames. Throws DataError when no complete window fits.
DetectionResult run_detection(const MapAccessor& maps, int n_frames, const PipelineConfig& cfg);

/// One run-length-encoded stretch of identical frame labels.
struct LabelSegment {
  int start = 0;
  int end = 0;  // exclusive
  Label label = Label::changed;
};

std::vector<LabelSegment> rle_encode(const std::vector<Label>& labels);
std::vector<Label> rle_decode(const std::vector<LabelSegment>& segments);

/// A prediction document: config echo, windows, RLE frame labels, provenance.
struct Prediction {
  PipelineConfig config;
  DetectionResult result;
  std::string version;
  std::string timestamp;  // ISO-8601 UTC; the only field excluded from
                          // determinism comparisons
  bool degenerate_clusters = false;
};

std::string prediction_to_json(const Prediction& pred);

/// Atomic write of the prediction JSON.
void write_prediction(const std::filesystem::path& path, const Prediction& pred);

/// The subset of a prediction needed downstream (evaluation, plotting).
struct LoadedPrediction {
  PipelineConfig config;
  int n_frames = 0;
  std::vector<Label> frame_labels;
  std::vector<WindowLabel> windows;
  std::vector<WindowScore> scores;
  std::string version;
};

LoadedPrediction read_prediction(const std::filesystem::path& path);

/// CSV of (window_start, mean, std, label) rows for external plotting.
void write_plot_csv(const std::filesystem::path& path, const std::vector<WindowScore>& scores,
                    const std::vector<WindowLabel>& windows);

}  // namespace seadsc
