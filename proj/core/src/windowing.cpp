#include "seadsc/windowing.hpp"

#include <cmath>
#include <string>

#include "seadsc/error.hpp"

namespace seadsc {

void validate_config(const WindowConfig& cfg) {
  if (cfg.window_len < 2 || cfg.window_len % 2 != 0) {
    throw ConfigError("window_len must be even and >= 2, got " + std::to_string(cfg.window_len));
  }
  if (cfg.stride < 1 || cfg.stride > cfg.window_len) {
    throw ConfigError("stride must be in [1, window_len], got " + std::to_string(cfg.stride));
  }
  const int half = cfg.window_len / 2;
  if (cfg.skip < 1 || cfg.skip > half) {
    throw ConfigError("skip must be in [1, window_len/2], got " + std::to_string(cfg.skip));
  }
  if (half % cfg.skip != 0) {
    throw ConfigError("window_len/2 (" + std::to_string(half) + ") not divisible by skip " +
                      std::to_string(cfg.skip));
  }
  if (!(cfg.fps > 0.0) || !std::isfinite(cfg.fps)) {
    throw ConfigError("fps must be positive and finite");
  }
}

int window_len_from_seconds(double seconds, double fps) {
  if (!(seconds > 0.0) || !std::isfinite(seconds)) {
    throw ConfigError("window seconds must be positive and finite");
  }
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw ConfigError("fps must be positive and finite");
  }
  const long frames = std::lround(seconds * fps);
  if (frames < 1) throw ConfigError("window shorter than one frame");
  return static_cast<int>(frames);
}

std::vector<WindowSpan> enumerate_windows(int n_frames, const WindowConfig& cfg) {
  validate_config(cfg);
  if (n_frames < 0) throw ConfigError("n_frames must be >= 0");

  std::vector<WindowSpan> spans;
  for (int start = 0; start + cfg.window_len <= n_frames; start += cfg.stride) {
    spans.push_back(WindowSpan{start, start + cfg.window_len});
  }
  return spans;
}

std::vector<std::pair<int, int>> window_pairs(const WindowSpan& span, const WindowConfig& cfg) {
  validate_config(cfg);
  if (span.end - span.start != cfg.window_len) {
    throw ConfigError("span length " + std::to_string(span.end - span.start) +
                      " does not match window_len " + std::to_string(cfg.window_len));
  }
  const int half = cfg.window_len / 2;
  const int n_pairs = half / cfg.skip;

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(n_pairs));
  for (int j = 0; j < n_pairs; ++j) {
    const int lead = span.start + j * cfg.skip;
    pairs.emplace_back(lead, lead + half);
  }
  return pairs;
}

WindowScore score_window(const MapAccessor& maps, const WindowSpan& span, const WindowConfig& cfg,
                         const SimilarityParams& params) {
  const auto pairs = window_pairs(span, cfg);

  std::vector<double> scores;
  scores.reserve(pairs.size());
  for (const auto& [lead, lag] : pairs) {
    const CodeIndexMap* map_lead = maps(lead);
    if (map_lead == nullptr) throw DataError("missing code map for frame " + std::to_string(lead));
    const CodeIndexMap* map_lag = maps(lag);
    if (map_lag == nullptr) throw DataError("missing code map for frame " + std::to_string(lag));
    scores.push_back(map_similarity(*map_lead, *map_lag, params));
  }

  const double n = static_cast<double>(scores.size());
  double sum = 0.0;
  for (double s : scores) sum += s;
  const double mean = sum / n;

  double sq_sum = 0.0;
  for (double s : scores) sq_sum += (s - mean) * (s - mean);
  const double std_dev = std::sqrt(sq_sum / n);

  return WindowScore{span.start, span.end, mean, std_dev};
}

}  // namespace seadsc
