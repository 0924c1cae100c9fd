#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "seadsc/quantizer.hpp"
#include "seadsc/similarity.hpp"

namespace seadsc {

/// Sliding-window parameters. A window covers window_len consecutive frames;
/// consecutive windows start stride frames apart; within a window only every
/// skip-th frame is retained and paired with the frame half a window later.
struct WindowConfig {
  int window_len = 120;  // l, must be even and >= 2
  int stride = 120;      // 1 <= stride <= window_len
  int skip = 4;          // s, 1 <= skip <= window_len/2, (window_len/2) % skip == 0
  double fps = 12.0;     // frames per second, for seconds <-> frames conversion
};

/// Throws ConfigError when a WindowConfig invariant fails.
void validate_config(const WindowConfig& cfg);

/// Rounds seconds * fps to the nearest frame count.
int window_len_from_seconds(double seconds, double fps);

struct WindowSpan {
  int start = 0;
  int end = 0;  // exclusive

  bool operator==(const WindowSpan&) const = default;
};

/// Per-window aggregate of pair similarity scores.
struct WindowScore {
  int start = 0;
  int end = 0;
  double mean = 0.0;     // in [0, 1]
  double std_dev = 0.0;  // population std, in [0, 0.5]
};

/// Spans [k*stride, k*stride + window_len) that fit inside n_frames.
/// Trailing partial windows are dropped.
std::vector<WindowSpan> enumerate_windows(int n_frames, const WindowConfig& cfg);

/// Frame-index pairs (start + j*skip, start + j*skip + window_len/2) for
/// j = 0 .. window_len/(2*skip) - 1.
std::vector<std::pair<int, int>> window_pairs(const WindowSpan& span, const WindowConfig& cfg);

/// Lookup of a frame's code map; returns nullptr when the map is missing.
using MapAccessor = std::function<const CodeIndexMap*(int frame_index)>;

/// Scores every pair of the window and aggregates into (mean, population std).
/// Throws DataError naming the frame index when a map is missing.
WindowScore score_window(const MapAccessor& maps, const WindowSpan& span,
                         const WindowConfig& cfg, const SimilarityParams& params);

}  // namespace seadsc
