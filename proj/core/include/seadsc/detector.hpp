#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "seadsc/label.hpp"
#include "seadsc/windowing.hpp"

namespace seadsc {

/// Configuration of the k=2 clustering stage.
struct DetectorConfig {
  int k = 2;  // fixed at 2
  std::uint64_t seed = 42;
  int max_iters = 100;
  double rel_tol = 1e-6;
  bool standardize = false;  // z-score the (mean, std) axes before clustering
};

/// Throws ConfigError when a DetectorConfig invariant fails.
void validate_config(const DetectorConfig& cfg);

using Point2 = std::array<double, 2>;

struct KMeansResult {
  std::array<Point2, 2> centroids;  // in the original (unstandardized) space
  std::vector<int> assignments;     // cluster id per input point
  std::vector<double> inertia_trace;
  bool degenerate = false;  // both centroids coincide (all points identical)
};

/// Lloyd iteration from k-means++ seeding on (mean, std) points. Stops on an
/// assignment fixpoint, a relative inertia change below rel_tol, or max_iters
/// centroid updates. Deterministic given (points, seed). Throws DataError on
/// fewer than 2 points.
KMeansResult kmeans_fit(const std::vector<Point2>& points, const DetectorConfig& cfg);

/// The cluster whose centroid has the higher mean-similarity coordinate is
/// not_changed; a tie on mean is broken by the lower std. Returns the label
/// per cluster id.
std::array<Label, 2> name_clusters(const std::array<Point2, 2>& centroids);

struct WindowLabel {
  WindowSpan span;
  Label label = Label::changed;
  int cluster_id = 0;
  double distance_to_centroid = 0.0;
};

/// Combines window scores with a clustering result into labeled windows.
std::vector<WindowLabel> label_windows(const std::vector<WindowScore>& scores,
                                       const KMeansResult& clustering);

/// Projects window labels onto frames. Each frame takes its covering window's
/// label; overlapping windows vote, ties going to changed; frames past the
/// last window inherit its label, or changed when no window exists.
std::vector<Label> frames_from_windows(const std::vector<WindowLabel>& windows, int n_frames);

}  // namespace seadsc
