#include "seadsc/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <span>
#include <string>

#include "lloyd.hpp"
#include "rng.hpp"
#include "seadsc/error.hpp"

namespace seadsc {
namespace {

/// k-means++ seeding: first centroid uniform, each further one drawn with
/// probability proportional to its squared distance to the nearest chosen
/// centroid.
std::vector<double> seed_centroids(const std::vector<Point2>& points, int k,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = points.size();

  std::vector<double> centroids;
  centroids.reserve(static_cast<std::size_t>(k) * 2);
  const Point2& first = points[detail::uniform_index(rng, n)];
  centroids.insert(centroids.end(), first.begin(), first.end());

  std::vector<double> dist_sq(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < static_cast<std::size_t>(c); ++j) {
        const double dx = points[i][0] - centroids[j * 2];
        const double dy = points[i][1] - centroids[j * 2 + 1];
        best = std::min(best, dx * dx + dy * dy);
      }
      dist_sq[i] = best;
      total += best;
    }

    std::size_t pick = 0;
    if (total > 0.0) {
      double r = detail::uniform_open01(rng) * total;
      std::size_t last_positive = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (dist_sq[i] > 0.0) last_positive = i;
        r -= dist_sq[i];
        if (r <= 0.0 && dist_sq[i] > 0.0) {
          pick = i;
          break;
        }
        if (i + 1 == n) pick = last_positive;  // guard against rounding residue
      }
    } else {
      pick = detail::uniform_index(rng, n);  // all points coincide with a centroid
    }
    centroids.insert(centroids.end(), points[pick].begin(), points[pick].end());
  }
  return centroids;
}

}  // namespace

void validate_config(const DetectorConfig& cfg) {
  if (cfg.k != 2) throw ConfigError("cluster count is fixed at 2, got " + std::to_string(cfg.k));
  if (cfg.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(cfg.rel_tol > 0.0) || !std::isfinite(cfg.rel_tol)) {
    throw ConfigError("rel_tol must be positive and finite");
  }
}

KMeansResult kmeans_fit(const std::vector<Point2>& points, const DetectorConfig& cfg) {
  validate_config(cfg);
  if (points.size() < 2) {
    throw DataError("k-means needs at least 2 points, got " + std::to_string(points.size()));
  }

  // Optional per-axis z-scoring; a constant axis is left unscaled.
  double shift[2] = {0.0, 0.0};
  double scale[2] = {1.0, 1.0};
  if (cfg.standardize) {
    const double n = static_cast<double>(points.size());
    for (int a = 0; a < 2; ++a) {
      double sum = 0.0;
      for (const Point2& p : points) sum += p[a];
      shift[a] = sum / n;
      double sq_sum = 0.0;
      for (const Point2& p : points) sq_sum += (p[a] - shift[a]) * (p[a] - shift[a]);
      const double std_dev = std::sqrt(sq_sum / n);
      if (std_dev > 0.0) scale[a] = std_dev;
    }
  }

  std::vector<double> data(points.size() * 2);
  std::vector<Point2> space(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    space[i] = {(points[i][0] - shift[0]) / scale[0], (points[i][1] - shift[1]) / scale[1]};
    data[i * 2] = space[i][0];
    data[i * 2 + 1] = space[i][1];
  }

  detail::LloydState state;
  state.centroids = seed_centroids(space, cfg.k, cfg.seed);
  detail::LloydOptions opts{cfg.max_iters, cfg.rel_tol};
  detail::lloyd_iterate(std::span<const double>(data), 2, static_cast<std::size_t>(cfg.k), state,
                        opts);

  KMeansResult result;
  for (int c = 0; c < 2; ++c) {
    result.centroids[static_cast<std::size_t>(c)] = {
        state.centroids[static_cast<std::size_t>(c) * 2] * scale[0] + shift[0],
        state.centroids[static_cast<std::size_t>(c) * 2 + 1] * scale[1] + shift[1]};
  }
  result.assignments = std::move(state.assignments);
  result.inertia_trace = std::move(state.trace);
  result.degenerate = result.centroids[0] == result.centroids[1];
  return result;
}

std::array<Label, 2> name_clusters(const std::array<Point2, 2>& centroids) {
  int calm;  // cluster id to call not_changed
  if (centroids[0][0] != centroids[1][0]) {
    calm = centroids[0][0] > centroids[1][0] ? 0 : 1;
  } else if (centroids[0][1] != centroids[1][1]) {
    calm = centroids[0][1] < centroids[1][1] ? 0 : 1;
  } else {
    calm = 0;
  }
  std::array<Label, 2> names{Label::changed, Label::changed};
  names[static_cast<std::size_t>(calm)] = Label::not_changed;
  return names;
}

std::vector<WindowLabel> label_windows(const std::vector<WindowScore>& scores,
                                       const KMeansResult& clustering) {
  if (scores.size() != clustering.assignments.size()) {
    throw ShapeError("got " + std::to_string(scores.size()) + " window scores but " +
                     std::to_string(clustering.assignments.size()) + " cluster assignments");
  }
  const auto names = name_clusters(clustering.centroids);

  std::vector<WindowLabel> labels;
  labels.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const int cluster = clustering.assignments[i];
    const Point2& centroid = clustering.centroids[static_cast<std::size_t>(cluster)];
    const double dx = scores[i].mean - centroid[0];
    const double dy = scores[i].std_dev - centroid[1];
    labels.push_back(WindowLabel{WindowSpan{scores[i].start, scores[i].end},
                                 names[static_cast<std::size_t>(cluster)], cluster,
                                 std::sqrt(dx * dx + dy * dy)});
  }
  return labels;
}

std::vector<Label> frames_from_windows(const std::vector<WindowLabel>& windows, int n_frames) {
  if (n_frames < 0) throw ConfigError("n_frames must be >= 0");

  // No clustering evidence at all: flag everything as changed.
  std::vector<Label> frames(static_cast<std::size_t>(n_frames), Label::changed);
  if (windows.empty() || n_frames == 0) return frames;

  std::vector<int> changed_votes(static_cast<std::size_t>(n_frames), 0);
  std::vector<int> total_votes(static_cast<std::size_t>(n_frames), 0);
  for (const WindowLabel& w : windows) {
    const int lo = std::max(w.span.start, 0);
    const int hi = std::min(w.span.end, n_frames);
    for (int f = lo; f < hi; ++f) {
      ++total_votes[static_cast<std::size_t>(f)];
      if (w.label == Label::changed) ++changed_votes[static_cast<std::size_t>(f)];
    }
  }

  const Label tail = windows.back().label;
  for (int f = 0; f < n_frames; ++f) {
    const std::size_t i = static_cast<std::size_t>(f);
    if (total_votes[i] == 0) {
      frames[i] = tail;  // dropped tail past the final window
    } else {
      // Majority vote; an exact tie counts as changed.
      frames[i] = 2 * changed_votes[i] >= total_votes[i] ? Label::changed : Label::not_changed;
    }
  }
  return frames;
}

}  // namespace seadsc
