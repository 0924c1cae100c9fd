#include "lloyd.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace seadsc::detail {

double squared_distance(const double* a, const double* b, std::size_t dim, double bound) {
  double sum = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
    if (sum > bound) return sum;
  }
  return sum;
}

std::size_t nearest_centroid(const double* point, const double* centroids, std::size_t k,
                             std::size_t dim) {
  std::size_t best = 0;
  double best_dist = squared_distance(point, centroids, dim, std::numeric_limits<double>::infinity());
  for (std::size_t j = 1; j < k; ++j) {
    const double d = squared_distance(point, centroids + j * dim, dim, best_dist);
    if (d < best_dist) {
      best_dist = d;
      best = j;
    }
  }
  return best;
}

namespace {

// Moves each empty cluster's centroid onto the point currently farthest from
// its assigned centroid, consuming points in decreasing-distance order.
void reseed_empty_clusters(std::span<const double> data, std::size_t dim,
                           std::vector<double>& centroids, const std::vector<std::size_t>& counts,
                           const std::vector<int>& assignments,
                           const std::vector<double>& dists) {
  const std::size_t n = assignments.size();
  std::vector<std::size_t> order;
  std::vector<std::size_t> empties;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    if (counts[j] == 0) empties.push_back(j);
  }
  if (empties.empty()) return;

  order.resize(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dists[a] > dists[b]; });

  std::size_t next = 0;
  for (std::size_t j : empties) {
    if (next >= n) break;  // more empty clusters than points; leave the rest
    const double* point = data.data() + order[next] * dim;
    std::copy(point, point + dim, centroids.begin() + j * dim);
    ++next;
  }
}

}  // namespace

void lloyd_iterate(std::span<const double> data, std::size_t dim, std::size_t k,
                   LloydState& state, const LloydOptions& opts) {
  const std::size_t n = data.size() / dim;
  state.assignments.assign(n, -1);
  state.trace.clear();

  std::vector<double> dists(n, 0.0);
  std::vector<double> sums(k * dim, 0.0);
  std::vector<std::size_t> counts(k, 0);

  int updates = 0;
  for (;;) {
    // Assignment pass.
    bool changed = false;
    double distortion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* point = data.data() + i * dim;
      const std::size_t idx = nearest_centroid(point, state.centroids.data(), k, dim);
      const double d = squared_distance(point, state.centroids.data() + idx * dim, dim,
                                        std::numeric_limits<double>::infinity());
      dists[i] = d;
      distortion += d;
      if (static_cast<int>(idx) != state.assignments[i]) {
        state.assignments[i] = static_cast<int>(idx);
        changed = true;
      }
    }
    state.trace.push_back(distortion);

    if (state.trace.size() > 1) {
      if (!changed) break;
      const double prev = state.trace[state.trace.size() - 2];
      if (prev - distortion <= opts.rel_tol * prev) break;
    }
    if (updates >= opts.max_updates) break;

    // Centroid update in deterministic index order.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    for (std::size_t i = 0; i < n; ++i) {
      const double* point = data.data() + i * dim;
      double* sum = sums.data() + static_cast<std::size_t>(state.assignments[i]) * dim;
      for (std::size_t c = 0; c < dim; ++c) sum[c] += point[c];
      ++counts[static_cast<std::size_t>(state.assignments[i])];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (counts[j] == 0) continue;
      double* centroid = state.centroids.data() + j * dim;
      const double inv = 1.0 / static_cast<double>(counts[j]);
      for (std::size_t c = 0; c < dim; ++c) centroid[c] = sums[j * dim + c] * inv;
    }
    reseed_empty_clusters(data, dim, state.centroids, counts, state.assignments, dists);
    ++updates;
  }
}

}  // namespace seadsc::detail
