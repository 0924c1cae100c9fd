#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace seadsc::detail {

struct LloydOptions {
  int max_updates = 100;
  double rel_tol = 1e-6;
};

struct LloydState {
  std::vector<double> centroids;  // k * dim, row-major; holds the seed on entry
  std::vector<int> assignments;   // one cluster id per point
  std::vector<double> trace;      // distortion per assignment pass
};

/// Squared Euclidean distance with early abandon: partial sums of
/// nonnegative terms are monotone, so once a partial sum exceeds `bound` the
/// full distance can neither win nor tie. Returns the partial sum at the
/// abandon point in that case.
double squared_distance(const double* a, const double* b, std::size_t dim, double bound);

/// Index of the nearest centroid by squared distance, ties to the lowest index.
std::size_t nearest_centroid(const double* point, const double* centroids, std::size_t k,
                             std::size_t dim);

/// Alternates assignment and centroid-update passes. Stops on an assignment
/// fixpoint, when the relative distortion decrease drops below rel_tol, or
/// after max_updates centroid updates; always ends right after an assignment
/// pass so the final assignment is the argmin for the final centroids.
/// Empty clusters are reseeded to the point farthest from its assigned
/// centroid (largest first, each point used once per pass).
void lloyd_iterate(std::span<const double> data, std::size_t dim, std::size_t k,
                   LloydState& state, const LloydOptions& opts);

}  // namespace seadsc::detail
