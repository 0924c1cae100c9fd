#pragma once

#include <cstdint>
#include <vector>

#include "seadsc/quantizer.hpp"

namespace seadsc {

/// Parameters of the grid-cell similarity score. Two maps are compared cell
/// by cell on a grid_rows x grid_cols grid; a cell pair counts as similar
/// when the top n_top most frequent codes of each side overlap in at least
/// delta_sim distinct codes.
struct SimilarityParams {
  int grid_rows = 5;
  int grid_cols = 5;
  int n_top = 5;
  int delta_sim = 2;

  int n_cells() const { return grid_rows * grid_cols; }

  /// Alternate preset with n_top = 10 and delta_sim = 5.
  static SimilarityParams top10_preset() {
    SimilarityParams p;
    p.n_top = 10;
    p.delta_sim = 5;
    return p;
  }
};

/// Throws ConfigError unless grid dims >= 1, n_top >= 1 and
/// 1 <= delta_sim <= n_top.
void validate_params(const SimilarityParams& params);

/// Non-owning rectangular view into one grid cell of a code-index map.
struct CellView {
  const CodeIndexMap* map = nullptr;
  int row0 = 0;
  int col0 = 0;
  int rows = 0;
  int cols = 0;

  int area() const { return rows * cols; }
  std::uint32_t at(int r, int c) const { return map->at(row0 + r, col0 + c); }
};

struct CodeCount {
  std::uint32_t code;
  int count;
};

struct CellMatch {
  bool similar;
  int overlap;
};

/// Per-cell indicator breakdown of one map comparison.
struct SimilarityBreakdown {
  double score = 0.0;
  int similar_cells = 0;
  std::vector<std::uint8_t> indicators;  // grid_rows * grid_cols, row-major
  std::vector<int> overlaps;             // same layout
};

/// Splits the map into grid_rows x grid_cols disjoint cells, row-major.
/// Map dims must be divisible by the grid dims.
std::vector<CellView> partition_grid(const CodeIndexMap& map, const SimilarityParams& params);

/// The cell's codes sorted by descending frequency, frequency ties broken by
/// ascending code index, truncated to n_top entries.
std::vector<CodeCount> cell_top_codes(const CellView& cell, int n_top);

/// Overlap between the two cells' top-code sets and the >= delta_sim verdict.
CellMatch cell_similar(const CellView& u, const CellView& v, const SimilarityParams& params);

/// Fraction of grid cells whose top codes overlap in at least delta_sim
/// entries. Always a multiple of 1 / n_cells.
double map_similarity(const CodeIndexMap& u, const CodeIndexMap& v,
                      const SimilarityParams& params);

/// map_similarity plus the per-cell indicator grid and overlap counts.
SimilarityBreakdown map_similarity_detail(const CodeIndexMap& u, const CodeIndexMap& v,
                                          const SimilarityParams& params);

}  // namespace seadsc
