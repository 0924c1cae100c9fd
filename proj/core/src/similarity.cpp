#include "seadsc/similarity.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "seadsc/error.hpp"

namespace seadsc {

void validate_params(const SimilarityParams& params) {
  if (params.grid_rows < 1 || params.grid_cols < 1) {
    throw ConfigError("grid dims must be >= 1, got " + std::to_string(params.grid_rows) + "x" +
                      std::to_string(params.grid_cols));
  }
  if (params.n_top < 1) throw ConfigError("n_top must be >= 1");
  if (params.delta_sim < 1 || params.delta_sim > params.n_top) {
    throw ConfigError("delta_sim must be in [1, n_top], got " + std::to_string(params.delta_sim) +
                      " with n_top " + std::to_string(params.n_top));
  }
}

std::vector<CellView> partition_grid(const CodeIndexMap& map, const SimilarityParams& params) {
  validate_params(params);
  if (map.height % params.grid_rows != 0) {
    throw ShapeError("map height " + std::to_string(map.height) + " not divisible by grid rows " +
                     std::to_string(params.grid_rows));
  }
  if (map.width % params.grid_cols != 0) {
    throw ShapeError("map width " + std::to_string(map.width) + " not divisible by grid cols " +
                     std::to_string(params.grid_cols));
  }
  const int cell_rows = map.height / params.grid_rows;
  const int cell_cols = map.width / params.grid_cols;

  std::vector<CellView> cells;
  cells.reserve(static_cast<std::size_t>(params.n_cells()));
  for (int gr = 0; gr < params.grid_rows; ++gr) {
    for (int gc = 0; gc < params.grid_cols; ++gc) {
      cells.push_back(CellView{&map, gr * cell_rows, gc * cell_cols, cell_rows, cell_cols});
    }
  }
  return cells;
}

std::vector<CodeCount> cell_top_codes(const CellView& cell, int n_top) {
  if (n_top < 1) throw ConfigError("n_top must be >= 1");
  if (cell.area() < 1) throw ShapeError("empty grid cell");

  std::unordered_map<std::uint32_t, int> counts;
  counts.reserve(static_cast<std::size_t>(cell.area()));
  for (int r = 0; r < cell.rows; ++r) {
    for (int c = 0; c < cell.cols; ++c) ++counts[cell.at(r, c)];
  }

  std::vector<CodeCount> ranked;
  ranked.reserve(counts.size());
  for (const auto& [code, count] : counts) ranked.push_back(CodeCount{code, count});
  std::sort(ranked.begin(), ranked.end(), [](const CodeCount& a, const CodeCount& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.code < b.code;
  });
  if (ranked.size() > static_cast<std::size_t>(n_top)) {
    ranked.resize(static_cast<std::size_t>(n_top));
  }
  return ranked;
}

CellMatch cell_similar(const CellView& u, const CellView& v, const SimilarityParams& params) {
  if (u.area() != v.area()) {
    throw ShapeError("cell areas differ: " + std::to_string(u.area()) + " vs " +
                     std::to_string(v.area()));
  }
  const auto top_u = cell_top_codes(u, params.n_top);
  const auto top_v = cell_top_codes(v, params.n_top);

  std::vector<std::uint32_t> codes_u, codes_v;
  codes_u.reserve(top_u.size());
  codes_v.reserve(top_v.size());
  for (const auto& cc : top_u) codes_u.push_back(cc.code);
  for (const auto& cc : top_v) codes_v.push_back(cc.code);
  std::sort(codes_u.begin(), codes_u.end());
  std::sort(codes_v.begin(), codes_v.end());

  int overlap = 0;
  auto it_u = codes_u.begin();
  auto it_v = codes_v.begin();
  while (it_u != codes_u.end() && it_v != codes_v.end()) {
    if (*it_u < *it_v) {
      ++it_u;
    } else if (*it_v < *it_u) {
      ++it_v;
    } else {
      ++overlap;
      ++it_u;
      ++it_v;
    }
  }
  return CellMatch{overlap >= params.delta_sim, overlap};
}

SimilarityBreakdown map_similarity_detail(const CodeIndexMap& u, const CodeIndexMap& v,
                                          const SimilarityParams& params) {
  if (u.height != v.height || u.width != v.width) {
    throw ShapeError("map shapes differ: " + std::to_string(u.height) + "x" +
                     std::to_string(u.width) + " vs " + std::to_string(v.height) + "x" +
                     std::to_string(v.width));
  }
  const auto cells_u = partition_grid(u, params);
  const auto cells_v = partition_grid(v, params);

  SimilarityBreakdown out;
  out.indicators.resize(cells_u.size());
  out.overlaps.resize(cells_u.size());
  for (std::size_t i = 0; i < cells_u.size(); ++i) {
    const CellMatch match = cell_similar(cells_u[i], cells_v[i], params);
    out.indicators[i] = match.similar ? 1 : 0;
    out.overlaps[i] = match.overlap;
    if (match.similar) ++out.similar_cells;
  }
  out.score = static_cast<double>(out.similar_cells) / static_cast<double>(params.n_cells());
  return out;
}

double map_similarity(const CodeIndexMap& u, const CodeIndexMap& v,
                      const SimilarityParams& params) {
  return map_similarity_detail(u, v, params).score;
}

}  // namespace seadsc
