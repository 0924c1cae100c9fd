// Shared helpers for the test suites: data builders, a temp-dir guard, a CLI
// runner, and deliberately naive reference implementations ("oracles") that
// the optimized library code is checked against. The oracles favor obvious
// correctness over speed and share no code with the library internals.
#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "seadsc/detector.hpp"
#include "seadsc/frame.hpp"
#include "seadsc/quantizer.hpp"
#include "seadsc/similarity.hpp"

namespace test_support {

// ---- builders ---------------------------------------------------------------

inline seadsc::CodeIndexMap make_map(int height, int width,
                                     std::vector<std::uint32_t> indices) {
  return seadsc::CodeIndexMap{height, width, std::move(indices)};
}

inline seadsc::CodeIndexMap constant_map(int height, int width, std::uint32_t code) {
  return make_map(height, width,
                  std::vector<std::uint32_t>(static_cast<std::size_t>(height) * width, code));
}

inline seadsc::CodeIndexMap random_map(std::mt19937_64& rng, int height, int width,
                                       std::uint32_t n_codes) {
  std::uniform_int_distribution<std::uint32_t> dist(0, n_codes - 1);
  seadsc::CodeIndexMap map{height, width, {}};
  map.indices.resize(map.count());
  for (std::uint32_t& v : map.indices) v = dist(rng);
  return map;
}

inline seadsc::Frame constant_frame(int width, int height, int channels, float value) {
  seadsc::Frame frame{width, height, channels, {}};
  frame.pixels.assign(static_cast<std::size_t>(width) * height * channels, value);
  return frame;
}

inline seadsc::Frame random_frame(std::mt19937_64& rng, int width, int height, int channels) {
  std::uniform_real_distribution<float> dist(-1.0f, 1.0f);
  seadsc::Frame frame{width, height, channels, {}};
  frame.pixels.resize(static_cast<std::size_t>(width) * height * channels);
  for (float& v : frame.pixels) v = dist(rng);
  return frame;
}

// ---- temp dir + CLI runner --------------------------------------------------

/// Unique directory under the system temp root, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("seadsc_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr combined
};

/// Runs the CLI binary through the shell, capturing combined output.
/// `env_prefix` may carry VAR=value assignments.
inline CliResult run_cli(const std::string& cli, const std::string& args,
                         const std::string& env_prefix = "") {
  static std::atomic<unsigned> counter{0};
  const std::filesystem::path capture =
      std::filesystem::temp_directory_path() /
      ("seadsc_cli_out_" + std::to_string(::getpid()) + "_" +
       std::to_string(counter.fetch_add(1)) + ".txt");

  std::string cmd = env_prefix.empty() ? "" : env_prefix + " ";
  cmd += "\"" + cli + "\" " + args + " > \"" + capture.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());

  CliResult result;
  result.exit_code = (raw >= 0 && WIFEXITED(raw)) ? WEXITSTATUS(raw) : -1;
  if (FILE* f = std::fopen(capture.string().c_str(), "rb")) {
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof(buf), f)) > 0) result.output.append(buf, n);
    std::fclose(f);
  }
  std::filesystem::remove(capture);
  return result;
}

// ---- oracles ----------------------------------------------------------------

/// Grid-cell similarity recomputed from first principles: explicit histograms
/// per cell, full sort, set intersection.
inline double brute_force_similarity(const seadsc::CodeIndexMap& u, const seadsc::CodeIndexMap& v,
                                     const seadsc::SimilarityParams& params) {
  const int cell_h = u.height / params.grid_rows;
  const int cell_w = u.width / params.grid_cols;

  auto top_set = [&](const seadsc::CodeIndexMap& map, int gr, int gc) {
    std::map<std::uint32_t, int> hist;
    for (int r = gr * cell_h; r < (gr + 1) * cell_h; ++r) {
      for (int c = gc * cell_w; c < (gc + 1) * cell_w; ++c) ++hist[map.at(r, c)];
    }
    std::vector<std::pair<std::uint32_t, int>> ranked(hist.begin(), hist.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    std::set<std::uint32_t> top;
    for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(params.n_top); ++i) {
      top.insert(ranked[i].first);
    }
    return top;
  };

  int similar = 0;
  for (int gr = 0; gr < params.grid_rows; ++gr) {
    for (int gc = 0; gc < params.grid_cols; ++gc) {
      const std::set<std::uint32_t> a = top_set(u, gr, gc);
      const std::set<std::uint32_t> b = top_set(v, gr, gc);
      int overlap = 0;
      for (std::uint32_t code : a) overlap += b.count(code) ? 1 : 0;
      if (overlap >= params.delta_sim) ++similar;
    }
  }
  return static_cast<double>(similar) / (params.grid_rows * params.grid_cols);
}

/// Exhaustive nearest-entry scan with plain accumulation and strict-less
/// comparison (so the first minimum wins, matching the stated tie rule).
inline std::uint32_t exhaustive_nearest(const double* feature, const seadsc::Codebook& codebook) {
  std::uint32_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < codebook.n_entries; ++k) {
    double dist = 0.0;
    for (std::size_t d = 0; d < codebook.dim; ++d) {
      const double diff = feature[d] - codebook.entry(k)[d];
      dist += diff * diff;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<std::uint32_t>(k);
    }
  }
  return best;
}

/// Plain two-pass mean and population standard deviation.
inline std::pair<double, double> naive_mean_std(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

/// Plain sum of squared differences.
inline double naive_sq_diff(const std::vector<float>& a, const std::vector<float>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += diff * diff;
  }
  return sum;
}

inline double naive_sq_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return sum;
}

/// Exhaustive optimal 2-partition by SSE over all 2^(n-1) splits (point 0
/// pinned to side 0 to kill the mirror symmetry). Returns the minimal SSE and
/// the two side means.
struct BestSplit {
  double sse = std::numeric_limits<double>::infinity();
  std::array<seadsc::Point2, 2> means{};
};

inline BestSplit exhaustive_best_2partition(const std::vector<seadsc::Point2>& points) {
  const std::size_t n = points.size();
  BestSplit best;
  for (std::uint64_t mask = 0; mask < (1ull << (n - 1)); ++mask) {
    std::array<double, 2> sx{0, 0}, sy{0, 0};
    std::array<int, 2> count{0, 0};
    for (std::size_t i = 0; i < n; ++i) {
      const int side = i == 0 ? 0 : static_cast<int>((mask >> (i - 1)) & 1);
      sx[static_cast<std::size_t>(side)] += points[i][0];
      sy[static_cast<std::size_t>(side)] += points[i][1];
      ++count[static_cast<std::size_t>(side)];
    }
    if (count[0] == 0 || count[1] == 0) continue;
    std::array<seadsc::Point2, 2> means{};
    for (int s = 0; s < 2; ++s) {
      means[static_cast<std::size_t>(s)] = {sx[static_cast<std::size_t>(s)] / count[static_cast<std::size_t>(s)],
                                            sy[static_cast<std::size_t>(s)] / count[static_cast<std::size_t>(s)]};
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const int side = i == 0 ? 0 : static_cast<int>((mask >> (i - 1)) & 1);
      const double dx = points[i][0] - means[static_cast<std::size_t>(side)][0];
      const double dy = points[i][1] - means[static_cast<std::size_t>(side)][1];
      sse += dx * dx + dy * dy;
    }
    if (sse < best.sse) {
      best.sse = sse;
      best.means = means;
    }
  }
  return best;
}

}  // namespace test_support
