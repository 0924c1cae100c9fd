#include "seadsc/quantizer.hpp"

#include <limits>
#include <random>
#include <string>

#include "lloyd.hpp"
#include "rng.hpp"
#include "seadsc/error.hpp"

namespace seadsc {

namespace {

std::vector<double> draw_uniform_entries(std::size_t n_entries, std::size_t dim,
                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> entries(n_entries * dim);
  const double scale = 1.0 / static_cast<double>(n_entries);
  for (double& v : entries) {
    // (2u - 1) / n_entries with u strictly inside (0, 1) keeps every
    // component strictly inside (-1/n_entries, +1/n_entries).
    v = (2.0 * detail::uniform_open01(rng) - 1.0) * scale;
  }
  return entries;
}

void check_same_feature_shape(const FeatureGrid& a, const FeatureGrid& b) {
  if (a.rows != b.rows || a.cols != b.cols || a.dim != b.dim) {
    throw ShapeError("feature grids differ: " + std::to_string(a.rows) + "x" +
                     std::to_string(a.cols) + "x" + std::to_string(a.dim) + " vs " +
                     std::to_string(b.rows) + "x" + std::to_string(b.cols) + "x" +
                     std::to_string(b.dim));
  }
}

}  // namespace

Codebook init_codebook(std::size_t n_entries, std::size_t dim, std::uint64_t seed) {
  if (n_entries < 2) {
    throw ConfigError("codebook needs at least 2 entries, got " + std::to_string(n_entries));
  }
  if (dim < 1) throw ConfigError("codebook dimension must be >= 1");
  Codebook cb;
  cb.n_entries = n_entries;
  cb.dim = dim;
  cb.seed = seed;
  cb.entries = draw_uniform_entries(n_entries, dim, seed);
  return cb;
}

FeatureGrid extract_features(const Frame& frame, const EncoderConfig& cfg) {
  if (cfg.patch_height < 1 || cfg.patch_width < 1) {
    throw ConfigError("patch dims must be >= 1, got " + std::to_string(cfg.patch_height) + "x" +
                      std::to_string(cfg.patch_width));
  }
  validate_frame(frame);
  if (frame.height % cfg.patch_height != 0) {
    throw ShapeError("frame height " + std::to_string(frame.height) +
                     " not divisible by patch height " + std::to_string(cfg.patch_height));
  }
  if (frame.width % cfg.patch_width != 0) {
    throw ShapeError("frame width " + std::to_string(frame.width) +
                     " not divisible by patch width " + std::to_string(cfg.patch_width));
  }

  FeatureGrid grid;
  grid.rows = frame.height / cfg.patch_height;
  grid.cols = frame.width / cfg.patch_width;
  grid.dim = static_cast<std::size_t>(cfg.feature_dim(frame.channels));
  grid.values.resize(grid.count() * grid.dim);

  std::size_t out = 0;
  for (int pr = 0; pr < grid.rows; ++pr) {
    for (int pc = 0; pc < grid.cols; ++pc) {
      for (int r = 0; r < cfg.patch_height; ++r) {
        for (int c = 0; c < cfg.patch_width; ++c) {
          for (int ch = 0; ch < frame.channels; ++ch) {
            grid.values[out++] =
                frame.at(pr * cfg.patch_height + r, pc * cfg.patch_width + c, ch);
          }
        }
      }
    }
  }
  return grid;
}

CodeIndexMap quantize(const FeatureGrid& features, const Codebook& codebook) {
  if (features.dim != codebook.dim) {
    throw ShapeError("feature dim " + std::to_string(features.dim) + " vs codebook dim " +
                     std::to_string(codebook.dim));
  }
  CodeIndexMap map;
  map.height = features.rows;
  map.width = features.cols;
  map.indices.resize(features.count());
  for (std::size_t i = 0; i < features.count(); ++i) {
    map.indices[i] = static_cast<std::uint32_t>(detail::nearest_centroid(
        features.feature(i), codebook.entries.data(), codebook.n_entries, codebook.dim));
  }
  return map;
}

FeatureGrid lookup_codes(const CodeIndexMap& map, const Codebook& codebook) {
  FeatureGrid grid;
  grid.rows = map.height;
  grid.cols = map.width;
  grid.dim = codebook.dim;
  grid.values.resize(grid.count() * grid.dim);
  for (std::size_t i = 0; i < map.indices.size(); ++i) {
    const std::uint32_t idx = map.indices[i];
    if (idx >= codebook.n_entries) {
      throw CorruptionError("code index " + std::to_string(idx) + " out of range for codebook of " +
                            std::to_string(codebook.n_entries) + " entries");
    }
    const double* entry = codebook.entry(idx);
    std::copy(entry, entry + grid.dim, grid.feature(i));
  }
  return grid;
}

Frame reconstruct(const CodeIndexMap& map, const Codebook& codebook, const EncoderConfig& cfg) {
  const std::size_t patch_area = static_cast<std::size_t>(cfg.patch_height) * cfg.patch_width;
  if (patch_area == 0 || codebook.dim % patch_area != 0) {
    throw ShapeError("codebook dim " + std::to_string(codebook.dim) +
                     " does not factor into patches of " + std::to_string(cfg.patch_height) + "x" +
                     std::to_string(cfg.patch_width));
  }
  const int channels = static_cast<int>(codebook.dim / patch_area);

  Frame frame;
  frame.height = map.height * cfg.patch_height;
  frame.width = map.width * cfg.patch_width;
  frame.channels = channels;
  frame.pixels.resize(static_cast<std::size_t>(frame.width) * frame.height * channels);

  for (int pr = 0; pr < map.height; ++pr) {
    for (int pc = 0; pc < map.width; ++pc) {
      const std::uint32_t idx = map.at(pr, pc);
      if (idx >= codebook.n_entries) {
        throw CorruptionError("code index " + std::to_string(idx) +
                              " out of range for codebook of " +
                              std::to_string(codebook.n_entries) + " entries");
      }
      const double* entry = codebook.entry(idx);
      std::size_t k = 0;
      for (int r = 0; r < cfg.patch_height; ++r) {
        for (int c = 0; c < cfg.patch_width; ++c) {
          for (int ch = 0; ch < channels; ++ch) {
            frame.at(pr * cfg.patch_height + r, pc * cfg.patch_width + c, ch) =
                static_cast<float>(entry[k++]);
          }
        }
      }
    }
  }
  return frame;
}

double reconstruction_loss(const Frame& x, const Frame& x_hat) {
  if (x.width != x_hat.width || x.height != x_hat.height || x.channels != x_hat.channels) {
    throw ShapeError("frame shapes differ: " + std::to_string(x.width) + "x" +
                     std::to_string(x.height) + "x" + std::to_string(x.channels) + " vs " +
                     std::to_string(x_hat.width) + "x" + std::to_string(x_hat.height) + "x" +
                     std::to_string(x_hat.channels));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < x.pixels.size(); ++i) {
    const double diff = static_cast<double>(x.pixels[i]) - static_cast<double>(x_hat.pixels[i]);
    sum += diff * diff;
  }
  return sum;
}

double vq_loss(const FeatureGrid& encoder_out, const FeatureGrid& selected_codes,
               const LossConfig& cfg) {
  if (cfg.beta < 0.0) throw ConfigError("beta must be >= 0");
  check_same_feature_shape(encoder_out, selected_codes);
  double sum = 0.0;
  for (std::size_t i = 0; i < encoder_out.values.size(); ++i) {
    const double diff = encoder_out.values[i] - selected_codes.values[i];
    sum += diff * diff;
  }
  // The stop gradient is the identity in value, so both terms share the same
  // squared norm.
  return sum + cfg.beta * sum;
}

double total_loss(const Frame& x, const Frame& x_hat, const FeatureGrid& encoder_out,
                  const FeatureGrid& selected_codes, const LossConfig& cfg) {
  return reconstruction_loss(x, x_hat) + vq_loss(encoder_out, selected_codes, cfg);
}

TrainResult train_codebook(std::span<const double> vectors, std::size_t dim,
                           std::size_t n_entries, std::uint64_t seed, int max_iters,
                           double rel_tol) {
  if (dim < 1) throw ConfigError("vector dimension must be >= 1");
  if (n_entries < 1) throw ConfigError("n_entries must be >= 1");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (rel_tol < 0.0) throw ConfigError("rel_tol must be >= 0");
  if (vectors.empty()) throw DataError("no training vectors given");
  if (vectors.size() % dim != 0) {
    throw ShapeError("training buffer of " + std::to_string(vectors.size()) +
                     " values is not a multiple of dim " + std::to_string(dim));
  }

  detail::LloydState state;
  state.centroids = draw_uniform_entries(n_entries, dim, seed);
  detail::LloydOptions opts;
  opts.max_updates = max_iters;
  opts.rel_tol = rel_tol;
  detail::lloyd_iterate(vectors, dim, n_entries, state, opts);

  TrainResult result;
  result.codebook.n_entries = n_entries;
  result.codebook.dim = dim;
  result.codebook.seed = seed;
  result.codebook.entries = std::move(state.centroids);
  result.distortion_trace = std::move(state.trace);
  return result;
}

}  // namespace seadsc
