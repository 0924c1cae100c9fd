#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "seadsc/frame.hpp"

namespace seadsc {

/// Deterministic patch encoder: frames are cut into non-overlapping patches
/// and each patch is flattened (row, col, channel) into one feature vector.
struct EncoderConfig {
  int patch_height = 4;
  int patch_width = 4;

  int feature_dim(int channels) const { return patch_height * patch_width * channels; }
};

/// A learned set of code vectors. `entries` holds n_entries * dim values,
/// row-major by entry. `seed` is the RNG seed used at initialization.
struct Codebook {
  std::size_t n_entries = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<double> entries;

  const double* entry(std::size_t i) const { return entries.data() + i * dim; }
  double* entry(std::size_t i) { return entries.data() + i * dim; }
};

/// Feature vectors laid out on a spatial grid (one vector per patch).
struct FeatureGrid {
  int rows = 0;
  int cols = 0;
  std::size_t dim = 0;
  std::vector<double> values;  // rows * cols * dim, row-major by cell

  std::size_t count() const { return static_cast<std::size_t>(rows) * cols; }
  const double* feature(std::size_t i) const { return values.data() + i * dim; }
  double* feature(std::size_t i) { return values.data() + i * dim; }
};

/// The quantized representation of one frame: a grid of codebook indices.
struct CodeIndexMap {
  int height = 0;
  int width = 0;
  std::vector<std::uint32_t> indices;  // height * width, row-major

  std::size_t count() const { return static_cast<std::size_t>(height) * width; }
  std::uint32_t at(int row, int col) const {
    return indices[static_cast<std::size_t>(row) * width + col];
  }
};

struct LossConfig {
  double beta = 0.25;  // commitment weight, must be >= 0
};

struct TrainResult {
  Codebook codebook;
  std::vector<double> distortion_trace;  // one value per assignment pass, non-increasing
};

/// Creates a codebook with every component drawn i.i.d. uniform on the open
/// interval (-1/n_entries, +1/n_entries). Identical seeds give bit-identical
/// codebooks on every platform.
Codebook init_codebook(std::size_t n_entries, std::size_t dim, std::uint64_t seed);

/// Cuts the frame into non-overlapping patches of cfg size. Frame dims must
/// be divisible by the patch dims.
FeatureGrid extract_features(const Frame& frame, const EncoderConfig& cfg);

/// Maps every feature to the index of the nearest codebook entry by squared
/// Euclidean distance. Ties go to the lowest index.
CodeIndexMap quantize(const FeatureGrid& features, const Codebook& codebook);

/// Rebuilds a frame by placing each selected code vector back as a patch.
/// Channel count is derived as codebook.dim / (patch_height * patch_width).
Frame reconstruct(const CodeIndexMap& map, const Codebook& codebook, const EncoderConfig& cfg);

/// Looks up the code vector selected for each map cell. The result has the
/// map's spatial shape and the codebook's dimension.
FeatureGrid lookup_codes(const CodeIndexMap& map, const Codebook& codebook);

/// Sum of squared differences over all components (no averaging).
double reconstruction_loss(const Frame& x, const Frame& x_hat);

/// ||E(x) - e||^2 + beta * ||e - E(x)||^2 evaluated as values. The stop
/// gradient of the training objective affects only differentiation, so the
/// value equals (1 + beta) * ||E(x) - e||^2.
double vq_loss(const FeatureGrid& encoder_out, const FeatureGrid& selected_codes,
               const LossConfig& cfg);

/// reconstruction_loss(x, x_hat) + vq_loss(encoder_out, selected_codes, cfg).
double total_loss(const Frame& x, const Frame& x_hat, const FeatureGrid& encoder_out,
                  const FeatureGrid& selected_codes, const LossConfig& cfg);

/// Trains a codebook on flat patch vectors (count * dim values) by Lloyd
/// iteration, starting from init_codebook(n_entries, dim, seed). Empty
/// clusters are reseeded to the point farthest from its current centroid,
/// which also pulls the near-zero initial entries into the data range during
/// the first passes. Stops when the relative distortion decrease falls below
/// rel_tol or after max_iters centroid updates. Deterministic given
/// (vectors, seed).
TrainResult train_codebook(std::span<const double> vectors, std::size_t dim,
                           std::size_t n_entries, std::uint64_t seed,
                           int max_iters = 100, double rel_tol = 1e-6);

}  // namespace seadsc
