#pragma once

#include <cstddef>
#include <vector>

namespace seadsc {

/// One decoded video frame. Pixels are stored row-major in (row, col, channel)
/// order and normalized to [-1, 1]: a raw 8-bit value v maps to (v/255 - 0.5) / 0.5.
struct Frame {
  int width = 0;
  int height = 0;
  int channels = 1;  // 1 (gray) or 3 (RGB)
  std::vector<float> pixels;

  std::size_t size() const { return pixels.size(); }

  float at(int row, int col, int channel) const {
    return pixels[(static_cast<std::size_t>(row) * width + col) * channels + channel];
  }

  float& at(int row, int col, int channel) {
    return pixels[(static_cast<std::size_t>(row) * width + col) * channels + channel];
  }
};

/// Throws ShapeError if dims are non-positive, channels is not 1 or 3, the
/// buffer length does not match width*height*channels, or a value is non-finite.
void validate_frame(const Frame& frame);

}  // namespace seadsc
