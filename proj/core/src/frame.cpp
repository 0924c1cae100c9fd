#include "seadsc/frame.hpp"

#include <cmath>
#include <string>

#include "seadsc/error.hpp"

namespace seadsc {

void validate_frame(const Frame& frame) {
  if (frame.width < 1 || frame.height < 1) {
    throw ShapeError("frame dims must be positive, got " + std::to_string(frame.width) + "x" +
                     std::to_string(frame.height));
  }
  if (frame.channels != 1 && frame.channels != 3) {
    throw ShapeError("frame channels must be 1 or 3, got " + std::to_string(frame.channels));
  }
  const std::size_t expected = static_cast<std::size_t>(frame.width) * frame.height * frame.channels;
  if (frame.pixels.size() != expected) {
    throw ShapeError("frame buffer holds " + std::to_string(frame.pixels.size()) +
                     " values, expected " + std::to_string(expected));
  }
  for (float v : frame.pixels) {
    if (!std::isfinite(v)) throw ShapeError("frame contains a non-finite pixel value");
  }
}

}  // namespace seadsc
