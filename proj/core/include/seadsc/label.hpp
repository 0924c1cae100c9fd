#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace seadsc {

/// Per-window / per-frame verdict of the detector.
enum class Label : std::uint8_t { changed = 0, not_changed = 1 };

std::string_view to_string(Label label);

/// Parses "changed" / "not_changed"; throws FormatError otherwise.
Label label_from_string(std::string_view text);

}  // namespace seadsc
