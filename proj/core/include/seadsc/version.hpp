#pragma once

namespace seadsc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace seadsc
