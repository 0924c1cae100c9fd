#pragma once

#include <filesystem>
#include <string_view>

namespace seadsc::detail {

/// Writes bytes to a sibling temp file and renames it over the target, so
/// readers never observe a half-written file. Throws DataError on I/O failure.
void atomic_write(const std::filesystem::path& path, std::string_view bytes);

}  // namespace seadsc::detail
