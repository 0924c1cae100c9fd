#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "seadsc/frame.hpp"
#include "seadsc/quantizer.hpp"

namespace seadsc {

/// Reads a binary PGM (P5) or PPM (P6) file with maxval 255 and normalizes
/// pixels to [-1, 1]. Throws FormatError (with the byte offset) on malformed
/// headers, unsupported variants, or truncated payloads.
Frame read_frame(const std::filesystem::path& path);

/// Writes a frame as binary PGM (1 channel) or PPM (3 channels), maxval 255,
/// undoing the [-1, 1] normalization. Whole-file atomic (temp file + rename).
void write_frame(const std::filesystem::path& path, const Frame& frame);

/// A code-index map together with the codebook size it indexes into.
struct CodeMapFile {
  CodeIndexMap map;
  std::uint32_t n_entries = 0;
};

/// Writes the .sdcm container: magic "SDCM", u8 version 1, u32 LE height,
/// u32 LE width, u32 LE n_entries, then height*width u16 LE indices
/// row-major. Indices must fit in u16 and be < n_entries. Atomic write.
void write_code_map(const std::filesystem::path& path, const CodeIndexMap& map,
                    std::uint32_t n_entries);

/// Reads a .sdcm file, validating magic, version, size and index range.
/// Throws FormatError / CorruptionError accordingly.
CodeMapFile read_code_map(const std::filesystem::path& path);

/// Reads just the header (height, width, n_entries) of a .sdcm file.
CodeMapFile read_code_map_header(const std::filesystem::path& path);

/// Writes the .sdcb container: magic "SDCB", u8 version 1, u32 LE n_entries,
/// u32 LE dim, u64 LE seed, then n_entries*dim float32 LE values row-major by
/// entry. Atomic write.
void write_codebook(const std::filesystem::path& path, const Codebook& codebook);

/// Reads a .sdcb file. Entry values are widened to double.
Codebook read_codebook(const std::filesystem::path& path);

/// Aspect-preserving nearest-neighbor scale so the frame fits inside the
/// target, then symmetric padding with 0.0 (mid-gray after normalization) to
/// the exact target dims. A 1-channel frame is replicated to 3 channels when
/// the target has 3.
Frame resize_pad(const Frame& frame, int target_width = 960, int target_height = 600,
                 int target_channels = 3);

/// Lists *.pgm / *.ppm files in a directory, ordered by numeric stem
/// ascending (lexicographic for non-numeric stems, after the numeric ones).
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Same ordering for *.sdcm files.
std::vector<std::filesystem::path> list_code_maps(const std::filesystem::path& dir);

}  // namespace seadsc
