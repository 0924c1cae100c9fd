#include "seadsc/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>
#include <tuple>

#include "fs_util.hpp"
#include "seadsc/error.hpp"

namespace seadsc {
namespace detail {

void atomic_write(const std::filesystem::path& path, std::string_view bytes) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError("short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

}  // namespace detail

namespace {

void put_u16_le(std::string& buf, std::uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put_u32_le(std::string& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64_le(std::string& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f32_le(std::string& buf, float v) { put_u32_le(buf, std::bit_cast<std::uint32_t>(v)); }

/// Cursor over an in-memory file image; all reads report the byte offset on
/// failure so corrupt files are easy to pinpoint.
struct ByteReader {
  const std::string& bytes;
  std::size_t pos = 0;
  std::string name;

  void need(std::size_t n, const char* what) const {
    if (pos + n > bytes.size()) {
      throw FormatError(name + ": truncated " + what + " at byte " + std::to_string(pos) +
                        " (file has " + std::to_string(bytes.size()) + " bytes)");
    }
  }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(bytes[pos++]);
  }

  std::uint16_t u16_le(const char* what) {
    need(2, what);
    const auto b0 = static_cast<std::uint8_t>(bytes[pos]);
    const auto b1 = static_cast<std::uint8_t>(bytes[pos + 1]);
    pos += 2;
    return static_cast<std::uint16_t>(b0 | (b1 << 8));
  }

  std::uint32_t u32_le(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(bytes[pos + static_cast<std::size_t>(i)])) << (8 * i);
    }
    pos += 4;
    return v;
  }

  std::uint64_t u64_le(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes[pos + static_cast<std::size_t>(i)])) << (8 * i);
    }
    pos += 8;
    return v;
  }

  float f32_le(const char* what) { return std::bit_cast<float>(u32_le(what)); }
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

bool is_pnm_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

/// Skips whitespace and '#' comment lines between PNM header tokens.
void skip_pnm_separators(ByteReader& r) {
  while (r.pos < r.bytes.size()) {
    const char c = r.bytes[r.pos];
    if (is_pnm_space(c)) {
      ++r.pos;
    } else if (c == '#') {
      while (r.pos < r.bytes.size() && r.bytes[r.pos] != '\n') ++r.pos;
    } else {
      return;
    }
  }
}

int pnm_int(ByteReader& r, const char* what) {
  skip_pnm_separators(r);
  const std::size_t start = r.pos;
  long long value = 0;
  while (r.pos < r.bytes.size() && r.bytes[r.pos] >= '0' && r.bytes[r.pos] <= '9') {
    value = value * 10 + (r.bytes[r.pos] - '0');
    if (value > 1'000'000'000) {
      throw FormatError(r.name + ": " + what + " out of range at byte " + std::to_string(start));
    }
    ++r.pos;
  }
  if (r.pos == start) {
    throw FormatError(r.name + ": expected " + std::string(what) + " at byte " +
                      std::to_string(r.pos));
  }
  return static_cast<int>(value);
}

}  // namespace

Frame read_frame(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  ByteReader r{bytes, 0, path.string()};

  r.need(2, "magic");
  const std::string magic = bytes.substr(0, 2);
  r.pos = 2;
  int channels;
  if (magic == "P5") {
    channels = 1;
  } else if (magic == "P6") {
    channels = 3;
  } else {
    throw FormatError(r.name + ": unsupported format '" + magic +
                      "' at byte 0; only binary P5/P6 are readable");
  }

  const int width = pnm_int(r, "width");
  const int height = pnm_int(r, "height");
  const int maxval = pnm_int(r, "maxval");
  if (width < 1 || height < 1) {
    throw FormatError(r.name + ": bad dimensions " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
  if (maxval != 255) {
    throw FormatError(r.name + ": unsupported maxval " + std::to_string(maxval) +
                      " at byte " + std::to_string(r.pos) + "; only 255 is readable");
  }
  // Exactly one whitespace byte separates the header from the payload.
  r.need(1, "header terminator");
  if (!is_pnm_space(bytes[r.pos])) {
    throw FormatError(r.name + ": expected whitespace after maxval at byte " +
                      std::to_string(r.pos));
  }
  ++r.pos;

  const std::size_t n_values = static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                               static_cast<std::size_t>(channels);
  r.need(n_values, "pixel payload");

  Frame frame;
  frame.width = width;
  frame.height = height;
  frame.channels = channels;
  frame.pixels.resize(n_values);
  for (std::size_t i = 0; i < n_values; ++i) {
    const auto raw = static_cast<std::uint8_t>(bytes[r.pos + i]);
    frame.pixels[i] = (static_cast<float>(raw) / 255.0f - 0.5f) / 0.5f;
  }
  return frame;
}

void write_frame(const std::filesystem::path& path, const Frame& frame) {
  validate_frame(frame);

  std::string buf;
  buf += frame.channels == 1 ? "P5" : "P6";
  buf += "\n" + std::to_string(frame.width) + " " + std::to_string(frame.height) + "\n255\n";
  buf.reserve(buf.size() + frame.pixels.size());
  for (float v : frame.pixels) {
    const float unit = v * 0.5f + 0.5f;
    const long byte = std::lround(static_cast<double>(unit) * 255.0);
    buf.push_back(static_cast<char>(std::clamp(byte, 0L, 255L)));
  }
  detail::atomic_write(path, buf);
}

void write_code_map(const std::filesystem::path& path, const CodeIndexMap& map,
                    std::uint32_t n_entries) {
  if (map.height < 1 || map.width < 1) throw DataError("cannot write an empty code map");
  if (map.indices.size() != static_cast<std::size_t>(map.height) * static_cast<std::size_t>(map.width)) {
    throw ShapeError("code map buffer does not match its dimensions");
  }
  if (n_entries == 0 || n_entries > 65536) {
    throw DataError("n_entries must be in [1, 65536] for u16 storage, got " +
                    std::to_string(n_entries));
  }

  std::string buf;
  buf.reserve(17 + 2 * map.indices.size());
  buf += "SDCM";
  buf.push_back(static_cast<char>(1));  // version
  put_u32_le(buf, static_cast<std::uint32_t>(map.height));
  put_u32_le(buf, static_cast<std::uint32_t>(map.width));
  put_u32_le(buf, n_entries);
  for (std::uint32_t index : map.indices) {
    if (index >= n_entries) {
      throw DataError("code index " + std::to_string(index) + " out of range for " +
                      std::to_string(n_entries) + " entries");
    }
    put_u16_le(buf, static_cast<std::uint16_t>(index));
  }
  detail::atomic_write(path, buf);
}

namespace {

CodeMapFile read_code_map_impl(const std::filesystem::path& path, bool payload) {
  const std::string bytes = slurp(path);
  ByteReader r{bytes, 0, path.string()};

  r.need(4, "magic");
  if (bytes.compare(0, 4, "SDCM") != 0) {
    throw FormatError(r.name + ": bad magic at byte 0; not a code-map file");
  }
  r.pos = 4;
  const std::uint8_t version = r.u8("version");
  if (version != 1) {
    throw FormatError(r.name + ": unsupported version " + std::to_string(version));
  }

  CodeMapFile out;
  const std::uint32_t height = r.u32_le("height");
  const std::uint32_t width = r.u32_le("width");
  out.n_entries = r.u32_le("n_entries");
  if (height == 0 || width == 0) throw CorruptionError(r.name + ": zero map dimension");
  if (out.n_entries == 0) throw CorruptionError(r.name + ": zero n_entries");

  out.map.height = static_cast<int>(height);
  out.map.width = static_cast<int>(width);
  if (!payload) return out;

  const std::size_t n_values = static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  if (bytes.size() != 17 + 2 * n_values) {
    throw CorruptionError(r.name + ": expected " + std::to_string(17 + 2 * n_values) +
                          " bytes for a " + std::to_string(height) + "x" + std::to_string(width) +
                          " map, got " + std::to_string(bytes.size()));
  }
  out.map.indices.resize(n_values);
  for (std::size_t i = 0; i < n_values; ++i) {
    const std::uint16_t index = r.u16_le("code index");
    if (index >= out.n_entries) {
      throw CorruptionError(r.name + ": code index " + std::to_string(index) + " at position " +
                            std::to_string(i) + " exceeds n_entries " +
                            std::to_string(out.n_entries));
    }
    out.map.indices[i] = index;
  }
  return out;
}

}  // namespace

CodeMapFile read_code_map(const std::filesystem::path& path) {
  return read_code_map_impl(path, true);
}

CodeMapFile read_code_map_header(const std::filesystem::path& path) {
  return read_code_map_impl(path, false);
}

void write_codebook(const std::filesystem::path& path, const Codebook& codebook) {
  if (codebook.n_entries < 1 || codebook.dim < 1) throw DataError("cannot write an empty codebook");
  if (codebook.entries.size() !=
      static_cast<std::size_t>(codebook.n_entries) * static_cast<std::size_t>(codebook.dim)) {
    throw ShapeError("codebook buffer does not match n_entries x dim");
  }

  std::string buf;
  buf.reserve(21 + 4 * codebook.entries.size());
  buf += "SDCB";
  buf.push_back(static_cast<char>(1));  // version
  put_u32_le(buf, static_cast<std::uint32_t>(codebook.n_entries));
  put_u32_le(buf, static_cast<std::uint32_t>(codebook.dim));
  put_u64_le(buf, codebook.seed);
  for (double v : codebook.entries) put_f32_le(buf, static_cast<float>(v));
  detail::atomic_write(path, buf);
}

Codebook read_codebook(const std::filesystem::path& path) {
  const std::string bytes = slurp(path);
  ByteReader r{bytes, 0, path.string()};

  r.need(4, "magic");
  if (bytes.compare(0, 4, "SDCB") != 0) {
    throw FormatError(r.name + ": bad magic at byte 0; not a codebook file");
  }
  r.pos = 4;
  const std::uint8_t version = r.u8("version");
  if (version != 1) {
    throw FormatError(r.name + ": unsupported version " + std::to_string(version));
  }

  Codebook out;
  const std::uint32_t n_entries = r.u32_le("n_entries");
  const std::uint32_t dim = r.u32_le("dim");
  out.seed = r.u64_le("seed");
  if (n_entries == 0 || dim == 0) throw CorruptionError(r.name + ": zero codebook dimension");

  const std::size_t n_values = static_cast<std::size_t>(n_entries) * static_cast<std::size_t>(dim);
  if (bytes.size() != 21 + 4 * n_values) {
    throw CorruptionError(r.name + ": expected " + std::to_string(21 + 4 * n_values) +
                          " bytes for " + std::to_string(n_entries) + "x" + std::to_string(dim) +
                          " float32 entries, got " + std::to_string(bytes.size()));
  }
  out.n_entries = static_cast<int>(n_entries);
  out.dim = static_cast<int>(dim);
  out.entries.resize(n_values);
  for (std::size_t i = 0; i < n_values; ++i) {
    const float v = r.f32_le("entry value");
    if (!std::isfinite(v)) {
      throw CorruptionError(r.name + ": non-finite entry value at position " + std::to_string(i));
    }
    out.entries[i] = static_cast<double>(v);
  }
  return out;
}

Frame resize_pad(const Frame& frame, int target_width, int target_height, int target_channels) {
  validate_frame(frame);
  if (target_width < 1 || target_height < 1) {
    throw ConfigError("target dims must be >= 1, got " + std::to_string(target_width) + "x" +
                      std::to_string(target_height));
  }
  if (target_channels != 1 && target_channels != 3) {
    throw ConfigError("target channels must be 1 or 3, got " + std::to_string(target_channels));
  }
  if (frame.channels == 3 && target_channels == 1) {
    throw ConfigError("cannot collapse a 3-channel frame to 1 channel");
  }

  // Aspect-preserving fit: the binding axis lands exactly on the target, the
  // other is rounded (never past the target).
  int scaled_w, scaled_h;
  if (static_cast<long long>(target_width) * frame.height <=
      static_cast<long long>(target_height) * frame.width) {
    scaled_w = target_width;
    scaled_h = static_cast<int>(std::lround(static_cast<double>(frame.height) * target_width /
                                            frame.width));
  } else {
    scaled_h = target_height;
    scaled_w = static_cast<int>(std::lround(static_cast<double>(frame.width) * target_height /
                                            frame.height));
  }
  scaled_w = std::clamp(scaled_w, 1, target_width);
  scaled_h = std::clamp(scaled_h, 1, target_height);

  const int pad_top = (target_height - scaled_h) / 2;
  const int pad_left = (target_width - scaled_w) / 2;

  Frame out;
  out.width = target_width;
  out.height = target_height;
  out.channels = target_channels;
  out.pixels.assign(static_cast<std::size_t>(target_width) * static_cast<std::size_t>(target_height) *
                        static_cast<std::size_t>(target_channels),
                    0.0f);

  for (int r = 0; r < scaled_h; ++r) {
    const int src_r = static_cast<int>(static_cast<long long>(r) * frame.height / scaled_h);
    for (int c = 0; c < scaled_w; ++c) {
      const int src_c = static_cast<int>(static_cast<long long>(c) * frame.width / scaled_w);
      for (int ch = 0; ch < target_channels; ++ch) {
        const int src_ch = frame.channels == 1 ? 0 : ch;
        out.at(pad_top + r, pad_left + c, ch) = frame.at(src_r, src_c, src_ch);
      }
    }
  }
  return out;
}

namespace {

std::vector<std::filesystem::path> list_by_extension(
    const std::filesystem::path& dir, const std::vector<std::string>& extensions) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("not a directory: " + dir.string());
  }

  struct Entry {
    bool numeric;
    unsigned long long value;
    std::string filename;
    std::filesystem::path path;
  };
  std::vector<Entry> entries;
  for (const auto& item : std::filesystem::directory_iterator(dir)) {
    if (!item.is_regular_file()) continue;
    std::string ext = item.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (std::find(extensions.begin(), extensions.end(), ext) == extensions.end()) continue;

    const std::string stem = item.path().stem().string();
    const bool numeric =
        !stem.empty() && std::all_of(stem.begin(), stem.end(),
                                     [](unsigned char c) { return c >= '0' && c <= '9'; }) &&
        stem.size() <= 18;
    const unsigned long long value = numeric ? std::stoull(stem) : 0;
    entries.push_back(Entry{numeric, value, item.path().filename().string(), item.path()});
  }

  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return std::make_tuple(!a.numeric, a.value, std::cref(a.filename)) <
           std::make_tuple(!b.numeric, b.value, std::cref(b.filename));
  });

  std::vector<std::filesystem::path> paths;
  paths.reserve(entries.size());
  for (const Entry& e : entries) paths.push_back(e.path);
  return paths;
}

}  // namespace

std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir) {
  return list_by_extension(dir, {".pgm", ".ppm"});
}

std::vector<std::filesystem::path> list_code_maps(const std::filesystem::path& dir) {
  return list_by_extension(dir, {".sdcm"});
}

}  // namespace seadsc
