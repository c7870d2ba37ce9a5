// Minimal PNG reader/writer for the one format the toolkit speaks:
// 8-bit grayscale, non-interlaced. DEFLATE is delegated to zlib; the
// container (chunk framing, scanline filters) is handled here so written
// files are byte-stable across runs.

#pragma once

#include <zlib.h>

#include <array>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpsynth/image.hpp"

namespace fpsynth {

namespace detail {

inline void put_u32_be(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

inline uint32_t read_u32_be(const uint8_t* p) {
  return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

inline void append_chunk(std::vector<uint8_t>& out, const char type[4],
                         const uint8_t* data, size_t len) {
  put_u32_be(out, static_cast<uint32_t>(len));
  const size_t type_pos = out.size();
  out.insert(out.end(), type, type + 4);
  if (len > 0) out.insert(out.end(), data, data + len);
  const uLong crc = crc32(0L, out.data() + type_pos, static_cast<uInt>(4 + len));
  put_u32_be(out, static_cast<uint32_t>(crc));
}

inline uint8_t paeth(int a, int b, int c) {
  const int p = a + b - c;
  const int pa = std::abs(p - a);
  const int pb = std::abs(p - b);
  const int pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return static_cast<uint8_t>(a);
  if (pb <= pc) return static_cast<uint8_t>(b);
  return static_cast<uint8_t>(c);
}

inline constexpr std::array<uint8_t, 8> kPngSignature = {137, 80, 78, 71, 13, 10, 26, 10};

}  // namespace detail

/// Encodes an image as an 8-bit grayscale PNG byte stream. Scanlines use
/// filter type None and a fixed zlib level, so output is deterministic.
inline std::vector<uint8_t> encode_png_gray8(const GrayImage& img) {
  const uint32_t w = static_cast<uint32_t>(img.width());
  const uint32_t h = static_cast<uint32_t>(img.height());

  std::vector<uint8_t> raw;
  raw.reserve((static_cast<size_t>(w) + 1) * h);
  for (uint32_t y = 0; y < h; ++y) {
    raw.push_back(0);  // filter: None
    const uint8_t* row = img.pixels().data() + static_cast<size_t>(y) * w;
    raw.insert(raw.end(), row, row + w);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(),
                static_cast<uLong>(raw.size()), 6) != Z_OK) {
    throw std::runtime_error("png encode: deflate failed");
  }
  compressed.resize(bound);

  std::vector<uint8_t> out;
  out.insert(out.end(), detail::kPngSignature.begin(), detail::kPngSignature.end());

  std::vector<uint8_t> ihdr;
  detail::put_u32_be(ihdr, w);
  detail::put_u32_be(ihdr, h);
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // color type: grayscale
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter method
  ihdr.push_back(0);  // interlace: none
  detail::append_chunk(out, "IHDR", ihdr.data(), ihdr.size());
  detail::append_chunk(out, "IDAT", compressed.data(), compressed.size());
  detail::append_chunk(out, "IEND", nullptr, 0);
  return out;
}

inline void write_png_gray8(const std::filesystem::path& path, const GrayImage& img) {
  const std::vector<uint8_t> bytes = encode_png_gray8(img);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f.write(reinterpret_cast<const char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("short write: " + path.string());
}

/// Decodes an 8-bit grayscale non-interlaced PNG. Anything else (color,
/// 16-bit, palette, interlaced) is rejected with a descriptive error.
inline GrayImage decode_png_gray8(const std::vector<uint8_t>& bytes,
                                  const std::string& origin = "<memory>") {
  using detail::read_u32_be;
  auto fail = [&](const std::string& why) -> void {
    throw std::runtime_error("png decode (" + origin + "): " + why);
  };

  if (bytes.size() < 8 ||
      !std::equal(detail::kPngSignature.begin(), detail::kPngSignature.end(), bytes.begin())) {
    fail("not a PNG file");
  }

  uint32_t w = 0, h = 0;
  bool have_ihdr = false;
  std::vector<uint8_t> idat;
  size_t pos = 8;
  while (pos + 8 <= bytes.size()) {
    const uint32_t len = read_u32_be(bytes.data() + pos);
    if (pos + 12 + static_cast<size_t>(len) > bytes.size()) fail("truncated chunk");
    const char* type = reinterpret_cast<const char*>(bytes.data() + pos + 4);
    const uint8_t* data = bytes.data() + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      if (len != 13) fail("bad IHDR length");
      w = read_u32_be(data);
      h = read_u32_be(data + 4);
      const uint8_t bit_depth = data[8];
      const uint8_t color_type = data[9];
      const uint8_t interlace = data[12];
      if (bit_depth != 8) fail("unsupported bit depth (only 8-bit grayscale is handled)");
      if (color_type != 0) fail("unsupported color type (only grayscale is handled)");
      if (interlace != 0) fail("interlaced PNG is not handled");
      have_ihdr = true;
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + static_cast<size_t>(len);
  }
  if (!have_ihdr) fail("missing IHDR");
  if (w == 0 || h == 0) fail("zero dimensions");
  if (idat.empty()) fail("missing IDAT");

  const size_t stride = static_cast<size_t>(w) + 1;
  std::vector<uint8_t> raw(stride * h);
  uLongf raw_len = static_cast<uLongf>(raw.size());
  const int zrc = uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size()));
  if (zrc != Z_OK || raw_len != raw.size()) fail("inflate failed or size mismatch");

  GrayImage img(static_cast<int>(w), static_cast<int>(h));
  std::vector<uint8_t>& px = img.pixels();
  for (uint32_t y = 0; y < h; ++y) {
    const uint8_t filter = raw[y * stride];
    const uint8_t* src = raw.data() + y * stride + 1;
    uint8_t* dst = px.data() + static_cast<size_t>(y) * w;
    const uint8_t* up = y > 0 ? px.data() + static_cast<size_t>(y - 1) * w : nullptr;
    switch (filter) {
      case 0:
        std::memcpy(dst, src, w);
        break;
      case 1:  // Sub
        for (uint32_t x = 0; x < w; ++x) {
          dst[x] = static_cast<uint8_t>(src[x] + (x > 0 ? dst[x - 1] : 0));
        }
        break;
      case 2:  // Up
        for (uint32_t x = 0; x < w; ++x) {
          dst[x] = static_cast<uint8_t>(src[x] + (up ? up[x] : 0));
        }
        break;
      case 3:  // Average
        for (uint32_t x = 0; x < w; ++x) {
          const int a = x > 0 ? dst[x - 1] : 0;
          const int b = up ? up[x] : 0;
          dst[x] = static_cast<uint8_t>(src[x] + ((a + b) >> 1));
        }
        break;
      case 4:  // Paeth
        for (uint32_t x = 0; x < w; ++x) {
          const int a = x > 0 ? dst[x - 1] : 0;
          const int b = up ? up[x] : 0;
          const int c = (x > 0 && up) ? up[x - 1] : 0;
          dst[x] = static_cast<uint8_t>(src[x] + detail::paeth(a, b, c));
        }
        break;
      default:
        fail("unknown scanline filter " + std::to_string(filter));
    }
  }
  return img;
}

inline GrayImage read_png_gray8(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path.string());
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                             std::istreambuf_iterator<char>());
  return decode_png_gray8(bytes, path.string());
}

}  // namespace fpsynth
