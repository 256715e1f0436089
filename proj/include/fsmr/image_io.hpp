#pragma once

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <system_error>
#include <vector>

#include "fsmr/errors.hpp"
#include "fsmr/raster.hpp"

namespace fsmr {

namespace detail {

inline std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline RasterImage from_interleaved(const std::uint8_t* px, int w, int h, int channels) {
  RasterImage img(w, h, channels);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c)
        img.at(c, y, x) = px[(static_cast<std::size_t>(y) * w + x) * channels + c];
  return img;
}

inline std::vector<std::uint8_t> to_interleaved(const RasterImage& img) {
  std::vector<std::uint8_t> px(img.pixel_count() * img.channels());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c)
        px[(static_cast<std::size_t>(y) * img.width() + x) * img.channels() + c] =
            quantize_u8(img.at(c, y, x));
  return px;
}

inline RasterImage decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw io_error("corrupt PNG " + name + ": " + image.message);
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> px(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, px.data(), 0, nullptr)) {
    png_image_free(&image);
    throw io_error("corrupt PNG " + name + ": " + image.message);
  }
  return from_interleaved(px.data(), static_cast<int>(image.width),
                          static_cast<int>(image.height), color ? 3 : 1);
}

// Binary P5/P6 or ASCII P2/P3, maxval <= 255.
inline RasterImage decode_pnm(const std::vector<std::uint8_t>& bytes, const std::string& name) {
  std::size_t pos = 2;
  auto bad = [&](const char* why) { return io_error("corrupt PNM " + name + ": " + why); };
  auto skip_ws = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_ws();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) throw bad("malformed header");
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos++] - '0');
      if (v > 1 << 24) throw bad("value out of range");
    }
    return static_cast<int>(v);
  };
  const char kind = static_cast<char>(bytes[1]);
  const int channels = (kind == '3' || kind == '6') ? 3 : 1;
  const bool ascii = kind == '2' || kind == '3';
  const int w = read_int(), h = read_int(), maxval = read_int();
  if (w < 1 || h < 1 || maxval < 1 || maxval > 255) throw bad("unsupported dimensions or maxval");
  const std::size_t count = static_cast<std::size_t>(w) * h * channels;
  std::vector<std::uint8_t> px(count);
  if (ascii) {
    for (std::size_t i = 0; i < count; ++i) px[i] = static_cast<std::uint8_t>(std::min(read_int(), maxval));
  } else {
    ++pos;  // single whitespace after maxval
    if (bytes.size() < pos + count) throw bad("truncated pixel data");
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), count, px.begin());
  }
  if (maxval != 255)
    for (auto& v : px) v = static_cast<std::uint8_t>(std::lround(v * 255.0 / maxval));
  return from_interleaved(px.data(), w, h, channels);
}

inline std::string lower_extension(const std::filesystem::path& p) {
  std::string ext = p.extension().string();
  std::ranges::transform(ext, ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace detail

// PNG (8-bit gray or RGB after conversion) or PNM, detected from content.
inline RasterImage read_image(const std::filesystem::path& path) {
  const auto bytes = detail::read_bytes(path);
  static constexpr std::uint8_t kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngSig, kPngSig + 8, bytes.begin()))
    return detail::decode_png(bytes, path.string());
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] >= '2' && bytes[1] <= '6' && bytes[1] != '4')
    return detail::decode_pnm(bytes, path.string());
  throw io_error("unrecognized image format: " + path.string());
}

// Writes through a temporary file and renames it into place, so a failed
// write never leaves a partial image at `path`. 1 or 3 channels; PNG unless
// the extension is .ppm/.pgm/.pnm.
inline void write_image(const std::filesystem::path& path, const RasterImage& img) {
  detail::require(img.channels() == 1 || img.channels() == 3,
                  "write_image: only gray or RGB images can be encoded");
  const auto dir = path.parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  auto tmp = path;
  tmp += ".partial";
  const auto px = detail::to_interleaved(img);
  const std::string ext = detail::lower_extension(path);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
    std::ofstream out(tmp, std::ios::binary);
    out << (img.channels() == 3 ? "P6" : "P5") << '\n'
        << img.width() << ' ' << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw io_error("cannot write " + path.string());
    }
  } else {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width());
    image.height = static_cast<png_uint_32>(img.height());
    image.format = img.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, tmp.string().c_str(), 0, px.data(), 0, nullptr)) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw io_error("cannot write " + path.string() + ": " + image.message);
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fsmr
