#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fsmr/errors.hpp"

namespace fsmr {

// Regular-grid image with one 64-bit plane per channel, each plane row-major.
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(int width, int height, int channels, double fill = 0.0)
      : width_(width), height_(height), channels_(channels) {
    detail::require(width >= 1 && height >= 1 && channels >= 1,
                    "RasterImage: dimensions and channel count must be positive");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const noexcept { return data_.empty(); }

  std::span<double> plane(int c) {
    return {data_.data() + c * pixel_count(), pixel_count()};
  }
  std::span<const double> plane(int c) const {
    return {data_.data() + c * pixel_count(), pixel_count()};
  }

  double& at(int c, int y, int x) {
    return data_[c * pixel_count() + static_cast<std::size_t>(y) * width_ + x];
  }
  double at(int c, int y, int x) const {
    return data_[c * pixel_count() + static_cast<std::size_t>(y) * width_ + x];
  }

  // Edge-clamped read.
  double clamped(int c, int y, int x) const {
    return at(c, std::clamp(y, 0, height_ - 1), std::clamp(x, 0, width_ - 1));
  }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool same_shape(const RasterImage& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// 8-bit encoding: round half away from zero, clamp to [0, 255].
inline std::uint8_t quantize_u8(double v) {
  if (!(v > 0.0)) return 0;  // also maps NaN to 0
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(std::lround(v));
}

inline RasterImage quantized(const RasterImage& img) {
  RasterImage out = img;
  for (double& v : out.data()) v = quantize_u8(v);
  return out;
}

// ITU-R BT.601 luma for 3/4 channel images; first plane otherwise.
inline RasterImage luma(const RasterImage& img) {
  RasterImage out(img.width(), img.height(), 1);
  auto dst = out.plane(0);
  if (img.channels() >= 3) {
    auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
    for (std::size_t i = 0; i < dst.size(); ++i)
      dst[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  } else {
    std::ranges::copy(img.plane(0), dst.begin());
  }
  return out;
}

inline RasterImage crop(const RasterImage& img, int x0, int y0, int w, int h) {
  detail::require(x0 >= 0 && y0 >= 0 && w >= 1 && h >= 1 && x0 + w <= img.width() &&
                      y0 + h <= img.height(),
                  "crop: window outside image");
  RasterImage out(w, h, img.channels());
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
  return out;
}

inline RasterImage extract_channel(const RasterImage& img, int c) {
  detail::require(c >= 0 && c < img.channels(), "extract_channel: channel out of range");
  RasterImage out(img.width(), img.height(), 1);
  std::ranges::copy(img.plane(c), out.plane(0).begin());
  return out;
}

// Centered window of `fraction` times each dimension (at least one pixel).
inline RasterImage center_crop(const RasterImage& img, double fraction) {
  const int w = std::max(1, static_cast<int>(std::lround(img.width() * fraction)));
  const int h = std::max(1, static_cast<int>(std::lround(img.height() * fraction)));
  return crop(img, (img.width() - w) / 2, (img.height() - h) / 2, w, h);
}

}  // namespace fsmr
