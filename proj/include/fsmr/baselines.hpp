#pragma once

#include <cmath>

#include "fsmr/geometry.hpp"
#include "fsmr/raster.hpp"

namespace fsmr {

// Keys cubic convolution kernel.
inline double keys_kernel(double t, double a = -0.5) {
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

// Backward-mapping bilinear warp with edge-clamped addressing.
inline RasterImage bilinear_resample(const RasterImage& image, const AffineTransform& t,
                                     int dst_w, int dst_h) {
  const AffineTransform inv = t.inverse();
  RasterImage out(dst_w, dst_h, image.channels());
  for (int y = 0; y < dst_h; ++y) {
    for (int x = 0; x < dst_w; ++x) {
      const Point s = inv.apply(x, y);
      const double fx0 = std::floor(s.x), fy0 = std::floor(s.y);
      const double fx = s.x - fx0, fy = s.y - fy0;
      const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
      for (int c = 0; c < image.channels(); ++c) {
        const double top =
            image.clamped(c, y0, x0) * (1.0 - fx) + image.clamped(c, y0, x0 + 1) * fx;
        const double bot =
            image.clamped(c, y0 + 1, x0) * (1.0 - fx) + image.clamped(c, y0 + 1, x0 + 1) * fx;
        out.at(c, y, x) = top * (1.0 - fy) + bot * fy;
      }
    }
  }
  return out;
}

// Backward-mapping bicubic warp, 4x4 Keys kernel (a = -0.5), edge-clamped.
inline RasterImage bicubic_resample(const RasterImage& image, const AffineTransform& t, int dst_w,
                                    int dst_h) {
  const AffineTransform inv = t.inverse();
  RasterImage out(dst_w, dst_h, image.channels());
  double wx[4], wy[4];
  for (int y = 0; y < dst_h; ++y) {
    for (int x = 0; x < dst_w; ++x) {
      const Point s = inv.apply(x, y);
      const double fx0 = std::floor(s.x), fy0 = std::floor(s.y);
      const int x0 = static_cast<int>(fx0), y0 = static_cast<int>(fy0);
      for (int i = 0; i < 4; ++i) {
        wx[i] = keys_kernel(s.x - (fx0 + i - 1));
        wy[i] = keys_kernel(s.y - (fy0 + i - 1));
      }
      for (int c = 0; c < image.channels(); ++c) {
        double acc = 0.0;
        for (int j = 0; j < 4; ++j) {
          double row = 0.0;
          for (int i = 0; i < 4; ++i) row += wx[i] * image.clamped(c, y0 + j - 1, x0 + i - 1);
          acc += wy[j] * row;
        }
        out.at(c, y, x) = acc;
      }
    }
  }
  return out;
}

}  // namespace fsmr
