#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "fsmr/errors.hpp"
#include "fsmr/raster.hpp"

namespace fsmr {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// (x, y) -> (a*x + b*y + tx, c*x + d*y + ty). Pixel centers sit on integer
// coordinates; an image of width W covers [-0.5, W - 0.5].
struct AffineTransform {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double tx = 0.0, ty = 0.0;

  static AffineTransform identity() { return {}; }
  static AffineTransform translation(double dx, double dy) { return {1, 0, 0, 1, dx, dy}; }

  Point apply(double x, double y) const { return {a * x + b * y + tx, c * x + d * y + ty}; }
  Point apply(Point p) const { return apply(p.x, p.y); }

  double determinant() const { return a * d - b * c; }
  bool invertible() const { return determinant() != 0.0 && std::isfinite(determinant()); }

  AffineTransform inverse() const {
    const double det = determinant();
    detail::require(invertible(), "AffineTransform: transform is not invertible");
    const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
    return {ia, ib, ic, id, -(ia * tx + ib * ty), -(ic * tx + id * ty)};
  }

  // (*this)(other(p))
  AffineTransform after(const AffineTransform& o) const {
    return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d,
            a * o.tx + b * o.ty + tx, c * o.tx + d * o.ty + ty};
  }

  bool is_identity() const {
    return a == 1.0 && b == 0.0 && c == 0.0 && d == 1.0 && tx == 0.0 && ty == 0.0;
  }
};

// Positive angles rotate counter-clockwise in mathematical (y-up) orientation.
inline AffineTransform rotation_about(double angle_degrees, double cx, double cy) {
  detail::require(std::isfinite(angle_degrees), "rotation_about: angle must be finite");
  if (angle_degrees == 0.0) return AffineTransform::identity();
  const double th = angle_degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(th), sn = std::sin(th);
  return {cs, -sn, sn, cs, cx - cs * cx + sn * cy, cy - sn * cx - cs * cy};
}

inline AffineTransform zoom_about(double factor, double cx, double cy) {
  detail::require(factor > 0.0 && std::isfinite(factor), "zoom_about: factor must be positive");
  return {factor, 0.0, 0.0, factor, cx - factor * cx, cy - factor * cy};
}

// Source pixel centers onto target pixel centers: x' = (x + 0.5) * dst/src - 0.5.
inline AffineTransform resize_transform(int src_w, int src_h, int dst_w, int dst_h) {
  detail::require(src_w >= 1 && src_h >= 1 && dst_w >= 1 && dst_h >= 1,
                  "resize_transform: dimensions must be positive");
  if (src_w == dst_w && src_h == dst_h) return AffineTransform::identity();
  const double sx = static_cast<double>(dst_w) / src_w;
  const double sy = static_cast<double>(dst_h) / src_h;
  return {sx, 0.0, 0.0, sy, 0.5 * sx - 0.5, 0.5 * sy - 0.5};
}

struct Canvas {
  AffineTransform transform;
  int width = 0;
  int height = 0;
};

// Rotation about the image center onto a canvas sized to the rotated bounding
// box, with the source center landing on the canvas center.
inline Canvas rotation_canvas(double angle_degrees, int src_w, int src_h) {
  const double cx = 0.5 * (src_w - 1), cy = 0.5 * (src_h - 1);
  const AffineTransform rot = rotation_about(angle_degrees, cx, cy);
  const std::array<Point, 4> corners{Point{-0.5, -0.5}, Point{src_w - 0.5, -0.5},
                                     Point{-0.5, src_h - 0.5}, Point{src_w - 0.5, src_h - 0.5}};
  double x0 = 1e300, x1 = -1e300, y0 = 1e300, y1 = -1e300;
  for (Point p : corners) {
    const Point q = rot.apply(p);
    x0 = std::min(x0, q.x);
    x1 = std::max(x1, q.x);
    y0 = std::min(y0, q.y);
    y1 = std::max(y1, q.y);
  }
  // Snap away float noise so that e.g. 90 degrees keeps exact dimensions.
  const int w = std::max(1, static_cast<int>(std::ceil(x1 - x0 - 1e-9)));
  const int h = std::max(1, static_cast<int>(std::ceil(y1 - y0 - 1e-9)));
  const double ncx = 0.5 * (w - 1), ncy = 0.5 * (h - 1);
  return {AffineTransform::translation(ncx - cx, ncy - cy).after(rot), w, h};
}

// Scattered samples in target-grid coordinates. values[i * channels + c].
struct MeshCloud {
  std::vector<Point> points;
  std::vector<double> values;
  int channels = 1;
  int source_width = 0, source_height = 0;
  int target_width = 0, target_height = 0;

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  double value(std::size_t i, int c) const { return values[i * channels + c]; }
};

// One sample per source pixel at t(x, y); samples beyond the target extended
// by `margin` pixels on each side are dropped. Row-major source order.
inline MeshCloud forward_map(const RasterImage& image, const AffineTransform& t, int target_w,
                             int target_h, double margin = 0.0) {
  detail::require(t.invertible(), "forward_map: transform must be invertible");
  detail::require(target_w >= 1 && target_h >= 1, "forward_map: target dims must be positive");
  detail::require(margin >= 0.0, "forward_map: margin must be non-negative");
  MeshCloud cloud;
  cloud.channels = image.channels();
  cloud.source_width = image.width();
  cloud.source_height = image.height();
  cloud.target_width = target_w;
  cloud.target_height = target_h;
  const double lo_x = -0.5 - margin, hi_x = target_w - 0.5 + margin;
  const double lo_y = -0.5 - margin, hi_y = target_h - 0.5 + margin;
  cloud.points.reserve(image.pixel_count());
  cloud.values.reserve(image.pixel_count() * image.channels());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const Point p = t.apply(x, y);
      if (!(p.x >= lo_x && p.x < hi_x && p.y >= lo_y && p.y < hi_y)) continue;
      cloud.points.push_back(p);
      for (int c = 0; c < image.channels(); ++c) cloud.values.push_back(image.at(c, y, x));
    }
  }
  return cloud;
}

}  // namespace fsmr
