#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "fsmr/baselines.hpp"
#include "fsmr/block_solver.hpp"
#include "fsmr/geometry.hpp"
#include "fsmr/raster.hpp"
#include "fsmr/resample.hpp"

namespace fsmr {

enum class Method { bilinear, bicubic, fsmr };

inline constexpr Method kAllMethods[] = {Method::bilinear, Method::bicubic, Method::fsmr};

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::bilinear: return "bilinear";
    case Method::bicubic: return "bicubic";
    case Method::fsmr: return "fsmr";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  for (Method m : kAllMethods)
    if (to_string(m) == s) return m;
  return std::nullopt;
}

struct WarpOptions {
  FsmrParams fsmr;
  unsigned threads = 0;
  // FSMR only: target pixels whose preimage lies outside the source take the
  // value at the nearest point of the content, matching the edge-clamped
  // addressing of the baselines.
  bool replicate_edges = true;
};

namespace detail {

inline void replicate_outside(RasterImage& out, const AffineTransform& t, int src_w, int src_h) {
  const AffineTransform inv = t.inverse();
  const RasterImage fitted = out;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const Point s = inv.apply(x, y);
      if (s.x >= -0.5 && s.x <= src_w - 0.5 && s.y >= -0.5 && s.y <= src_h - 0.5) continue;
      const Point q = t.apply(std::clamp(s.x, 0.0, src_w - 1.0), std::clamp(s.y, 0.0, src_h - 1.0));
      const int qx = std::clamp(static_cast<int>(std::lround(q.x)), 0, out.width() - 1);
      const int qy = std::clamp(static_cast<int>(std::lround(q.y)), 0, out.height() - 1);
      for (int c = 0; c < out.channels(); ++c) out.at(c, y, x) = fitted.at(c, qy, qx);
    }
  }
}

}  // namespace detail

// Apply t to image onto a dst_w x dst_h grid. Baselines map backward; FSMR
// forward-maps the source pixels into a mesh and reconstructs the grid.
inline RasterImage warp(const RasterImage& image, const AffineTransform& t, int dst_w, int dst_h,
                        Method method, const WarpOptions& opt = {},
                        ResampleStats* stats = nullptr) {
  // Every sample already sits on its target pixel.
  if (t.is_identity() && dst_w == image.width() && dst_h == image.height()) return image;
  switch (method) {
    case Method::bilinear: return bilinear_resample(image, t, dst_w, dst_h);
    case Method::bicubic: return bicubic_resample(image, t, dst_w, dst_h);
    case Method::fsmr: {
      const MeshCloud cloud = forward_map(image, t, dst_w, dst_h, opt.fsmr.margin);
      RasterImage out = resample_to_grid(cloud, dst_w, dst_h, opt.fsmr, {opt.threads}, stats);
      if (opt.replicate_edges) detail::replicate_outside(out, t, image.width(), image.height());
      return out;
    }
  }
  throw contract_error("warp: unknown method");
}

}  // namespace fsmr
