#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fsmr/block_solver.hpp"
#include "fsmr/geometry.hpp"
#include "fsmr/parallel.hpp"
#include "fsmr/raster.hpp"

namespace fsmr {

struct ResampleOptions {
  unsigned threads = 0;
};

struct ResampleStats {
  std::size_t blocks = 0;
  std::size_t fallback_blocks = 0;
  std::size_t iterations = 0;  // summed over blocks and channels
};

namespace detail {

// Sample indices bucketed by block-sized cells, including the cells that
// only margin samples can fall into.
class CellIndex {
 public:
  CellIndex(const MeshCloud& cloud, int block, int margin, int blocks_x, int blocks_y)
      : block_(block), pad_((margin + block - 1) / block), nx_(blocks_x + 2 * pad_),
        ny_(blocks_y + 2 * pad_), cells_(static_cast<std::size_t>(nx_) * ny_) {
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point p = cloud.points[i];
      const double fx = std::floor((p.x + 0.5) / block) + pad_;
      const double fy = std::floor((p.y + 0.5) / block) + pad_;
      if (!(fx >= 0 && fx < nx_ && fy >= 0 && fy < ny_)) continue;
      cells_[static_cast<std::size_t>(fy) * nx_ + static_cast<std::size_t>(fx)].push_back(i);
    }
  }

  // Indices (ascending) of the samples inside [x0, x1) x [y0, y1) around block (bx, by).
  std::vector<std::size_t> gather(const MeshCloud& cloud, int bx, int by, double x0, double x1,
                                  double y0, double y1) const {
    std::vector<std::size_t> out;
    for (int cy = by - pad_; cy <= by + pad_; ++cy) {
      for (int cx = bx - pad_; cx <= bx + pad_; ++cx) {
        const int ix = cx + pad_, iy = cy + pad_;
        if (ix < 0 || ix >= nx_ || iy < 0 || iy >= ny_) continue;
        for (std::size_t i : cells_[static_cast<std::size_t>(iy) * nx_ + ix]) {
          const Point p = cloud.points[i];
          if (p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1) out.push_back(i);
        }
      }
    }
    std::ranges::sort(out);
    return out;
  }

 private:
  int block_;
  int pad_;
  int nx_, ny_;
  std::vector<std::vector<std::size_t>> cells_;
};

inline std::size_t nearest_sample(const MeshCloud& cloud, double x, double y) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double dx = cloud.points[i].x - x, dy = cloud.points[i].y - y;
    const double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace detail

// Mesh-to-grid reconstruction of every channel of `cloud` onto a width x height
// grid. Blocks are independent, so the result does not depend on the thread count.
inline RasterImage resample_to_grid(const MeshCloud& cloud, int width, int height,
                                    const FsmrParams& params, const ResampleOptions& options = {},
                                    ResampleStats* stats = nullptr) {
  params.validate();
  detail::require(width >= 1 && height >= 1, "resample_to_grid: target dims must be positive");
  detail::require(cloud.channels >= 1 && cloud.values.size() == cloud.size() * cloud.channels,
                  "resample_to_grid: malformed mesh cloud");
  if (cloud.empty()) throw numerical_error("no samples");
  for (std::size_t i = 0; i < cloud.size(); ++i)
    detail::require(std::isfinite(cloud.points[i].x) && std::isfinite(cloud.points[i].y),
                    "resample_to_grid: sample coordinates must be finite");

  const int B = params.block_size, d = params.margin, S = params.model_size();
  const int blocks_x = (width + B - 1) / B, blocks_y = (height + B - 1) / B;
  const std::size_t nblocks = static_cast<std::size_t>(blocks_x) * blocks_y;
  const int channels = cloud.channels;
  const detail::CellIndex index(cloud, B, d, blocks_x, blocks_y);
  const std::vector<double> wf = frequency_weight_table(S, params.rho_freq);

  RasterImage out(width, height, channels);
  std::vector<unsigned char> fallback(nblocks, 0);
  std::vector<std::size_t> iterations(nblocks, 0);

  parallel_for(nblocks, options.threads, [&](std::size_t bi) {
    const int bx = static_cast<int>(bi % blocks_x), by = static_cast<int>(bi / blocks_x);
    const int x0 = bx * B, y0 = by * B;
    const int w_in = std::min(B, width - x0), h_in = std::min(B, height - y0);
    const auto idx = index.gather(cloud, bx, by, x0 - 0.5 - d, x0 + B - 0.5 + d, y0 - 0.5 - d,
                                  y0 + B - 0.5 + d);
    if (idx.empty()) {
      fallback[bi] = 1;
      const std::size_t near =
          detail::nearest_sample(cloud, x0 + 0.5 * (B - 1), y0 + 0.5 * (B - 1));
      for (int c = 0; c < channels; ++c)
        for (int y = 0; y < h_in; ++y)
          for (int x = 0; x < w_in; ++x) out.at(c, y0 + y, x0 + x) = cloud.value(near, c);
      return;
    }
    std::vector<double> xs(idx.size()), ys(idx.size()), vals(idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
      xs[j] = cloud.points[idx[j]].x - x0 + d;
      ys[j] = cloud.points[idx[j]].y - y0 + d;
    }
    const BlockGeometry geo(xs, ys, S, params.rho_spatial);
    for (int c = 0; c < channels; ++c) {
      for (std::size_t j = 0; j < idx.size(); ++j) vals[j] = cloud.value(idx[j], c);
      const BlockModel model = solve_block_channel(geo, vals, params, wf);
      iterations[bi] += static_cast<std::size_t>(model.iterations_used);
      const std::vector<double> grid = evaluate_block(model, B, d);
      for (int y = 0; y < h_in; ++y)
        for (int x = 0; x < w_in; ++x) out.at(c, y0 + y, x0 + x) = grid[y * B + x];
    }
  });

  if (stats) {
    stats->blocks = nblocks;
    stats->fallback_blocks = static_cast<std::size_t>(std::ranges::count(fallback, 1));
    stats->iterations = 0;
    for (std::size_t n : iterations) stats->iterations += n;
  }
  return out;
}

}  // namespace fsmr
