#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "fsmr/geometry.hpp"
#include "fsmr/raster.hpp"
#include "fsmr/rng.hpp"

namespace fsmr {

struct Sinusoid {
  double wx = 0.0;  // radians per pixel
  double wy = 0.0;
  double phase = 0.0;
  double amplitude = 0.0;
};

// Analytic sum of sinusoids, used as ground truth: it can be sampled exactly
// at any continuous position.
class BandLimitedPattern {
 public:
  BandLimitedPattern(std::vector<Sinusoid> components, double offset, double scale)
      : components_(std::move(components)), offset_(offset), scale_(scale) {}

  // 1..max_components sinusoids with radial frequency below max_frequency
  // (default half the Nyquist rate, pi/2), scaled into [27.5, 227.5].
  static BandLimitedPattern random(std::uint64_t seed, int max_components = 8,
                                   double max_frequency = 0.5 * std::numbers::pi) {
    CounterRng rng(seed, "band-limited-pattern");
    const int count = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_components)));
    std::vector<Sinusoid> comps;
    double amp_sum = 0.0;
    for (int i = 0; i < count; ++i) {
      const double r = rng.uniform(0.1, 0.98) * max_frequency;
      const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
      Sinusoid s{r * std::cos(th), r * std::sin(th), rng.uniform(0.0, 2.0 * std::numbers::pi),
                 rng.uniform(0.2, 1.0)};
      amp_sum += s.amplitude;
      comps.push_back(s);
    }
    return BandLimitedPattern(std::move(comps), 127.5, 100.0 / amp_sum);
  }

  double operator()(double x, double y) const {
    double v = 0.0;
    for (const Sinusoid& s : components_) v += s.amplitude * std::cos(s.wx * x + s.wy * y + s.phase);
    return offset_ + scale_ * v;
  }

  const std::vector<Sinusoid>& components() const noexcept { return components_; }

  RasterImage sample(int width, int height) const {
    return sample_warped(AffineTransform::identity(), width, height);
  }

  // Exact image of the pattern after transform t: pixel p takes f(t^-1(p)).
  RasterImage sample_warped(const AffineTransform& t, int width, int height) const {
    const AffineTransform inv = t.inverse();
    RasterImage out(width, height, 1);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        const Point s = inv.apply(x, y);
        out.at(0, y, x) = (*this)(s.x, s.y);
      }
    return out;
  }

 private:
  std::vector<Sinusoid> components_;
  double offset_;
  double scale_;
};

}  // namespace fsmr
