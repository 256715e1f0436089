#pragma once

// Straightforward reference implementations used only by the tests. They
// follow the textbook formulas directly and share no code paths with the
// optimized library routines they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "fsmr/basis.hpp"
#include "fsmr/block_solver.hpp"
#include "fsmr/geometry.hpp"
#include "fsmr/raster.hpp"

namespace oracle {

inline fsmr::RasterImage random_image(int w, int h, int channels, std::uint32_t seed,
                                      double lo = 0.0, double hi = 255.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  fsmr::RasterImage img(w, h, channels);
  for (double& v : img.data()) v = u(gen);
  return img;
}

inline fsmr::RasterImage random_u8_image(int w, int h, int channels, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::uniform_int_distribution<int> u(0, 255);
  fsmr::RasterImage img(w, h, channels);
  for (double& v : img.data()) v = u(gen);
  return img;
}

struct Inverse {
  double a, b, c, d, tx, ty;
};

// Inverse of (x, y) -> (a x + b y + tx, c x + d y + ty) via Cramer's rule.
inline Inverse invert(const fsmr::AffineTransform& t) {
  const double det = t.a * t.d - t.b * t.c;
  return {t.d / det, -t.b / det, -t.c / det, t.a / det, (t.b * t.ty - t.d * t.tx) / det,
          (t.c * t.tx - t.a * t.ty) / det};
}

inline double pixel(const fsmr::RasterImage& img, int c, int y, int x) {
  if (x < 0) x = 0;
  if (y < 0) y = 0;
  if (x > img.width() - 1) x = img.width() - 1;
  if (y > img.height() - 1) y = img.height() - 1;
  return img.at(c, y, x);
}

inline fsmr::RasterImage bilinear(const fsmr::RasterImage& img, const fsmr::AffineTransform& t,
                                  int w, int h) {
  const Inverse inv = invert(t);
  fsmr::RasterImage out(w, h, img.channels());
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double sx = inv.a * x + inv.b * y + inv.tx;
        const double sy = inv.c * x + inv.d * y + inv.ty;
        const int ix = static_cast<int>(std::floor(sx)), iy = static_cast<int>(std::floor(sy));
        const double fx = sx - ix, fy = sy - iy;
        double v = 0.0;
        for (int j = 0; j < 2; ++j)
          for (int i = 0; i < 2; ++i)
            v += pixel(img, c, iy + j, ix + i) * (i ? fx : 1 - fx) * (j ? fy : 1 - fy);
        out.at(c, y, x) = v;
      }
  return out;
}

// Keys (1981) cubic convolution, a = -0.5, written in its expanded piecewise form.
inline double keys(double s) {
  s = std::fabs(s);
  if (s < 1.0) return 1.5 * s * s * s - 2.5 * s * s + 1.0;
  if (s < 2.0) return -0.5 * s * s * s + 2.5 * s * s - 4.0 * s + 2.0;
  return 0.0;
}

inline fsmr::RasterImage bicubic(const fsmr::RasterImage& img, const fsmr::AffineTransform& t,
                                 int w, int h) {
  const Inverse inv = invert(t);
  fsmr::RasterImage out(w, h, img.channels());
  for (int c = 0; c < img.channels(); ++c)
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double sx = inv.a * x + inv.b * y + inv.tx;
        const double sy = inv.c * x + inv.d * y + inv.ty;
        const int ix = static_cast<int>(std::floor(sx)), iy = static_cast<int>(std::floor(sy));
        double v = 0.0;
        for (int j = -1; j <= 2; ++j) {
          double row = 0.0;
          for (int i = -1; i <= 2; ++i) row += keys(sx - (ix + i)) * pixel(img, c, iy + j, ix + i);
          v += keys(sy - (iy + j)) * row;
        }
        out.at(c, y, x) = v;
      }
  return out;
}

inline double psnr(const fsmr::RasterImage& a, const fsmr::RasterImage& b, double peak) {
  double sse = 0.0;
  std::size_t n = 0;
  for (int c = 0; c < a.channels(); ++c)
    for (int y = 0; y < a.height(); ++y)
      for (int x = 0; x < a.width(); ++x) {
        const double e = a.at(c, y, x) - b.at(c, y, x);
        sse += e * e;
        ++n;
      }
  if (sse == 0.0) return INFINITY;
  return 10.0 * std::log10(peak * peak / (sse / n));
}

// Direct 2-D window loop with centered second moments.
inline double ssim(const fsmr::RasterImage& a, const fsmr::RasterImage& b, double peak) {
  constexpr int win = 11;
  double g2[win][win];
  double gsum = 0.0;
  for (int j = 0; j < win; ++j)
    for (int i = 0; i < win; ++i) {
      const double dx = i - 5, dy = j - 5;
      g2[j][i] = std::exp(-(dx * dx + dy * dy) / (2 * 1.5 * 1.5));
      gsum += g2[j][i];
    }
  for (auto& row : g2)
    for (double& v : row) v /= gsum;
  const double c1 = std::pow(0.01 * peak, 2), c2 = std::pow(0.03 * peak, 2);
  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    double sum = 0.0;
    int count = 0;
    for (int y0 = 0; y0 + win <= a.height(); ++y0)
      for (int x0 = 0; x0 + win <= a.width(); ++x0) {
        double ma = 0, mb = 0;
        for (int j = 0; j < win; ++j)
          for (int i = 0; i < win; ++i) {
            ma += g2[j][i] * a.at(c, y0 + j, x0 + i);
            mb += g2[j][i] * b.at(c, y0 + j, x0 + i);
          }
        double va = 0, vb = 0, cov = 0;
        for (int j = 0; j < win; ++j)
          for (int i = 0; i < win; ++i) {
            const double da = a.at(c, y0 + j, x0 + i) - ma, db = b.at(c, y0 + j, x0 + i) - mb;
            va += g2[j][i] * da * da;
            vb += g2[j][i] * db * db;
            cov += g2[j][i] * da * db;
          }
        sum += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
        ++count;
      }
    total += sum / count;
  }
  return total / a.channels();
}

// Literal greedy loop: residuals recomputed from the full model every
// iteration, every basis refitted with estimate_coefficient on explicitly
// evaluated basis values. Samples are block-local.
struct ReferenceModel {
  std::vector<double> coeffs;  // [k * S + l]
  std::vector<double> energies;
  std::vector<fsmr::BasisIndex> selected;
};

inline ReferenceModel reference_fsmr(const std::vector<fsmr::MeshSample>& block_samples,
                                     const fsmr::FsmrParams& p) {
  const int S = p.model_size();
  std::vector<fsmr::MeshSample> s = block_samples;
  for (auto& m : s) {
    m.x += p.margin;
    m.y += p.margin;
  }
  const std::vector<double> w = fsmr::weights_spatial(s, S, p.rho_spatial);
  ReferenceModel model;
  model.coeffs.assign(S * S, 0.0);
  auto residuals = [&] {
    std::vector<double> r(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      double g = 0.0;
      for (int k = 0; k < S; ++k)
        for (int l = 0; l < S; ++l)
          if (model.coeffs[k * S + l] != 0.0)
            g += model.coeffs[k * S + l] * fsmr::dct_basis_eval({k, l}, s[i].x, s[i].y, S);
      r[i] = s[i].value - g;
    }
    return r;
  };
  auto energy = [&](const std::vector<double>& r) {
    double e = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) e += w[i] * r[i] * r[i];
    return e;
  };
  std::vector<double> r = residuals();
  model.energies.push_back(energy(r));
  std::vector<double> phi(s.size());
  for (int it = 0; it < p.max_iterations; ++it) {
    std::vector<double> delta(S * S), coef(S * S);
    for (int k = 0; k < S; ++k)
      for (int l = 0; l < S; ++l) {
        for (std::size_t i = 0; i < s.size(); ++i) phi[i] = fsmr::dct_basis_eval({k, l}, s[i].x, s[i].y, S);
        const auto est = fsmr::estimate_coefficient(r, phi, w);
        coef[k * S + l] = est.p_hat;
        delta[k * S + l] = fsmr::energy_reduction(est.p_hat, est.denom);
      }
    const auto pick = fsmr::select_basis(delta, S, p.rho_freq);
    if (!pick) break;
    if (delta[pick->k * S + pick->l] * fsmr::weight_freq(*pick, p.rho_freq) <= p.energy_epsilon) break;
    model.coeffs[pick->k * S + pick->l] += p.gamma * coef[pick->k * S + pick->l];
    model.selected.push_back(*pick);
    r = residuals();
    model.energies.push_back(energy(r));
  }
  return model;
}

// Model evaluated at interior block pixel (x, y).
inline double reference_eval(const std::vector<double>& coeffs, const fsmr::FsmrParams& p, int x,
                             int y) {
  const int S = p.model_size();
  double g = 0.0;
  for (int k = 0; k < S; ++k)
    for (int l = 0; l < S; ++l)
      g += coeffs[k * S + l] * fsmr::dct_basis_eval({k, l}, x + p.margin, y + p.margin, S);
  return g;
}

// Percentile by brute force: for sorted values v and q, the value at rank
// q*(n-1) interpolated between its two neighbours, computed from scratch.
inline double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double rank = q * (v.size() - 1);
  const double lo = std::floor(rank);
  const double frac = rank - lo;
  const std::size_t i = static_cast<std::size_t>(lo);
  if (frac == 0.0) return v[i];
  return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

inline double population_std(const std::vector<double>& v) {
  long double mean = 0;
  for (double x : v) mean += x;
  mean /= v.size();
  long double var = 0;
  for (double x : v) var += (x - mean) * (x - mean);
  return std::sqrt(static_cast<double>(var / v.size()));
}

}  // namespace oracle
