#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "fsmr/errors.hpp"
#include "fsmr/raster.hpp"

namespace fsmr {

namespace detail {

inline void require_match(const RasterImage& a, const RasterImage& b, const char* who) {
  require(!a.empty() && a.same_shape(b), std::string(who) + ": image dimensions differ");
}

inline double psnr_from_mse(double mse, double peak) {
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

inline double plane_sse(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double e = a[i] - b[i];
    s += e * e;
  }
  return s;
}

}  // namespace detail

// 10 log10(peak^2 / MSE), MSE over all pixels and channels.
inline double psnr(const RasterImage& reference, const RasterImage& test, double peak = 255.0) {
  detail::require_match(reference, test, "psnr");
  detail::require(peak > 0.0, "psnr: peak must be positive");
  double sse = 0.0;
  for (int c = 0; c < reference.channels(); ++c)
    sse += detail::plane_sse(reference.plane(c), test.plane(c));
  return detail::psnr_from_mse(sse / static_cast<double>(reference.data().size()), peak);
}

inline constexpr int kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;

inline std::vector<double> ssim_gaussian_window() {
  std::vector<double> g(kSsimWindow);
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double t = i - kSsimWindow / 2;
    g[i] = std::exp(-t * t / (2.0 * kSsimSigma * kSsimSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

namespace detail {

// Separable "valid" Gaussian filtering of one plane.
inline std::vector<double> filter_valid(std::span<const double> src, int w, int h,
                                        const std::vector<double>& g) {
  const int ow = w - kSsimWindow + 1, oh = h - kSsimWindow + 1;
  std::vector<double> rows(static_cast<std::size_t>(ow) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int i = 0; i < kSsimWindow; ++i) s += g[i] * src[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * ow + x] = s;
    }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y)
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int j = 0; j < kSsimWindow; ++j) s += g[j] * rows[static_cast<std::size_t>(y + j) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  return out;
}

inline double ssim_plane(std::span<const double> a, std::span<const double> b, int w, int h,
                         double peak) {
  const auto g = ssim_gaussian_window();
  const double c1 = (0.01 * peak) * (0.01 * peak), c2 = (0.03 * peak) * (0.03 * peak);
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = filter_valid(a, w, h, g), mu_b = filter_valid(b, w, h, g);
  const auto s_aa = filter_valid(aa, w, h, g), s_bb = filter_valid(bb, w, h, g),
             s_ab = filter_valid(ab, w, h, g);
  double sum = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double va = s_aa[i] - mu_a[i] * mu_a[i];
    const double vb = s_bb[i] - mu_b[i] * mu_b[i];
    const double cov = s_ab[i] - mu_a[i] * mu_b[i];
    sum += ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
           ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
  }
  return sum / static_cast<double>(mu_a.size());
}

}  // namespace detail

// Mean SSIM over all fully-contained 11x11 Gaussian (sigma 1.5) windows,
// averaged over channels.
inline double ssim(const RasterImage& reference, const RasterImage& test, double peak = 255.0) {
  detail::require_match(reference, test, "ssim");
  detail::require(peak > 0.0, "ssim: peak must be positive");
  if (reference.width() < kSsimWindow || reference.height() < kSsimWindow)
    throw contract_error("image too small for SSIM");
  double sum = 0.0;
  for (int c = 0; c < reference.channels(); ++c)
    sum += detail::ssim_plane(reference.plane(c), test.plane(c), reference.width(),
                              reference.height(), peak);
  return sum / reference.channels();
}

struct ChannelQuality {
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct QualityReport {
  double psnr_db = 0.0;
  double ssim = 0.0;
  std::vector<ChannelQuality> per_channel;
};

struct MetricOptions {
  double peak = 255.0;
  bool luma_only = false;
  bool quantize = true;  // evaluate the 8-bit encoded images
};

inline QualityReport quality_report(const RasterImage& reference, const RasterImage& test,
                                    const MetricOptions& opt = {}) {
  detail::require_match(reference, test, "quality_report");
  RasterImage ref = opt.quantize ? quantized(reference) : reference;
  RasterImage tst = opt.quantize ? quantized(test) : test;
  if (opt.luma_only && ref.channels() > 1) {
    // Luma of the stored images, kept in float so rounding is not applied twice.
    ref = luma(ref);
    tst = luma(tst);
  }
  QualityReport rep;
  rep.psnr_db = psnr(ref, tst, opt.peak);
  rep.ssim = ssim(ref, tst, opt.peak);
  for (int c = 0; c < ref.channels(); ++c) {
    const RasterImage a = extract_channel(ref, c), b = extract_channel(tst, c);
    rep.per_channel.push_back({psnr(a, b, opt.peak), ssim(a, b, opt.peak)});
  }
  return rep;
}

}  // namespace fsmr
