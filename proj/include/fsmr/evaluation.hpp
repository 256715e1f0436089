#pragma once

#include <string>
#include <vector>

#include "fsmr/geometry.hpp"
#include "fsmr/metrics.hpp"
#include "fsmr/raster.hpp"
#include "fsmr/synthetic.hpp"
#include "fsmr/warp.hpp"

namespace fsmr {

enum class TransformKind { identity, rotate, zoom, resize };

struct TransformSpec {
  TransformKind kind = TransformKind::identity;
  double value = 0.0;  // degrees for rotate, factor for zoom
  int width = 0;       // resize target
  int height = 0;
};

struct PlacedTransform {
  AffineTransform transform;
  int width = 0;
  int height = 0;
};

// Rotation and zoom act about the image center and keep the image size.
inline PlacedTransform place_transform(const TransformSpec& spec, int src_w, int src_h) {
  const double cx = 0.5 * (src_w - 1), cy = 0.5 * (src_h - 1);
  switch (spec.kind) {
    case TransformKind::identity: return {AffineTransform::identity(), src_w, src_h};
    case TransformKind::rotate: return {rotation_about(spec.value, cx, cy), src_w, src_h};
    case TransformKind::zoom: return {zoom_about(spec.value, cx, cy), src_w, src_h};
    case TransformKind::resize:
      return {resize_transform(src_w, src_h, spec.width, spec.height), spec.width, spec.height};
  }
  throw contract_error("place_transform: unknown transform");
}

struct MethodResult {
  Method method = Method::bilinear;
  RasterImage output;
  QualityReport quality;
};

struct EvaluationOptions {
  WarpOptions warp;
  MetricOptions metrics;
  double crop_fraction = 1.0;  // metrics on the centered window of this size
};

inline RasterImage evaluation_window(const RasterImage& img, double fraction) {
  return fraction >= 1.0 ? img : center_crop(img, fraction);
}

// Runs every method on the same transform and scores each output against `reference`.
inline std::vector<MethodResult> compare_methods(const RasterImage& source,
                                                 const RasterImage& reference,
                                                 const PlacedTransform& t,
                                                 const EvaluationOptions& opt) {
  std::vector<MethodResult> out;
  const RasterImage ref_win = evaluation_window(reference, opt.crop_fraction);
  for (Method m : kAllMethods) {
    MethodResult r;
    r.method = m;
    r.output = warp(source, t.transform, t.width, t.height, m, opt.warp);
    r.quality = quality_report(ref_win, evaluation_window(r.output, opt.crop_fraction), opt.metrics);
    out.push_back(std::move(r));
  }
  return out;
}

// Source = pattern on a size x size grid; reference = the pattern sampled
// exactly at the preimage of every target pixel.
struct SyntheticCase {
  RasterImage source;
  RasterImage reference;
  PlacedTransform transform;
};

inline SyntheticCase make_synthetic_case(const BandLimitedPattern& pattern, int size,
                                         const TransformSpec& spec) {
  SyntheticCase c;
  c.source = pattern.sample(size, size);
  c.transform = place_transform(spec, size, size);
  c.reference = pattern.sample_warped(c.transform.transform, c.transform.width, c.transform.height);
  return c;
}

// Round trip: forward transform onto its bounding canvas (for rotation), then
// the inverse back onto the original grid, both steps with the same method.
inline RasterImage round_trip(const RasterImage& image, const TransformSpec& spec, Method method,
                              const WarpOptions& opt) {
  PlacedTransform fwd;
  if (spec.kind == TransformKind::rotate) {
    const Canvas c = rotation_canvas(spec.value, image.width(), image.height());
    fwd = {c.transform, c.width, c.height};
  } else {
    fwd = place_transform(spec, image.width(), image.height());
  }
  const RasterImage there = warp(image, fwd.transform, fwd.width, fwd.height, method, opt);
  return warp(there, fwd.transform.inverse(), image.width(), image.height(), method, opt);
}

}  // namespace fsmr
