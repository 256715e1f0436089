#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "rotated_grid_points.hpp"
#include "fsmr/geometry.hpp"
#include "oracles.hpp"

using fsmr::AffineTransform;
using fsmr::Point;

namespace {

void expect_point(Point p, double x, double y, double tol) {
  EXPECT_NEAR(p.x, x, tol);
  EXPECT_NEAR(p.y, y, tol);
}

void expect_transform_near(const AffineTransform& a, const AffineTransform& b, double tol) {
  EXPECT_NEAR(a.a, b.a, tol);
  EXPECT_NEAR(a.b, b.b, tol);
  EXPECT_NEAR(a.c, b.c, tol);
  EXPECT_NEAR(a.d, b.d, tol);
  EXPECT_NEAR(a.tx, b.tx, tol);
  EXPECT_NEAR(a.ty, b.ty, tol);
}

}  // namespace

TEST(Rotation, ZeroIsIdentity) { EXPECT_TRUE(fsmr::rotation_about(0.0, 3, 4).is_identity()); }

TEST(Rotation, ThirtyDegreeCornerPoints) {
  const auto r = fsmr::rotation_about(-30.0, 3, 3);
  expect_point(r.apply(1, 1), 0.2679, 2.2679, 1e-4);
  expect_point(r.apply(5, 1), 3.7321, 0.2679, 1e-4);
}

TEST(Rotation, DeterminantAndComposition) {
  for (double a : {-45.0, -30.0, 10.0, 33.3, 90.0, 181.0}) {
    const auto r = fsmr::rotation_about(a, 2.5, -7.0);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-14);
    for (double b : {-12.0, 5.5, 60.0}) {
      const auto composed = r.after(fsmr::rotation_about(b, 2.5, -7.0));
      expect_transform_near(composed, fsmr::rotation_about(a + b, 2.5, -7.0), 1e-12);
    }
  }
}

TEST(Rotation, RejectsNonFiniteAngle) {
  EXPECT_THROW(fsmr::rotation_about(NAN, 0, 0), fsmr::contract_error);
}

TEST(Zoom, Examples) {
  EXPECT_TRUE(fsmr::zoom_about(1.0, 5, 5).is_identity());
  expect_point(fsmr::zoom_about(2.0, 0, 0).apply(3, 4), 6, 8, 0);
  expect_point(fsmr::zoom_about(0.5, 10, 10).apply(0, 0), 5, 5, 0);
  EXPECT_DOUBLE_EQ(fsmr::zoom_about(1.7, 3, 1).determinant(), 1.7 * 1.7);
  EXPECT_THROW(fsmr::zoom_about(0.0, 0, 0), fsmr::contract_error);
  EXPECT_THROW(fsmr::zoom_about(-2.0, 0, 0), fsmr::contract_error);
}

TEST(Resize, PixelCenterConvention) {
  EXPECT_TRUE(fsmr::resize_transform(37, 21, 37, 21).is_identity());
  const auto t = fsmr::resize_transform(100, 100, 224, 224);
  EXPECT_NEAR(t.apply(-0.5, 0).x, -0.5, 1e-12);
  EXPECT_NEAR(t.apply(49.5, 0).x, 111.5, 1e-12);
  EXPECT_NEAR(t.apply(99.5, 99.5).y, 223.5, 1e-12);
}

TEST(AffineTransform, InverseRoundTrip) {
  const AffineTransform t{1.3, -0.4, 0.25, 0.9, 5.0, -2.0};
  const auto inv = t.inverse();
  for (double x : {-3.0, 0.0, 17.5})
    for (double y : {-1.0, 4.25}) {
      const Point q = inv.apply(t.apply(x, y));
      expect_point(q, x, y, 1e-12);
    }
  EXPECT_THROW((AffineTransform{1, 2, 2, 4, 0, 0}.inverse()), fsmr::contract_error);
}

TEST(ForwardMap, IdentityGivesIntegerSamples) {
  const auto img = oracle::random_image(4, 4, 1, 1);
  const auto cloud = fsmr::forward_map(img, AffineTransform::identity(), 4, 4);
  ASSERT_EQ(cloud.size(), 16u);
  for (int y = 0, i = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x, ++i) {
      EXPECT_EQ(cloud.points[i].x, x);
      EXPECT_EQ(cloud.points[i].y, y);
      EXPECT_EQ(cloud.value(i, 0), img.at(0, y, x));
    }
}

TEST(ForwardMap, ThirtyDegreeGridPoints) {
  // Source pixels (0..4)^2 placed at coordinates (1..5)^2, rotated about (3, 3).
  const fsmr::RasterImage grid(5, 5, 1, 1.0);
  const auto t = fsmr::rotation_about(-30.0, 3, 3).after(AffineTransform::translation(1, 1));
  const auto cloud = fsmr::forward_map(grid, t, 7, 7, 2.0);
  ASSERT_EQ(cloud.size(), 25u);
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_NEAR(cloud.points[i].x, grid_points::kRotatedPoints[i][0], 1e-4) << i;
    EXPECT_NEAR(cloud.points[i].y, grid_points::kRotatedPoints[i][1], 1e-4) << i;
  }
}

TEST(ForwardMap, StrongZoomOutConcentratesSamples) {
  const auto img = oracle::random_image(16, 16, 1, 2);
  const auto cloud = fsmr::forward_map(img, fsmr::zoom_about(0.25, 7.5, 7.5), 16, 16);
  ASSERT_EQ(cloud.size(), 256u);
  double x0 = 1e9, x1 = -1e9, y0 = 1e9, y1 = -1e9;
  for (const Point& p : cloud.points) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  EXPECT_DOUBLE_EQ(x0, 5.625);
  EXPECT_DOUBLE_EQ(x1, 9.375);
  EXPECT_DOUBLE_EQ(y0, 5.625);
  EXPECT_DOUBLE_EQ(y1, 9.375);
  EXPECT_LE(x1 - x0, 4.0);
}

TEST(ForwardMap, DropsSamplesBeyondMargin) {
  const fsmr::RasterImage img(10, 10, 1, 0.0);
  const auto shift = AffineTransform::translation(6.0, 0.0);
  EXPECT_EQ(fsmr::forward_map(img, shift, 10, 10, 0.0).size(), 40u);  // x' = 6..9 kept
  EXPECT_EQ(fsmr::forward_map(img, shift, 10, 10, 2.0).size(), 60u);  // x' < 11.5
}

TEST(ForwardMap, InverseMappingRecoversSourceGrid) {
  std::mt19937 gen(8);
  std::uniform_real_distribution<double> ua(-45, 45), uz(0.6, 1.6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = fsmr::rotation_about(ua(gen), 6, 5).after(fsmr::zoom_about(uz(gen), 3, 4));
    const fsmr::RasterImage img(12, 10, 1, 0.0);
    const auto cloud = fsmr::forward_map(img, t, 12, 10, 1e6);
    ASSERT_EQ(cloud.size(), 120u);
    const auto inv = t.inverse();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point s = inv.apply(cloud.points[i]);
      EXPECT_NEAR(s.x, static_cast<double>(i % 12), 1e-9);
      EXPECT_NEAR(s.y, static_cast<double>(i / 12), 1e-9);
    }
  }
}

TEST(RotationCanvas, BoundingBox) {
  const auto c0 = fsmr::rotation_canvas(0.0, 30, 20);
  EXPECT_EQ(c0.width, 30);
  EXPECT_EQ(c0.height, 20);
  EXPECT_TRUE(c0.transform.is_identity());
  const auto c90 = fsmr::rotation_canvas(90.0, 30, 20);
  EXPECT_EQ(c90.width, 20);
  EXPECT_EQ(c90.height, 30);
  const auto c45 = fsmr::rotation_canvas(45.0, 10, 10);
  EXPECT_EQ(c45.width, 15);  // ceil(10 * sqrt 2)
  const Point center = c45.transform.apply(4.5, 4.5);
  EXPECT_NEAR(center.x, 7.0, 1e-12);
  EXPECT_NEAR(center.y, 7.0, 1e-12);
}
