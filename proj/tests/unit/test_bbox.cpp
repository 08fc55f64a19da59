// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "core/bbox.hpp"
#include "core/data.hpp"
#include "core/errors.hpp"
#include "support/oracles.hpp"

using namespace sarcr;

namespace {

// Image with value `level` inside `r` plus uniform noise everywhere.
RealMatrix blob(const RotatedRect& r, double level, double noise, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, noise);
  RealMatrix img(128, 128);
  for (int i = 0; i < 128; ++i) {
    for (int j = 0; j < 128; ++j) img(i, j) = u(rng) + (r.contains(j, i) ? level : 0.0);
  }
  return img;
}

double angleDiffModPi(double a, double b) {
  const double d = std::remainder(a - b, kPi);
  return std::abs(d);
}

}  // namespace

TEST_SUITE("bbox") {
  TEST_CASE("minimum-area rectangle of a rotated rectangle") {
    RotatedRect truth{40.0, 70.0, 30.0, 12.0, 0.4};
    const Polygon2 corners = truth.corners();
    CHECK(std::abs(signedArea(corners)) == doctest::Approx(360.0));
    CHECK(signedArea(corners) > 0.0);
    const RotatedRect fit = minAreaRect(corners);
    CHECK(fit.centerX == doctest::Approx(40.0));
    CHECK(fit.centerY == doctest::Approx(70.0));
    CHECK(fit.width == doctest::Approx(30.0));
    CHECK(fit.height == doctest::Approx(12.0));
    CHECK(angleDiffModPi(fit.rotation, 0.4) < 1e-9);
    CHECK(fit.rotation >= -kPi / 2);
    CHECK(fit.rotation < kPi / 2);
  }

  TEST_CASE("reference rectangle of a thresholded blob") {
    const RotatedRect truth{64.0, 60.0, 40.0, 16.0, -0.3};
    const RealMatrix img = blob(truth, 1.0, 0.0, 1);
    const RotatedRect fit = referenceRect(img, 0.5);
    CHECK(intersectionOverUnion(fit, truth) > 0.9);
    CHECK_THROWS_AS(referenceRect(RealMatrix::Zero(128, 128), 0.5), Error);
  }

  TEST_CASE("intersection over union") {
    const RotatedRect a{10, 10, 4, 4, 0.0};
    CHECK(intersectionOverUnion(a, a) == doctest::Approx(1.0));
    RotatedRect b = a;
    b.centerX += 2;
    CHECK(intersectionOverUnion(a, b) == doctest::Approx(1.0 / 3.0));
    b.centerX += 10;
    CHECK(intersectionOverUnion(a, b) == 0.0);
    RotatedRect c = a;
    c.rotation = kPi / 2;
    CHECK(intersectionOverUnion(a, c) == doctest::Approx(1.0));
  }

  TEST_CASE("localization finds a displaced blob") {
    const RotatedRect ref{64.0, 64.0, 30.0, 12.0, 0.2};
    RotatedRect moved = ref;
    moved.centerX += 6;
    moved.centerY -= 4;
    const RealMatrix img = preprocessForBox(blob(moved, 1.0, 0.01, 4));
    BBoxConfig cfg;
    cfg.distanceWeight = 0.0;
    const BoxFit fit = localizeBox(img, 0.0, ref, cfg, SarSystemSpec{});
    CHECK(std::abs(fit.shiftX - 6) <= 1);
    CHECK(std::abs(fit.shiftY + 4) <= 1);
    CHECK(intersectionOverUnion(fit.rect, moved) > 0.8);
  }

  TEST_CASE("distance penalty keeps a featureless image centered") {
    const RotatedRect ref{64.0, 64.0, 30.0, 12.0, 0.2};
    const BoxFit fit = localizeBox(RealMatrix::Constant(128, 128, 0.5), 0.0, ref, BBoxConfig{}, SarSystemSpec{});
    CHECK(fit.shiftX == 0);
    CHECK(fit.shiftY == 0);
  }

  TEST_CASE("coarse-to-fine and exhaustive search agree with brute force") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const SarSystemSpec spec;
    for (int t = 0; t < 6; ++t) {
      const RotatedRect ref{64.0, 64.0, 26.0, 10.0, 0.5 * u(rng)};
      RotatedRect moved = ref;
      moved.centerX += 20 * u(rng);
      moved.centerY += 20 * u(rng);
      const RealMatrix img = preprocessForBox(blob(moved, 1.0, 0.3, 100 + static_cast<std::uint64_t>(t)));
      BBoxConfig cfg;
      const BoxFit exhaustive = localizeBox(img, 0.0, ref, cfg, spec);
      cfg.coarseToFine = true;
      const BoxFit fast = localizeBox(img, 0.0, ref, cfg, spec);
      CHECK(fast.shiftX == exhaustive.shiftX);
      CHECK(fast.shiftY == exhaustive.shiftY);
      const oracle::GridResult brute = oracle::bruteForceBox(img, rectAtAzimuth(ref, 0.0, spec), cfg);
      CHECK(brute.shiftX == exhaustive.shiftX);
      CHECK(brute.shiftY == exhaustive.shiftY);
      CHECK(brute.loss == doctest::Approx(exhaustive.loss).epsilon(1e-9));
    }
  }

  TEST_CASE("rectangles follow the platform azimuth") {
    const SarSystemSpec spec;
    const RotatedRect ref{70.0, 60.0, 20.0, 8.0, 0.1};
    const RotatedRect r = rectAtAzimuth(ref, 0.8, spec);
    CHECK(r.rotation == doctest::Approx(0.9));
    CHECK(r.width == ref.width);
    // The center keeps its distance from the scene center.
    CHECK(std::hypot(r.centerX - 64, r.centerY - 64) == doctest::Approx(std::hypot(6.0, -4.0)));
    CHECK(rectAtAzimuth(ref, 0.0, spec).centerX == doctest::Approx(70.0));
  }

  TEST_CASE("composite of identical chips at zero azimuth") {
    SarSample s;
    s.chip = blob({64, 64, 20, 10, 0.0}, 1.0, 0.1, 3);
    s.classLabel = "a";
    const RealMatrix c = compositeImage({s, s}, SarSystemSpec{});
    CHECK(c.minCoeff() == doctest::Approx(0.0));
    CHECK(c.maxCoeff() == doctest::Approx(1.0));
    CHECK(c(64, 64) > 0.9);
    CHECK(c(5, 5) < c(64, 64));
    CHECK_THROWS_AS(compositeImage({}, SarSystemSpec{}), Error);
  }

  TEST_CASE("preprocessing drops dim pixels") {
    RealMatrix m(1, 3);
    m << 1.0, 10.0, 1000.0;
    const RealMatrix p = preprocessForBox(m);
    CHECK(p(0, 0) == 0.0);
    CHECK(p(0, 2) == doctest::Approx(1.0));
  }

  TEST_CASE("boxes CSV") {
    const std::string csv = boxesCsv({"x"}, {RotatedRect{1, 2, 3, 4, kPi / 2}});
    CHECK(csv.rfind("sourceId,cx,cy,w,h,rot_deg\n", 0) == 0);
    CHECK(csv.find("x,1,2,3,4,90") != std::string::npos);
  }

  TEST_CASE("invalid configuration") {
    BBoxConfig cfg;
    cfg.threshold = 1.5;
    CHECK_THROWS_AS(cfg.validate(), Error);
  }
}
