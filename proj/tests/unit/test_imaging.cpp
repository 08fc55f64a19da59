// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "core/attack.hpp"
#include "core/errors.hpp"
#include "core/image_io.hpp"
#include "core/imaging.hpp"
#include "core/point_response.hpp"

using namespace sarcr;

TEST_SUITE("imaging") {
  TEST_CASE("spec defaults and validation") {
    SarSystemSpec s;
    CHECK_NOTHROW(s.validate());
    CHECK(s.undersampled());
    CHECK(s.chirpRate() == doctest::Approx(591e6 / 5e-6));
    s.prf = -1.0;
    CHECK_THROWS_AS(s.validate(), Error);
  }

  TEST_CASE("pixel mapping round trip and orientation") {
    const SarSystemSpec s;
    for (double az : {0.0, 0.7, 3.5}) {
      const Vec2 p = groundToPixel(3.0, -2.0, az, s);
      const Vec2 g = pixelToGround(p.x(), p.y(), az, s);
      CHECK(g.x() == doctest::Approx(3.0));
      CHECK(g.y() == doctest::Approx(-2.0));
    }
    const Vec2 center = groundToPixel(0.0, 0.0, 1.0, s);
    CHECK(center.x() == doctest::Approx(64.0));
    CHECK(center.y() == doctest::Approx(64.0));
    // Moving toward the radar at azimuth 0 (along +x) increases the row.
    CHECK(groundToPixel(0.3, 0.0, 0.0, s).x() == doctest::Approx(65.0));
  }

  TEST_CASE("quadrature demodulation recovers the baseband chirp") {
    const SarSystemSpec s;
    const double rf = 8 * s.sampleRate;
    const double tau = 2.0e-7, t0 = 0.0;
    const int n = static_cast<int>(8e-6 * rf);
    const auto pass = passbandEcho(s, 1.0, tau, t0, rf, n);
    const auto base = quadratureDemodulate(pass, rf, t0, s);
    // Magnitude inside the pulse is the amplitude, outside it vanishes.
    const int mid = static_cast<int>((tau + s.pulseDuration / 2) * s.sampleRate);
    CHECK(std::abs(base[static_cast<std::size_t>(mid)]) == doctest::Approx(1.0).epsilon(0.05));
    const int after = static_cast<int>((tau + s.pulseDuration + 1e-6) * s.sampleRate);
    REQUIRE(after < static_cast<int>(base.size()));
    CHECK(std::abs(base[static_cast<std::size_t>(after)]) < 0.05);
  }

  TEST_CASE("out-of-swath reflectors are rejected") {
    const SarSystemSpec s;
    const AspectAngles a = AspectAngles::make(degToRad(75), 0.0);
    const ImagingPlan plan = planImaging(s, a.incidence);
    CHECK_NOTHROW(checkSwath(5.0, 5.0, a, s, plan));
    CHECK_THROWS_AS(checkSwath(500.0, 0.0, a, s, plan), Error);
  }

  TEST_CASE("full chain focuses a point at its predicted pixel") {
    const SarSystemSpec s;
    const AspectAngles a = AspectAngles::make(degToRad(75), degToRad(40));
    const ImagingPlan plan = planImaging(s, a.incidence);
    const EchoMatrix e = synthesizePointEcho(2.1, -3.3, 1.0, a, s, plan);
    const ComplexImage img = focusRDA(e, s);
    Eigen::Index r = 0, c = 0;
    img.pixels.cwiseAbs().maxCoeff(&r, &c);
    const Vec2 pred = groundToPixel(2.1, -3.3, a.azimuth, s);
    CHECK(std::abs(r - pred.x()) <= 1.0);
    CHECK(std::abs(c - pred.y()) <= 1.0);
  }

  TEST_CASE("tabulated renderer matches the full chain and is linear") {
    const SarSystemSpec s;
    const AspectAngles a = AspectAngles::make(degToRad(75), degToRad(106.2));
    const std::vector<ReflectorConfig> rs = {{0.31, -2.91, degToRad(66.3), degToRad(16.3)},
                                             {-1.62, -1.80, degToRad(65.0), degToRad(106.3)}};
    const ComplexImage full = imagePerturbation(rs, a, s);
    const PointResponseRenderer pr(s, a.incidence);
    const ComplexImage fast = pr.renderReflectors(rs, a);
    const double peak = full.pixels.cwiseAbs().maxCoeff();
    REQUIRE(peak > 0.0);
    CHECK((full.pixels - fast.pixels).cwiseAbs().maxCoeff() <= 0.013 * peak);

    const ComplexImage one = pr.renderReflectors({rs[0]}, a), two = pr.renderReflectors({rs[1]}, a);
    CHECK((one.pixels + two.pixels - fast.pixels).cwiseAbs().maxCoeff() <= 1e-12 * peak);
  }

  TEST_CASE("no reflectors give a blank image") {
    const SarSystemSpec s;
    const ComplexImage img = ChainRenderer(s).render({}, AspectAngles::make(degToRad(75), 0.0));
    CHECK(img.pixels.rows() == 128);
    CHECK(img.pixels.cwiseAbs().maxCoeff() == 0.0);
  }

  TEST_CASE("CIMG round trip and corrupt input") {
    ComplexImage img;
    img.pixels = ComplexMatrix::Random(5, 7);
    const auto bytes = encodeCimg(img);
    CHECK(bytes.size() == 16 + 16 * 35);
    const ComplexImage back = decodeCimg(bytes.data(), bytes.size());
    CHECK(back.pixels == img.pixels);
    CHECK_THROWS_AS(decodeCimg(bytes.data(), bytes.size() - 1), Error);
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(decodeCimg(bad.data(), bad.size()), Error);
  }
}
