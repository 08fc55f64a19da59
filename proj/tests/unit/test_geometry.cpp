// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "support/oracles.hpp"

using namespace sarcr;

TEST_SUITE("geometry") {
  TEST_CASE("angle helpers") {
    CHECK(wrapTwoPi(-0.5) == doctest::Approx(2 * kPi - 0.5));
    CHECK(wrapTwoPi(2 * kPi) == doctest::Approx(0.0));
    CHECK(radToDeg(degToRad(123.4)) == doctest::Approx(123.4));
    CHECK(std::atan(std::sqrt(2.0)) == doctest::Approx(kDiagonalIncidence).epsilon(1e-15));
  }

  TEST_CASE("boresight aspect maps to the interior diagonal") {
    const double thr = degToRad(60.0), phr = degToRad(30.0);
    const BoresightAngles b = toBoresightFrame(AspectAngles::make(thr, phr), thr, phr);
    CHECK(b.incidencePrime == doctest::Approx(kDiagonalIncidence).epsilon(1e-9));
    CHECK(b.azimuthPrime == doctest::Approx(kPi / 4).epsilon(1e-9));
    CHECK(b.inWindow());
  }

  TEST_CASE("looking at the back of the reflector leaves the window") {
    const BoresightAngles b = toBoresightFrame(AspectAngles::make(degToRad(75), kPi), kDiagonalIncidence, 0.0);
    CHECK_FALSE(b.inWindow());
  }

  TEST_CASE("polygon area and plane") {
    const Polygon3 sq({Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(2, 1, 0), Vec3(0, 1, 0)});
    CHECK(sq.area() == doctest::Approx(2.0));
    CHECK(std::abs(sq.plane().normal.z()) == doctest::Approx(1.0));
    CHECK(sq.centroid().isApprox(Vec3(1, 0.5, 0)));
  }

  TEST_CASE("degenerate polygons are rejected") {
    CHECK_THROWS_AS(Polygon3({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)}), Error);
    CHECK_THROWS_AS(Polygon3({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0.5)}), Error);
  }

  TEST_CASE("trihedral plates") {
    const auto g = TrihedralGeometry::make(0.3);
    for (int i = 1; i <= 3; ++i) {
      CHECK(g.plate(i).area() == doctest::Approx(0.09));
      CHECK(g.plate(i).plane().normal.isApprox(oracle::plateNormal(i)));
    }
  }

  TEST_CASE("coplanar clipping against Monte Carlo") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 10; ++t) {
      // Two random convex quadrilaterals from rotated, shifted rectangles.
      auto rect = [&](double cx, double cy, double w, double h, double a) {
        Polygon2 p;
        for (auto [sx, sy] : {std::pair{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}) {
          const double x = sx * w / 2, y = sy * h / 2;
          p.emplace_back(cx + x * std::cos(a) - y * std::sin(a), cy + x * std::sin(a) + y * std::cos(a));
        }
        return p;
      };
      const Polygon2 a = rect(0, 0, 1.5, 1.0, u(rng)), b = rect(0.4 * u(rng), 0.4 * u(rng), 1.0, 1.2, u(rng));
      const Polygon2 c = clipConvex2(a, b);
      const double exact = c.size() >= 3 ? std::abs(signedArea(c)) : 0.0;
      const double mc = oracle::monteCarloOverlap(a, b, 200000, 17 + static_cast<std::uint64_t>(t));
      CHECK(exact == doctest::Approx(mc).epsilon(0.02));

      // Same pair lifted into 3D.
      std::vector<Vec3> a3, b3;
      for (const auto& p : a) a3.emplace_back(p.x(), p.y(), 0.0);
      for (const auto& p : b) b3.emplace_back(p.x(), p.y(), 0.0);
      const auto clipped = clipPolygons(Polygon3(a3), Polygon3(b3));
      REQUIRE(clipped.has_value());
      CHECK(clipped->area() == doctest::Approx(exact).epsilon(1e-9));
    }
  }

  TEST_CASE("disjoint polygons clip to nothing") {
    const Polygon3 a({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)});
    const Polygon3 b({Vec3(2, 0, 0), Vec3(3, 0, 0), Vec3(3, 1, 0), Vec3(2, 1, 0)});
    CHECK_FALSE(clipPolygons(a, b).has_value());
  }

  TEST_CASE("projection onto a plate preserves the ray geometry") {
    const auto g = TrihedralGeometry::make(0.3);
    const Vec3 d = Vec3(-1, -0.2, 0.3).normalized();
    const Polygon3 img = projectPolygon(g.plate(1), d, g.plate(2));
    for (std::size_t i = 0; i < img.size(); ++i) {
      CHECK(std::abs(img.vertices()[i].x()) < 1e-12);
      const Vec3 diff = img.vertices()[i] - g.plate(1).vertices()[i];
      CHECK(diff.normalized().cross(d).norm() < 1e-9);
    }
  }

  TEST_CASE("platform path is straight and uniform") {
    const PlatformPath p{5000.0, 50.0, 0.3, degToRad(75)};
    const Vec3 a = platformPosition(p, -1.0), b = platformPosition(p, 0.0), c = platformPosition(p, 1.0);
    CHECK((b - a).norm() == doctest::Approx(50.0));
    CHECK(((c - b) - (b - a)).norm() < 1e-9);
    CHECK(b.norm() == doctest::Approx(5000.0));
  }
}
