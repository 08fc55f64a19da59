// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "core/errors.hpp"
#include "core/scattering.hpp"
#include "support/oracles.hpp"

using namespace sarcr;

namespace {
constexpr double kK = 2.0 * kPi / (kLightSpeed / 9.6e9);
}

TEST_SUITE("scattering") {
  TEST_CASE("fifteen named paths") {
    CHECK(allPaths().size() == 15);
    CHECK(parsePath("213").name() == "213");
    CHECK_THROWS_AS(parsePath("11"), Error);
    CHECK_THROWS_AS(parsePath("4"), Error);
  }

  TEST_CASE("closed forms agree with quadrature of the general integrand") {
    const auto g = TrihedralGeometry::make(0.3);
    for (double tp : {0.3, 0.9, 1.3}) {
      for (double pp : {0.2, 0.785, 1.4}) {
        const BoresightAngles a{tp, pp};
        for (const auto& path : allPaths()) {
          const auto region = illuminatedRegion(a, path, g);
          if (!region) continue;
          const FarFieldComponents cf = farFieldClosedForm(path, a, *region, 1.0, kK);
          const FarFieldComponents q = oracle::quadratureFarField(path, a, *region, 1.0, kK, 8, 16);
          const double scale = std::hypot(std::abs(q.nTheta), std::abs(q.nPhi));
          const double err = std::hypot(std::abs(cf.nTheta - q.nTheta), std::abs(cf.nPhi - q.nPhi));
          INFO("path " << path.name() << " at " << tp << ", " << pp);
          CHECK(err <= 1e-6 * scale);
        }
      }
    }
  }

  TEST_CASE("single and triple bounces carry no theta component") {
    const auto g = TrihedralGeometry::make(0.3);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.01, kPi / 2 - 0.01);
    for (int i = 0; i < 100; ++i) {
      const BoresightAngles a{u(rng), u(rng)};
      for (const auto& path : allPaths()) {
        if (path.length == 2) continue;
        const auto n = farFieldIntegral(path, a, g, 1.0, kK);
        CHECK(std::abs(n.nTheta) < 1e-12 * std::abs(n.nPhi) + 1e-300);
      }
    }
  }

  TEST_CASE("lit regions agree with backward ray tracing") {
    const auto g = TrihedralGeometry::make(0.3);
    for (double tp : {0.5, 0.95, 1.2}) {
      for (double pp : {0.3, 0.785}) {
        const BoresightAngles a{tp, pp};
        for (const auto& path : allPaths()) {
          if (path.length == 1) continue;
          const auto region = illuminatedRegion(a, path, g);
          const double area = region ? region->area() : 0.0;
          const double traced = oracle::rayTracedLitArea(path, a, 0.3, 40000, 9);
          INFO("path " << path.name());
          CHECK(std::abs(area - traced) < 0.03 * 0.09);
        }
      }
    }
  }

  TEST_CASE("triple bounce lit area peaks on the diagonal") {
    const auto g = TrihedralGeometry::make(0.3);
    double onAxis = 0.0, offAxis = 0.0;
    for (const auto& path : allPaths()) {
      if (path.length != 3) continue;
      if (auto r = illuminatedRegion({kDiagonalIncidence, kPi / 4}, path, g)) onAxis += r->area();
      if (auto r = illuminatedRegion({kDiagonalIncidence + 0.3, kPi / 4 + 0.3}, path, g)) offAxis += r->area();
    }
    CHECK(onAxis > offAxis);
  }

  TEST_CASE("scattered field is largest near boresight and vanishes outside the window") {
    const auto g = TrihedralGeometry::make(0.3);
    const double on = totalScatter({kDiagonalIncidence, kPi / 4}, g, 1.0, 1.0, kK).amplitudeMagnitude;
    const double off = totalScatter({kDiagonalIncidence, kPi / 4 + 0.6}, g, 1.0, 1.0, kK).amplitudeMagnitude;
    CHECK(on > 2.0 * off);
    CHECK(totalScatter({kDiagonalIncidence, -0.2}, g, 1.0, 1.0, kK).amplitudeMagnitude == 0.0);
    CHECK_THROWS_AS(totalScatter({0.5, 0.5}, g, 0.0, 1.0, kK), Error);
  }

  TEST_CASE("PO current is twice n cross H") {
    const PlaneWave w = incidentWave({0.7, 0.4}, 2.0, kK);
    const SurfaceCurrent j(w, Vec3::UnitZ());
    CHECK(j.direction().isApprox(2.0 * Vec3::UnitZ().cross(w.magneticPolarization)));
    CHECK(std::abs(j(Vec3::Zero())[0] - 2.0 / kFreeSpaceImpedance * j.direction()[0]) < 1e-15);
    CHECK_THROWS_AS(SurfaceCurrent(w, -Vec3::UnitZ()), Error);
  }
}
