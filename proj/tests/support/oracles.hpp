// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference computations used by the unit tests and the
// acceptance binary. Nothing here calls the code path it checks.

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

#include "core/bbox.hpp"
#include "core/geometry.hpp"
#include "core/scattering.hpp"

namespace sarcr::oracle {

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n) : x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n)) {
    for (int i = 0; i < n; ++i) {
      double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = z;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (z * p1 - p0) / (z * z - 1.0);
        const double dz = p1 / dp;
        z -= dz;
        if (std::abs(dz) < 1e-16) break;
      }
      x[static_cast<std::size_t>(i)] = z;
      w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
  }
};

// Plate normals of the [0,a]^3 trihedral: 1 -> z, 2 -> x, 3 -> y.
inline Vec3 plateNormal(int plate) {
  return plate == 1 ? Vec3::UnitZ() : plate == 2 ? Vec3::UnitX() : Vec3::UnitY();
}

// Far-field vector potential components of one reflection path, by direct
// quadrature of  J(r) exp(j k s.r)  over `region` (the lit part of the final
// plate). J = (2A/Z0) n x h exp(-j k khat.r) with the incident wave carried
// through the earlier plates by mirror reflection. Composite Gauss-Legendre
// on each fan triangle through the collapsed-square map.
inline FarFieldComponents quadratureFarField(const ReflectionPath& path, const BoresightAngles& a,
                                             const Polygon3& region, double amplitude, double k,
                                             int panels = 12, int order = 16) {
  using cd = std::complex<double>;
  const double st = std::sin(a.incidencePrime), ct = std::cos(a.incidencePrime);
  const double sp = std::sin(a.azimuthPrime), cp = std::cos(a.azimuthPrime);
  const Vec3 toRadar(st * cp, st * sp, ct);
  Vec3 khat = -toRadar;
  Vec3 h(ct * cp, ct * sp, -st);
  for (int i = 0; i + 1 < path.length; ++i) {
    const Vec3 n = plateNormal(path.seq[static_cast<std::size_t>(i)]);
    khat -= 2.0 * khat.dot(n) * n;
    h -= 2.0 * h.dot(n) * n;
  }
  const Vec3 j = 2.0 * plateNormal(path.finalPlate()).cross(h) * (amplitude / kFreeSpaceImpedance);
  const Vec3 thetaHat(ct * cp, ct * sp, -st), phiHat(-sp, cp, 0.0);
  const double jTheta = j.dot(thetaHat), jPhi = j.dot(phiHat);
  const Vec3 c = toRadar - khat;

  const GaussLegendre gl(order);
  cd integral = 0.0;
  const auto& v = region.vertices();
  for (std::size_t t = 1; t + 1 < v.size(); ++t) {
    const Vec3 p0 = v[0], e1 = v[t] - v[0], e2 = v[t + 1] - v[t];
    const double area2 = e1.cross(v[t + 1] - v[0]).norm();  // twice the area
    for (int pu = 0; pu < panels; ++pu) {
      for (int iu = 0; iu < order; ++iu) {
        const double u = (pu + 0.5 * (gl.x[static_cast<std::size_t>(iu)] + 1.0)) / panels;
        const double wu = gl.w[static_cast<std::size_t>(iu)] * 0.5 / panels;
        for (int pv = 0; pv < panels; ++pv) {
          for (int iv = 0; iv < order; ++iv) {
            const double s = (pv + 0.5 * (gl.x[static_cast<std::size_t>(iv)] + 1.0)) / panels;
            const double wv = gl.w[static_cast<std::size_t>(iv)] * 0.5 / panels;
            const Vec3 r = p0 + u * e1 + u * s * e2;
            integral += wu * wv * area2 * u * std::exp(cd(0.0, k * c.dot(r)));
          }
        }
      }
    }
  }
  return {jTheta * integral, jPhi * integral};
}

// Fraction of the final plate that is lit along `path`, by tracing rays
// backwards from uniform points of the final plate through the earlier
// plates. Returns the lit area estimate.
inline double rayTracedLitArea(const ReflectionPath& path, const BoresightAngles& a, double side, int samples,
                               std::uint64_t seed) {
  const double st = std::sin(a.incidencePrime), ct = std::cos(a.incidencePrime);
  const double sp = std::sin(a.azimuthPrime), cp = std::cos(a.azimuthPrime);
  // Directions of travel on each leg.
  std::vector<Vec3> legs{-Vec3(st * cp, st * sp, ct)};
  for (int i = 0; i + 1 < path.length; ++i) {
    Vec3 k = legs.back();
    const Vec3 n = plateNormal(path.seq[static_cast<std::size_t>(i)]);
    legs.push_back(k - 2.0 * k.dot(n) * n);
  }
  auto onPlate = [&](int plate, const Vec3& p) {
    const double tol = 1e-12;
    for (int ax = 0; ax < 3; ++ax) {
      if (p[ax] < -tol || p[ax] > side + tol) return false;
    }
    const Vec3 n = plateNormal(plate);
    return std::abs(n.dot(p)) < 1e-9;
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, side);
  int lit = 0;
  for (int s = 0; s < samples; ++s) {
    const int finalPlate = path.finalPlate();
    Vec3 p = Vec3::Zero();
    const Vec3 n = plateNormal(finalPlate);
    int a0 = 0, a1 = 1;
    if (n.x() != 0) { a0 = 1; a1 = 2; }
    if (n.y() != 0) { a0 = 0; a1 = 2; }
    p[a0] = u(rng);
    p[a1] = u(rng);
    bool ok = legs.back().dot(n) < 0.0;
    // Walk back along each leg to the previous plate.
    for (int i = path.length - 2; ok && i >= 0; --i) {
      const int prev = path.seq[static_cast<std::size_t>(i)];
      const Vec3 np = plateNormal(prev);
      const Vec3 back = -legs[static_cast<std::size_t>(i + 1)];
      const double denom = back.dot(np);
      if (std::abs(denom) < 1e-15) { ok = false; break; }
      const double t = -np.dot(p) / denom;
      if (t <= 0.0) { ok = false; break; }
      p = p + t * back;
      ok = onPlate(prev, p) && legs[static_cast<std::size_t>(i)].dot(np) < 0.0;
    }
    lit += ok;
  }
  return side * side * static_cast<double>(lit) / samples;
}

// Monte-Carlo area of the intersection of two planar convex polygons.
inline double monteCarloOverlap(const Polygon2& a, const Polygon2& b, int samples, std::uint64_t seed) {
  auto inside = [](const Polygon2& poly, const Vec2& p) {
    const double orient = signedArea(poly) >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const Vec2 e = poly[(i + 1) % poly.size()] - poly[i], q = p - poly[i];
      if (orient * (e.x() * q.y() - e.y() * q.x()) < 0.0) return false;
    }
    return true;
  };
  double x0 = std::numeric_limits<double>::infinity(), y0 = x0, x1 = -x0, y1 = -x0;
  for (const auto& p : a) {
    x0 = std::min(x0, p.x()); x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y()); y1 = std::max(y1, p.y());
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  int hits = 0;
  for (int s = 0; s < samples; ++s) {
    const Vec2 p(ux(rng), uy(rng));
    hits += inside(a, p) && inside(b, p);
  }
  return (x1 - x0) * (y1 - y0) * hits / samples;
}

// Exhaustive search of the box loss, recomputed from scratch at every shift.
struct GridResult {
  int shiftX = 0, shiftY = 0;
  double loss = std::numeric_limits<double>::infinity();
};
inline GridResult bruteForceBox(const RealMatrix& image, const RotatedRect& base, const BBoxConfig& cfg) {
  GridResult best;
  for (int sy = -cfg.maxShiftY; sy <= cfg.maxShiftY; ++sy) {
    for (int sx = -cfg.maxShiftX; sx <= cfg.maxShiftX; ++sx) {
      RotatedRect placed = base;
      placed.centerX += sx;
      placed.centerY += sy;
      const double l = boxLoss(image, placed, base, cfg);
      if (l < best.loss - 1e-12) best = {sx, sy, l};
    }
  }
  return best;
}

}  // namespace sarcr::oracle
