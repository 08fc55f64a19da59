// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/scattering.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace sarcr {

std::string ReflectionPath::name() const {
  std::string s;
  for (int i = 0; i < length; ++i) s += static_cast<char>('0' + seq[i]);
  return s;
}

const std::array<ReflectionPath, 15>& allPaths() {
  static const std::array<ReflectionPath, 15> paths = {{
      {{1, 0, 0}, 1},   {{2, 0, 0}, 1},   {{3, 0, 0}, 1},   {{1, 2, 0}, 2},   {{2, 1, 0}, 2},
      {{1, 3, 0}, 2},   {{3, 1, 0}, 2},   {{2, 3, 0}, 2},   {{3, 2, 0}, 2},   {{1, 2, 3}, 3},
      {{1, 3, 2}, 3},   {{2, 1, 3}, 3},   {{2, 3, 1}, 3},   {{3, 1, 2}, 3},   {{3, 2, 1}, 3},
  }};
  return paths;
}

ReflectionPath parsePath(const std::string& name) {
  for (const auto& p : allPaths()) {
    if (p.name() == name) return p;
  }
  fail(ErrorClass::kInvalidArgument, "UnknownPath", "no reflection path named '" + name + "'");
}

PlaneWave incidentWave(const BoresightAngles& angles, double amplitude, double phaseConstant) {
  const double st = std::sin(angles.incidencePrime), ct = std::cos(angles.incidencePrime);
  const double sp = std::sin(angles.azimuthPrime), cp = std::cos(angles.azimuthPrime);
  PlaneWave w;
  w.travelDirection = -Vec3(st * cp, st * sp, ct);
  w.magneticPolarization = Vec3(ct * cp, ct * sp, -st);
  w.amplitude = amplitude;
  w.phaseConstant = phaseConstant;
  return w;
}

namespace {

void mirror(PlaneWave& w, const Vec3& n) {
  // PEC specular reflection: both k and H reflect through the plate plane.
  w.travelDirection -= 2.0 * w.travelDirection.dot(n) * n;
  w.magneticPolarization -= 2.0 * w.magneticPolarization.dot(n) * n;
}

}  // namespace

BounceResult bouncePath(const PlaneWave& wave, const ReflectionPath& path,
                        const TrihedralGeometry& geometry) {
  BounceResult r;
  r.finalWave = wave;
  const Polygon3& first = geometry.plate(path.seq[0]);
  if (wave.travelDirection.dot(first.plane().normal) >= 0.0) return r;

  std::optional<Polygon3> lit = first;
  for (int i = 0; i + 1 < path.length; ++i) {
    mirror(r.finalWave, geometry.plate(path.seq[i]).plane().normal);
    const Polygon3& next = geometry.plate(path.seq[i + 1]);
    const double kn = r.finalWave.travelDirection.dot(next.plane().normal);
    if (kn > -kParallelTol) return r;  // grazing or back face
    lit = clipPolygons(projectPolygon(*lit, r.finalWave.travelDirection, next), next);
    if (!lit) return r;
  }
  r.illuminated = std::move(lit);
  return r;
}

SurfaceCurrent::SurfaceCurrent(const PlaneWave& wave, const Vec3& plateNormal) : wave_(wave) {
  if (wave.travelDirection.dot(plateNormal) >= 0.0) {
    fail(ErrorClass::kNumerical, "BackfaceIllumination", "wave does not hit the plate front face");
  }
  j_ = 2.0 * plateNormal.cross(wave.magneticPolarization);
}

Vec3c SurfaceCurrent::operator()(const Vec3& r) const {
  const cd phase =
      std::exp(cd(0.0, -wave_.phaseConstant * wave_.travelDirection.dot(r)));
  return (wave_.amplitude / kFreeSpaceImpedance) * phase * j_.cast<cd>();
}

std::optional<Polygon3> illuminatedRegion(const BoresightAngles& angles, const ReflectionPath& path,
                                          const TrihedralGeometry& geometry) {
  if (path.length == 1) return geometry.plate(path.seq[0]);
  return bouncePath(incidentWave(angles, 1.0, 1.0), path, geometry).illuminated;
}

namespace {

// sinh(x)/x
cd sinhc(cd x) {
  if (std::abs(x) < 1e-4) {
    const cd x2 = x * x;
    return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sinh(x) / x;
}

// First divided difference of exp.
cd dd1(cd a, cd b) { return std::exp(0.5 * (a + b)) * sinhc(0.5 * (a - b)); }

// Second divided difference of exp. Equals the integral of exp over the
// standard simplex, so 2*area*dd2 integrates exp of a linear phase over a
// triangle.
cd dd2(cd z0, cd z1, cd z2) {
  const double d01 = std::abs(z0 - z1), d12 = std::abs(z1 - z2), d02 = std::abs(z0 - z2);
  const double dmax = std::max({d01, d12, d02});
  if (dmax < 0.5) {
    const cd mu = (z0 + z1 + z2) / 3.0;
    const cd a = z0 - mu, b = z1 - mu, c = z2 - mu;
    // Complete homogeneous polynomials h_n(a,b,c) by the nested recurrence.
    cd ha = 1.0, hab = 1.0, habc = 1.0;
    cd sum = 0.5;  // h_0 / 2!
    double fact = 2.0;
    for (int n = 1; n < 40; ++n) {
      ha *= a;
      hab = ha + b * hab;
      habc = hab + c * habc;
      fact *= static_cast<double>(n + 2);
      const cd term = habc / fact;
      sum += term;
      if (n >= 3 && std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return std::exp(mu) * sum;
  }
  // Divide by the widest pair to keep cancellation benign.
  if (dmax == d01) return (dd1(z0, z2) - dd1(z2, z1)) / (z0 - z1);
  if (dmax == d12) return (dd1(z1, z0) - dd1(z0, z2)) / (z1 - z2);
  return (dd1(z0, z1) - dd1(z1, z2)) / (z0 - z2);
}

struct ClosedForm {
  double pTheta = 0.0;  // multiplies 2A/Z0
  double pPhi = 0.0;
  Vec3 c = Vec3::Zero();  // phase exp(j k c.r) on the final plate
};

ClosedForm closedForm(const ReflectionPath& path, const BoresightAngles& angles) {
  const double st = std::sin(angles.incidencePrime), ct = std::cos(angles.incidencePrime);
  const double sp = std::sin(angles.azimuthPrime), cp = std::cos(angles.azimuthPrime);
  const double c2p = std::cos(2.0 * angles.azimuthPrime);
  ClosedForm f;
  const int code = path.length == 1   ? path.seq[0]
                   : path.length == 2 ? 10 * path.seq[0] + path.seq[1]
                                      : 100 * path.seq[0] + 10 * path.seq[1] + path.seq[2];
  switch (code) {
    case 1: f = {0.0, ct, Vec3(2 * st * cp, 2 * st * sp, 0)}; break;
    case 2: f = {0.0, st * cp, Vec3(0, 2 * st * sp, 2 * ct)}; break;
    case 3: f = {0.0, st * sp, Vec3(2 * st * cp, 0, 2 * ct)}; break;
    case 12: f = {-2 * st * ct * sp, -st * cp, Vec3(0, 2 * st * sp, 0)}; break;
    case 13: f = {2 * st * ct * cp, -st * sp, Vec3(2 * st * cp, 0, 0)}; break;
    case 21: f = {-2 * ct * ct * sp * cp, -ct * c2p, Vec3(0, 2 * st * sp, 0)}; break;
    case 23: f = {-2 * st * ct * cp, st * sp, Vec3(0, 0, 2 * ct)}; break;
    case 31: f = {2 * ct * ct * sp * cp, ct * c2p, Vec3(2 * st * cp, 0, 0)}; break;
    case 32: f = {2 * st * ct * sp, st * cp, Vec3(0, 0, 2 * ct)}; break;
    // Triple bounces return along the incident line, so the phase is flat.
    case 123: f = {0.0, -st * sp, Vec3::Zero()}; break;
    case 132: f = {0.0, -st * cp, Vec3::Zero()}; break;
    case 213: f = {0.0, -st * sp, Vec3::Zero()}; break;
    case 231: f = {0.0, -ct, Vec3::Zero()}; break;
    case 312: f = {0.0, -st * cp, Vec3::Zero()}; break;
    case 321: f = {0.0, -ct, Vec3::Zero()}; break;
    default: fail(ErrorClass::kInvalidArgument, "UnknownPath", "invalid reflection path");
  }
  return f;
}

}  // namespace

cd integratePhaseTriangle(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& c, double k) {
  const double area = 0.5 * (p1 - p0).cross(p2 - p0).norm();
  const cd z0(0.0, k * c.dot(p0)), z1(0.0, k * c.dot(p1)), z2(0.0, k * c.dot(p2));
  return 2.0 * area * dd2(z0, z1, z2);
}

cd integratePhasePolygon(const Polygon3& poly, const Vec3& c, double k) {
  const auto& v = poly.vertices();
  cd sum = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) sum += integratePhaseTriangle(v[0], v[i], v[i + 1], c, k);
  return sum;
}

FarFieldComponents farFieldClosedForm(const ReflectionPath& path, const BoresightAngles& angles,
                                      const Polygon3& region, double amplitude,
                                      double phaseConstant) {
  const ClosedForm f = closedForm(path, angles);
  const cd integral = integratePhasePolygon(region, f.c, phaseConstant);
  const double scale = 2.0 * amplitude / kFreeSpaceImpedance;
  return {scale * f.pTheta * integral, scale * f.pPhi * integral};
}

FarFieldComponents farFieldIntegral(const ReflectionPath& path, const BoresightAngles& angles,
                                    const TrihedralGeometry& geometry, double amplitude,
                                    double phaseConstant) {
  const auto region = illuminatedRegion(angles, path, geometry);
  if (!region) return {};
  return farFieldClosedForm(path, angles, *region, amplitude, phaseConstant);
}

ScatterResult totalScatter(const BoresightAngles& angles, const TrihedralGeometry& geometry,
                           double range, double amplitude, double phaseConstant) {
  if (!(range > 0.0)) fail(ErrorClass::kInvalidArgument, "InvalidRange", "range must be > 0");
  ScatterResult r;
  if (!angles.inWindow()) return r;
  cd nTheta = 0.0, nPhi = 0.0;
  for (const auto& p : allPaths()) {
    const FarFieldComponents n = farFieldIntegral(p, angles, geometry, amplitude, phaseConstant);
    nTheta += n.nTheta;
    nPhi += n.nPhi;
  }
  const double k = phaseConstant;
  const cd prop = cd(0.0, -k * kFreeSpaceImpedance / (4.0 * kPi)) *
                  std::exp(cd(0.0, -k * range)) / range;
  r.eTheta = prop * nTheta;
  r.ePhi = prop * nPhi;
  r.amplitudeMagnitude = std::hypot(std::abs(r.eTheta), std::abs(r.ePhi));
  return r;
}

}  // namespace sarcr
