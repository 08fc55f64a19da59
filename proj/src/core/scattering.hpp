// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <optional>
#include <string>

#include "core/geometry.hpp"

namespace sarcr {

using cd = std::complex<double>;
using Vec3c = Eigen::Vector3cd;

inline constexpr double kFreeSpaceImpedance = 376.730313668;  // ohms
inline constexpr double kLightSpeed = 2.99792458e8;           // m/s

// An ordered plate sequence, e.g. {1,2,3}. Plates are numbered 1..3.
struct ReflectionPath {
  std::array<int, 3> seq{0, 0, 0};
  int length = 0;

  int finalPlate() const { return seq[length - 1]; }
  std::string name() const;
  bool operator==(const ReflectionPath& o) const { return length == o.length && seq == o.seq; }
};

// 1,2,3,12,21,13,31,23,32,123,132,213,231,312,321.
const std::array<ReflectionPath, 15>& allPaths();
ReflectionPath parsePath(const std::string& name);

struct PlaneWave {
  Vec3 travelDirection;        // k_hat
  Vec3 magneticPolarization;   // h_hat
  double amplitude = 1.0;      // A^t
  double phaseConstant = 0.0;  // k
};

struct FarFieldComponents {
  cd nTheta{0.0, 0.0};
  cd nPhi{0.0, 0.0};
};

struct ScatterResult {
  cd eTheta{0.0, 0.0};
  cd ePhi{0.0, 0.0};
  double amplitudeMagnitude = 0.0;
};

struct BounceResult {
  PlaneWave finalWave;
  std::optional<Polygon3> illuminated;
};

PlaneWave incidentWave(const BoresightAngles& angles, double amplitude, double phaseConstant);

// Specular (GO) propagation through every plate of a multi-bounce path. The
// lit region of each plate is carried to the next by projection and clipping.
BounceResult bouncePath(const PlaneWave& wave, const ReflectionPath& path,
                        const TrihedralGeometry& geometry);

// PO current 2 n x H induced by a plane wave on a PEC plate.
class SurfaceCurrent {
 public:
  SurfaceCurrent(const PlaneWave& wave, const Vec3& plateNormal);
  Vec3c operator()(const Vec3& r) const;
  const Vec3& direction() const { return j_; }  // 2 n x h_hat, times A^t/Z0 in operator()

 private:
  PlaneWave wave_;
  Vec3 j_;
};

// Illuminated region of the final plate of a path; the whole plate for
// single-bounce paths. Empty when no ray survives.
std::optional<Polygon3> illuminatedRegion(const BoresightAngles& angles, const ReflectionPath& path,
                                          const TrihedralGeometry& geometry);

// Exact integral of exp(j k c.r) over a convex polygon (fan of triangles).
cd integratePhasePolygon(const Polygon3& poly, const Vec3& c, double k);
cd integratePhaseTriangle(const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& c, double k);

// Closed-form far-field integrals of one path over its illuminated region.
FarFieldComponents farFieldIntegral(const ReflectionPath& path, const BoresightAngles& angles,
                                    const TrihedralGeometry& geometry, double amplitude,
                                    double phaseConstant);

// Same as above over a caller-supplied region (used by the quadrature check).
FarFieldComponents farFieldClosedForm(const ReflectionPath& path, const BoresightAngles& angles,
                                      const Polygon3& region, double amplitude,
                                      double phaseConstant);

ScatterResult totalScatter(const BoresightAngles& angles, const TrihedralGeometry& geometry,
                           double range, double amplitude, double phaseConstant);

}  // namespace sarcr
