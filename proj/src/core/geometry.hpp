// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>
#include <vector>

namespace sarcr {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
// Incidence of the interior diagonal of a trihedral, arctan(sqrt(2)).
inline constexpr double kDiagonalIncidence = 0.95531661812450927816;

inline constexpr double kCoplanarTol = 1e-9;   // meters
inline constexpr double kParallelTol = 1e-12;  // |cos|

double wrapTwoPi(double angle);
double degToRad(double deg);
double radToDeg(double rad);

// Platform look angles relative to the scene. Azimuth is kept in [0, 2pi).
struct AspectAngles {
  double incidence = 0.0;
  double azimuth = 0.0;

  static AspectAngles make(double incidence, double azimuth);
};

// Aspect angles re-expressed in a reflector's own frame.
struct BoresightAngles {
  double incidencePrime = 0.0;
  double azimuthPrime = 0.0;

  bool inWindow() const;  // both angles inside [0, pi/2]
};

struct PlatformPath {
  double standoffRange = 0.0;  // r0
  double speed = 0.0;
  double azimuth = 0.0;
  double incidence = 0.0;
};

Vec3 platformPosition(const PlatformPath& path, double slowTime);

BoresightAngles toBoresightFrame(const AspectAngles& aspect, double reflectorIncidence,
                                 double reflectorAzimuth);

struct Plane {
  Vec3 normal = Vec3::UnitZ();  // unit
  double offset = 0.0;          // normal . x = offset

  double signedDistance(const Vec3& p) const { return normal.dot(p) - offset; }
};

class Polygon3 {
 public:
  Polygon3() = default;
  // Support plane from Newell's method; throws DegeneratePolygon when the
  // vertices span no area or do not lie on a common plane.
  explicit Polygon3(std::vector<Vec3> vertices);
  Polygon3(std::vector<Vec3> vertices, const Plane& plane);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const Plane& plane() const { return plane_; }
  std::size_t size() const { return vertices_.size(); }
  double area() const;
  Vec3 centroid() const;

 private:
  std::vector<Vec3> vertices_;
  Plane plane_;
};

// Three orthogonal square plates occupying [0,a]^3 in the reflector frame.
// Plate 1 lies in z=0, plate 2 in x=0, plate 3 in y=0; every normal points
// into the open octant.
struct TrihedralGeometry {
  double plateSide = 0.0;
  Polygon3 plates[3];

  static TrihedralGeometry make(double plateSide);
  const Polygon3& plate(int index) const { return plates[index - 1]; }  // 1-based
};

Polygon3 projectPolygon(const Polygon3& source, const Vec3& direction, const Polygon3& target);

// Intersection of two coplanar convex polygons. Empty when the overlap has no
// area. Winding follows the subject.
std::optional<Polygon3> clipPolygons(const Polygon3& subject, const Polygon3& clip);

// Planar convex clipping shared with the bounding-box IoU.
using Polygon2 = std::vector<Vec2>;
double signedArea(const Polygon2& poly);
Polygon2 clipConvex2(const Polygon2& subject, const Polygon2& clip);

}  // namespace sarcr
