// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/geometry.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>

#include "core/errors.hpp"

namespace sarcr {

double wrapTwoPi(double angle) {
  double w = std::fmod(angle, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  if (w >= 2.0 * kPi) w = 0.0;
  return w;
}

double degToRad(double deg) { return deg * kPi / 180.0; }
double radToDeg(double rad) { return rad * 180.0 / kPi; }

AspectAngles AspectAngles::make(double incidence, double azimuth) {
  if (!(incidence >= 0.0 && incidence <= kPi / 2.0)) {
    fail(ErrorClass::kInvalidArgument, "InvalidAngle", "incidence outside [0, pi/2]");
  }
  return AspectAngles{incidence, wrapTwoPi(azimuth)};
}

bool BoresightAngles::inWindow() const {
  return incidencePrime >= 0.0 && incidencePrime <= kPi / 2.0 && azimuthPrime >= 0.0 &&
         azimuthPrime <= kPi / 2.0;
}

Vec3 platformPosition(const PlatformPath& path, double slowTime) {
  const Vec3 local(path.standoffRange * std::sin(path.incidence), slowTime * path.speed,
                   path.standoffRange * std::cos(path.incidence));
  return Eigen::AngleAxisd(path.azimuth, Vec3::UnitZ()) * local;
}

BoresightAngles toBoresightFrame(const AspectAngles& aspect, double reflectorIncidence,
                                 double reflectorAzimuth) {
  BoresightAngles b;
  b.azimuthPrime = aspect.azimuth - (reflectorAzimuth - kPi / 4.0);
  b.incidencePrime = aspect.incidence - (reflectorIncidence - kDiagonalIncidence);
  return b;
}

namespace {

Vec3 newellNormal(const std::vector<Vec3>& v) {
  Vec3 n = Vec3::Zero();
  for (std::size_t i = 0; i < v.size(); ++i) {
    n += v[i].cross(v[(i + 1) % v.size()]);
  }
  return n;
}

// Orthonormal in-plane basis (e1, e2) with e1 x e2 = normal.
void planeBasis(const Vec3& normal, Vec3& e1, Vec3& e2) {
  const Vec3 seed = std::abs(normal.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  e1 = (seed - normal * normal.dot(seed)).normalized();
  e2 = normal.cross(e1);
}

}  // namespace

Polygon3::Polygon3(std::vector<Vec3> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    fail(ErrorClass::kInvalidArgument, "DegeneratePolygon", "fewer than 3 vertices");
  }
  const Vec3 n = newellNormal(vertices_);
  if (n.norm() == 0.0) {
    fail(ErrorClass::kInvalidArgument, "DegeneratePolygon", "zero area");
  }
  plane_.normal = n.normalized();
  Vec3 c = Vec3::Zero();
  for (const auto& p : vertices_) c += p;
  c /= static_cast<double>(vertices_.size());
  plane_.offset = plane_.normal.dot(c);
  for (const auto& p : vertices_) {
    if (std::abs(plane_.signedDistance(p)) > kCoplanarTol) {
      fail(ErrorClass::kInvalidArgument, "NotCoplanar", "vertex off the support plane");
    }
  }
}

Polygon3::Polygon3(std::vector<Vec3> vertices, const Plane& plane)
    : vertices_(std::move(vertices)), plane_(plane) {
  if (vertices_.size() < 3) {
    fail(ErrorClass::kInvalidArgument, "DegeneratePolygon", "fewer than 3 vertices");
  }
}

double Polygon3::area() const { return 0.5 * std::abs(newellNormal(vertices_).dot(plane_.normal)); }

Vec3 Polygon3::centroid() const {
  Vec3 c = Vec3::Zero();
  for (const auto& p : vertices_) c += p;
  return c / static_cast<double>(vertices_.size());
}

TrihedralGeometry TrihedralGeometry::make(double a) {
  if (!(a > 0.0)) fail(ErrorClass::kInvalidArgument, "InvalidPlateSide", "plate side must be > 0");
  TrihedralGeometry g;
  g.plateSide = a;
  // Vertex order gives each plate a normal pointing into the open octant.
  g.plates[0] = Polygon3({Vec3(0, 0, 0), Vec3(a, 0, 0), Vec3(a, a, 0), Vec3(0, a, 0)});
  g.plates[1] = Polygon3({Vec3(0, 0, 0), Vec3(0, a, 0), Vec3(0, a, a), Vec3(0, 0, a)});
  g.plates[2] = Polygon3({Vec3(0, 0, 0), Vec3(0, 0, a), Vec3(a, 0, a), Vec3(a, 0, 0)});
  return g;
}

Polygon3 projectPolygon(const Polygon3& source, const Vec3& direction, const Polygon3& target) {
  const Plane& pl = target.plane();
  const double denom = pl.normal.dot(direction);
  if (std::abs(denom) <= kParallelTol) {
    fail(ErrorClass::kNumerical, "DegenerateProjection", "direction parallel to target plane");
  }
  std::vector<Vec3> out;
  out.reserve(source.size());
  for (const auto& p : source.vertices()) {
    const double t = (pl.offset - pl.normal.dot(p)) / denom;
    out.push_back(p + t * direction);
  }
  return Polygon3(std::move(out), pl);
}

double signedArea(const Polygon2& poly) {
  double s = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    s += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * s;
}

Polygon2 clipConvex2(const Polygon2& subject, const Polygon2& clipIn) {
  if (subject.size() < 3 || clipIn.size() < 3) return {};
  Polygon2 clip = clipIn;
  if (signedArea(clip) < 0.0) std::reverse(clip.begin(), clip.end());

  Polygon2 out = subject;
  for (std::size_t e = 0; e < clip.size() && !out.empty(); ++e) {
    const Vec2 a = clip[e];
    const Vec2 b = clip[(e + 1) % clip.size()];
    const Vec2 edge = b - a;
    auto side = [&](const Vec2& p) { return edge.x() * (p.y() - a.y()) - edge.y() * (p.x() - a.x()); };
    Polygon2 in = std::move(out);
    out.clear();
    for (std::size_t i = 0; i < in.size(); ++i) {
      const Vec2& cur = in[i];
      const Vec2& prev = in[(i + in.size() - 1) % in.size()];
      const double sc = side(cur);
      const double sp = side(prev);
      if (sc >= 0.0) {
        if (sp < 0.0) out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
        out.push_back(cur);
      } else if (sp >= 0.0) {
        out.push_back(prev + (cur - prev) * (sp / (sp - sc)));
      }
    }
  }

  // Drop repeated vertices left where the subject touches a clip edge.
  Polygon2 clean;
  const double eps = 1e-14;
  for (const auto& p : out) {
    if (clean.empty() || (p - clean.back()).norm() > eps) clean.push_back(p);
  }
  while (clean.size() > 1 && (clean.front() - clean.back()).norm() <= eps) clean.pop_back();
  if (clean.size() < 3) return {};
  return clean;
}

std::optional<Polygon3> clipPolygons(const Polygon3& subject, const Polygon3& clip) {
  const Plane& pl = clip.plane();
  for (const auto& p : subject.vertices()) {
    if (std::abs(pl.signedDistance(p)) > kCoplanarTol) {
      fail(ErrorClass::kInvalidArgument, "NotCoplanar", "subject vertex off the clip plane");
    }
  }
  for (const auto& p : clip.vertices()) {
    if (std::abs(subject.plane().signedDistance(p)) > kCoplanarTol) {
      fail(ErrorClass::kInvalidArgument, "NotCoplanar", "clip vertex off the subject plane");
    }
  }

  Vec3 e1, e2;
  planeBasis(pl.normal, e1, e2);
  const Vec3 origin = clip.vertices().front();
  auto to2 = [&](const Polygon3& poly) {
    Polygon2 r;
    r.reserve(poly.size());
    for (const auto& p : poly.vertices()) r.emplace_back((p - origin).dot(e1), (p - origin).dot(e2));
    return r;
  };
  const Polygon2 s2 = to2(subject);
  const Polygon2 c2 = to2(clip);
  Polygon2 r2 = clipConvex2(s2, c2);
  if (r2.empty()) return std::nullopt;

  const double ra = std::abs(signedArea(r2));
  const double ref = std::min(std::abs(signedArea(s2)), std::abs(signedArea(c2)));
  if (!(ra > 1e-12 * ref)) return std::nullopt;
  if ((signedArea(r2) < 0.0) != (signedArea(s2) < 0.0)) std::reverse(r2.begin(), r2.end());

  std::vector<Vec3> out;
  out.reserve(r2.size());
  for (const auto& q : r2) out.push_back(origin + q.x() * e1 + q.y() * e2);
  return Polygon3(std::move(out), subject.plane());
}

}  // namespace sarcr
