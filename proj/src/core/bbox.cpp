// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/bbox.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "core/errors.hpp"
#include "core/interp.hpp"

namespace sarcr {

Polygon2 RotatedRect::corners() const {
  const Vec2 u(std::cos(rotation), std::sin(rotation)), v(-std::sin(rotation), std::cos(rotation));
  const Vec2 c(centerX, centerY);
  const Vec2 hu = u * (width / 2), hv = v * (height / 2);
  // Counter-clockwise in (x, y).
  return {c - hu - hv, c + hu - hv, c + hu + hv, c - hu + hv};
}

bool RotatedRect::contains(double x, double y) const {
  const double dx = x - centerX, dy = y - centerY;
  const double a = dx * std::cos(rotation) + dy * std::sin(rotation);
  const double b = -dx * std::sin(rotation) + dy * std::cos(rotation);
  return std::abs(a) <= width / 2 && std::abs(b) <= height / 2;
}

void BBoxConfig::validate() const {
  auto bad = [](const std::string& m) { fail(ErrorClass::kConfig, "InvalidBoxConfig", m); };
  if (!(threshold >= 0.0 && threshold <= 1.0)) bad("threshold must be in [0, 1]");
  if (!(verticalExponent > 0.0)) bad("alpha must be > 0");
  if (!(distanceExponent > 0.0)) bad("beta must be > 0");
  if (!(distanceWeight >= 0.0)) bad("lambda must be >= 0");
  if (maxShiftX < 0 || maxShiftY < 0 || maxShiftX + maxShiftY == 0) bad("maxShift must be positive");
}

namespace {

// Log magnitude with a fixed dynamic range below the image maximum, then
// min-max to [0, 1]. A fixed floor keeps the thresholds at fixed levels
// relative to the peak instead of depending on the darkest pixel.
constexpr double kLogFloorDb = -40.0;

RealMatrix logMinMax(const RealMatrix& img) {
  const double peak = img.maxCoeff();
  RealMatrix out = RealMatrix::Zero(img.rows(), img.cols());
  if (!(peak > 0.0)) return out;
  const double floor = peak * std::pow(10.0, kLogFloorDb / 20.0);
  for (Eigen::Index i = 0; i < img.size(); ++i) out.data()[i] = std::log(std::max(img.data()[i], floor));
  const double lo = out.minCoeff(), hi = out.maxCoeff();
  if (hi > lo) {
    out = (out.array() - lo) / (hi - lo);
  } else {
    out.setZero();
  }
  return out;
}

}  // namespace

RealMatrix compositeImage(const std::vector<SarSample>& samples, const SarSystemSpec& spec) {
  if (samples.empty()) fail(ErrorClass::kData, "EmptyGroup", "no samples for the composite");
  const Eigen::Index rows = samples.front().chip.rows(), cols = samples.front().chip.cols();
  // Each pixel averages the chips that cover it after rotation.
  RealMatrix sum = RealMatrix::Zero(rows, cols), count = RealMatrix::Zero(rows, cols);
  for (const auto& s : samples) {
    if (s.chip.rows() != rows || s.chip.cols() != cols) {
      fail(ErrorClass::kData, "GeometryMismatch", "composite chips differ in size");
    }
    const double az = degToRad(s.azimuthDeg);
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index j = 0; j < cols; ++j) {
        const Vec2 p = pixelToGround(static_cast<double>(i), static_cast<double>(j), 0.0, spec);
        const Vec2 q = groundToPixel(p.x(), p.y(), az, spec);
        if (q.x() < 0.0 || q.y() < 0.0 || q.x() > rows - 1.0 || q.y() > cols - 1.0) continue;
        sum(i, j) += bilinear(s.chip.data(), static_cast<int>(rows), static_cast<int>(cols), q.x(), q.y());
        count(i, j) += 1.0;
      }
    }
  }
  for (Eigen::Index i = 0; i < sum.size(); ++i) {
    if (count.data()[i] > 0.0) sum.data()[i] /= count.data()[i];
  }
  return logMinMax(sum);
}

RealMatrix thresholdMask(const RealMatrix& image, double threshold) {
  return (image.array() >= threshold).cast<double>().matrix();
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

// Andrew's monotone chain; counter-clockwise, no collinear points.
std::vector<Vec2> convexHull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

}  // namespace

RotatedRect minAreaRect(const std::vector<Vec2>& points) {
  if (points.empty()) fail(ErrorClass::kData, "NoForeground", "no points");
  const std::vector<Vec2> hull = convexHull(points);
  RotatedRect best;
  double bestArea = std::numeric_limits<double>::infinity();
  if (hull.size() < 3) {
    const Vec2 a = hull.front(), b = hull.back();
    best.centerX = (a.x() + b.x()) / 2;
    best.centerY = (a.y() + b.y()) / 2;
    best.width = std::max((b - a).norm(), 1e-9);
    best.height = 1e-9;
    best.rotation = std::atan2(b.y() - a.y(), b.x() - a.x());
    return best;
  }
  // One side of the optimal rectangle is collinear with a hull edge.
  for (std::size_t e = 0; e < hull.size(); ++e) {
    const Vec2 d = (hull[(e + 1) % hull.size()] - hull[e]).normalized();
    const Vec2 n(-d.y(), d.x());
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, lo2 = lo, hi2 = -lo;
    for (const auto& p : hull) {
      lo = std::min(lo, p.dot(d));
      hi = std::max(hi, p.dot(d));
      lo2 = std::min(lo2, p.dot(n));
      hi2 = std::max(hi2, p.dot(n));
    }
    const double area = (hi - lo) * (hi2 - lo2);
    if (area < bestArea - 1e-12) {
      bestArea = area;
      const Vec2 c = d * ((lo + hi) / 2) + n * ((lo2 + hi2) / 2);
      best.centerX = c.x();
      best.centerY = c.y();
      best.width = hi - lo;
      best.height = hi2 - lo2;
      best.rotation = std::atan2(d.y(), d.x());
    }
  }
  // Canonical form: width is the long side, rotation in [-pi/2, pi/2).
  if (best.height > best.width) {
    std::swap(best.width, best.height);
    best.rotation += kPi / 2;
  }
  best.rotation = wrapTwoPi(best.rotation + kPi / 2) - kPi / 2;
  if (best.rotation >= kPi / 2) best.rotation -= kPi;
  return best;
}

RotatedRect referenceRect(const RealMatrix& composite, double threshold) {
  const int rows = static_cast<int>(composite.rows()), cols = static_cast<int>(composite.cols());
  std::vector<int> label(static_cast<std::size_t>(rows) * cols, -1);
  int bestLabel = -1;
  std::size_t bestSize = 0;
  std::vector<std::vector<int>> components;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (composite(i, j) < threshold || label[static_cast<std::size_t>(i) * cols + j] >= 0) continue;
      const int id = static_cast<int>(components.size());
      std::vector<int> members{i * cols + j}, stack{i * cols + j};
      label[static_cast<std::size_t>(i) * cols + j] = id;
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int pi = p / cols, pj = p % cols;
        for (int di = -1; di <= 1; ++di) {
          for (int dj = -1; dj <= 1; ++dj) {
            const int qi = pi + di, qj = pj + dj;
            if (qi < 0 || qj < 0 || qi >= rows || qj >= cols) continue;
            const std::size_t q = static_cast<std::size_t>(qi) * cols + qj;
            if (label[q] >= 0 || composite(qi, qj) < threshold) continue;
            label[q] = id;
            members.push_back(static_cast<int>(q));
            stack.push_back(static_cast<int>(q));
          }
        }
      }
      if (members.size() > bestSize) {
        bestSize = members.size();
        bestLabel = id;
      }
      components.push_back(std::move(members));
    }
  }
  if (bestLabel < 0) fail(ErrorClass::kData, "NoForeground", "no pixel reaches the threshold");
  // Pixel squares, so an n-pixel run spans n pixels.
  std::vector<Vec2> pts;
  for (int p : components[static_cast<std::size_t>(bestLabel)]) {
    const double x = p % cols, y = p / cols;
    for (double ox : {-0.5, 0.5}) {
      for (double oy : {-0.5, 0.5}) pts.emplace_back(x + ox, y + oy);
    }
  }
  return minAreaRect(pts);
}

RealMatrix preprocessForBox(const RealMatrix& chip) {
  RealMatrix out = logMinMax(chip);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    double& v = out.data()[i];
    v = v < 0.5 ? 0.0 : std::pow(v, 1.5);
  }
  return out;
}

RotatedRect rectAtAzimuth(const RotatedRect& ref, double azimuth, const SarSystemSpec& spec) {
  const Vec2 p = pixelToGround(ref.centerY, ref.centerX, 0.0, spec);
  const Vec2 q = groundToPixel(p.x(), p.y(), azimuth, spec);
  RotatedRect r = ref;
  r.centerX = q.y();
  r.centerY = q.x();
  r.rotation = ref.rotation + azimuth;
  return r;
}

namespace {

double distanceLoss(double dx, double dy, const BBoxConfig& cfg) {
  const double dmax = std::hypot(cfg.maxShiftX, cfg.maxShiftY);
  return std::pow((dx * dx + dy * dy) / dmax, cfg.distanceExponent);
}

double rowExtent(const RotatedRect& r, double& top) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& c : r.corners()) {
    lo = std::min(lo, c.y());
    hi = std::max(hi, c.y());
  }
  top = lo;
  return hi - lo;
}

// Pixels of a rectangle relative to its center pixel grid, with their
// vertical weights d^alpha. Integer shifts keep this set unchanged.
struct Footprint {
  std::vector<int> di, dj;
  std::vector<double> weight;
};

Footprint footprint(const RotatedRect& r, double alpha) {
  Footprint f;
  double top = 0.0;
  const double span = rowExtent(r, top);
  const double reach = std::hypot(r.width, r.height) / 2 + 1;
  const int ci = static_cast<int>(std::floor(r.centerY)), cj = static_cast<int>(std::floor(r.centerX));
  for (int i = static_cast<int>(std::floor(r.centerY - reach)); i <= static_cast<int>(std::ceil(r.centerY + reach)); ++i) {
    for (int j = static_cast<int>(std::floor(r.centerX - reach)); j <= static_cast<int>(std::ceil(r.centerX + reach)); ++j) {
      if (!r.contains(j, i)) continue;
      const double d = span > 0.0 ? std::clamp((i - top) / span, 0.0, 1.0) : 0.0;
      f.di.push_back(i - ci);
      f.dj.push_back(j - cj);
      f.weight.push_back(std::pow(d, alpha));
    }
  }
  return f;
}

}  // namespace

double boxLoss(const RealMatrix& image, const RotatedRect& placed, const RotatedRect& refPlaced, const BBoxConfig& cfg) {
  double top = 0.0;
  const double span = rowExtent(placed, top);
  double sum = 0.0;
  int count = 0;
  const double reach = std::hypot(placed.width, placed.height) / 2 + 1;
  for (int i = static_cast<int>(std::floor(placed.centerY - reach)); i <= static_cast<int>(std::ceil(placed.centerY + reach)); ++i) {
    for (int j = static_cast<int>(std::floor(placed.centerX - reach)); j <= static_cast<int>(std::ceil(placed.centerX + reach)); ++j) {
      if (!placed.contains(j, i)) continue;
      ++count;
      if (i < 0 || j < 0 || i >= image.rows() || j >= image.cols()) continue;
      const double d = span > 0.0 ? std::clamp((i - top) / span, 0.0, 1.0) : 0.0;
      sum += image(i, j) * std::pow(d, cfg.verticalExponent);
    }
  }
  const double pixel = count > 0 ? -sum / count : 0.0;
  return pixel + cfg.distanceWeight * distanceLoss(placed.centerX - refPlaced.centerX,
                                                   placed.centerY - refPlaced.centerY, cfg);
}

BoxFit localizeBox(const RealMatrix& image, double azimuth, const RotatedRect& ref, const BBoxConfig& cfg,
                   const SarSystemSpec& spec) {
  cfg.validate();
  const RotatedRect base = rectAtAzimuth(ref, azimuth, spec);
  const Footprint f = footprint(base, cfg.verticalExponent);
  const int ci = static_cast<int>(std::floor(base.centerY)), cj = static_cast<int>(std::floor(base.centerX));
  const int rows = static_cast<int>(image.rows()), cols = static_cast<int>(image.cols());
  const double inv = f.weight.empty() ? 0.0 : 1.0 / static_cast<double>(f.weight.size());

  auto loss = [&](int sx, int sy) {
    double sum = 0.0;
    for (std::size_t k = 0; k < f.weight.size(); ++k) {
      const int i = ci + sy + f.di[k], j = cj + sx + f.dj[k];
      if (i < 0 || j < 0 || i >= rows || j >= cols) continue;
      sum += image(i, j) * f.weight[k];
    }
    return -sum * inv + cfg.distanceWeight * distanceLoss(sx, sy, cfg);
  };
  // Ties go to the smaller shift, then to the lexicographically first.
  auto better = [](double la, int ax, int ay, double lb, int bx, int by) {
    if (la != lb) return la < lb;
    const int na = ax * ax + ay * ay, nb = bx * bx + by * by;
    if (na != nb) return na < nb;
    return ay != by ? ay < by : ax < bx;
  };

  BoxFit best;
  best.loss = std::numeric_limits<double>::infinity();
  auto consider = [&](int sx, int sy) {
    const double l = loss(sx, sy);
    if (better(l, sx, sy, best.loss, best.shiftX, best.shiftY)) {
      best.loss = l;
      best.shiftX = sx;
      best.shiftY = sy;
    }
  };
  if (!cfg.coarseToFine) {
    for (int sy = -cfg.maxShiftY; sy <= cfg.maxShiftY; ++sy) {
      for (int sx = -cfg.maxShiftX; sx <= cfg.maxShiftX; ++sx) consider(sx, sy);
    }
  } else {
    // Stride-4 grid, then a full-resolution search around the best three.
    struct Cand {
      double l;
      int sx, sy;
    };
    std::vector<Cand> coarse;
    for (int sy = -cfg.maxShiftY; sy <= cfg.maxShiftY; sy += 4) {
      for (int sx = -cfg.maxShiftX; sx <= cfg.maxShiftX; sx += 4) coarse.push_back({loss(sx, sy), sx, sy});
    }
    std::sort(coarse.begin(), coarse.end(),
              [&](const Cand& a, const Cand& b) { return better(a.l, a.sx, a.sy, b.l, b.sx, b.sy); });
    for (std::size_t k = 0; k < std::min<std::size_t>(3, coarse.size()); ++k) {
      for (int sy = std::max(-cfg.maxShiftY, coarse[k].sy - 4); sy <= std::min(cfg.maxShiftY, coarse[k].sy + 4); ++sy) {
        for (int sx = std::max(-cfg.maxShiftX, coarse[k].sx - 4); sx <= std::min(cfg.maxShiftX, coarse[k].sx + 4); ++sx) {
          consider(sx, sy);
        }
      }
    }
  }
  best.rect = base;
  best.rect.centerX += best.shiftX;
  best.rect.centerY += best.shiftY;
  return best;
}

double intersectionOverUnion(const RotatedRect& a, const RotatedRect& b) {
  const Polygon2 inter = clipConvex2(a.corners(), b.corners());
  const double ai = inter.size() >= 3 ? std::abs(signedArea(inter)) : 0.0;
  const double u = a.area() + b.area() - ai;
  return u > 0.0 ? ai / u : 0.0;
}

std::string boxesCsv(const std::vector<std::string>& ids, const std::vector<RotatedRect>& boxes) {
  std::ostringstream o;
  o << std::setprecision(10) << "sourceId,cx,cy,w,h,rot_deg\n";
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const auto& b = boxes[i];
    o << ids.at(i) << "," << b.centerX << "," << b.centerY << "," << b.width << "," << b.height << ","
      << radToDeg(b.rotation) << "\n";
  }
  return o.str();
}

}  // namespace sarcr
