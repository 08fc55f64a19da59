// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/point_response.hpp"

#include <cmath>

#include "core/errors.hpp"

namespace sarcr {

namespace {

// Ground range whose closest-approach range is R.
double groundRangeFor(double R, double incidence, const SarSystemSpec& spec) {
  const double r0 = spec.standoffRange, s = std::sin(incidence);
  return r0 * s - std::sqrt(r0 * r0 * s * s - r0 * r0 + R * R);
}

double carrierCycles(double R, const SarSystemSpec& spec) {
  const double c = 2.0 * spec.centerFrequency * R / kLightSpeed;
  return c - std::floor(c);
}

}  // namespace

PointResponseRenderer::PointResponseRenderer(const SarSystemSpec& spec, double incidence)
    : spec_(spec),
      incidence_(incidence),
      geometry_(TrihedralGeometry::make(spec.plateSide)),
      plan_(planImaging(spec, incidence)) {
  core_.resize(kFractions);
  outer_.resize(kFractions);
  const AspectAngles aspect{incidence, 0.0};
  const double binMeters = kLightSpeed / (2.0 * spec.sampleRate);

  for (int q = 0; q < kFractions; ++q) {
    // Point at closest range r0 + q/kFractions of a fast-time sample.
    const double R = spec.standoffRange + binMeters * q / kFractions;
    const double gT = groundRangeFor(R, incidence, spec);
    const FocusedGrid grid = focusGrid(synthesizePointEcho(gT, 0.0, 1.0, aspect, spec, plan_), spec);
    const cd derotate = std::polar(1.0, -2.0 * kPi * carrierCycles(R, spec));
    auto fill = [&](Table& t, int radius, int substeps) {
      t.radius = radius;
      t.substeps = substeps;
      t.side = 2 * radius * substeps + 1;
      t.values.resize(static_cast<std::size_t>(t.side) * t.side);
      for (int a = 0; a < t.side; ++a) {
        const double g = gT + (static_cast<double>(a) / substeps - radius) * spec.gsdRange;
        const double rb = grid.rangeBinOf(closestApproachRange(g, incidence, spec));
        for (int b = 0; b < t.side; ++b) {
          const double s = (static_cast<double>(b) / substeps - radius) * spec.gsdAzimuth;
          t.values[static_cast<std::size_t>(a) * t.side + b] =
              derotate * grid.sample(rb, grid.azimuthIndexOf(s / spec.platformSpeed));
        }
      }
    };
    fill(core_[q], kRadius, kSubsteps);
    fill(outer_[q], kOuterRadius, kOuterSubsteps);
  }
}

void PointResponseRenderer::setTxAmplitude(double amplitude) {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
    fail(ErrorClass::kInvalidArgument, "InvalidAmplitude", "txAmplitude must be finite and >= 0");
  }
  spec_.txAmplitude = amplitude;
}

double PointResponseRenderer::unitPeak() const { return std::abs(core_[0].at(0.0, 0.0)); }

cd PointResponseRenderer::Table::at(double dRow, double dCol) const {
  const double u = (dRow + radius) * substeps, v = (dCol + radius) * substeps;
  if (u < 0.0 || v < 0.0 || u > side - 1 || v > side - 1) return 0.0;
  const int i = std::min(static_cast<int>(u), side - 2), j = std::min(static_cast<int>(v), side - 2);
  const double fu = u - i, fv = v - j;
  auto val = [&](int r, int c) { return values[static_cast<std::size_t>(r) * side + c]; };
  return (1 - fu) * ((1 - fv) * val(i, j) + fv * val(i, j + 1)) +
         fu * ((1 - fv) * val(i + 1, j) + fv * val(i + 1, j + 1));
}

cd PointResponseRenderer::lookup(int q, double dRow, double dCol) const {
  if (std::abs(dRow) <= kRadius && std::abs(dCol) <= kRadius) return core_[q].at(dRow, dCol);
  return outer_[q].at(dRow, dCol);
}

void PointResponseRenderer::stamp(ComplexMatrix& image, double x, double y, double azimuth,
                                  double amplitude) const {
  if (amplitude == 0.0) return;
  const Vec2 px = groundToPixel(x, y, azimuth, spec_);
  const Vec2 gs = groundRangeAzimuth(x, y, azimuth);
  const double R = closestApproachRange(gs.x(), incidence_, spec_);
  const cd rot = std::polar(amplitude, 2.0 * kPi * carrierCycles(R, spec_));

  // Position of the target between fast-time samples selects the tables.
  const double bin = (2.0 * R / kLightSpeed - plan_.fastTimeOrigin) * spec_.sampleRate;
  const double frac = (bin - std::floor(bin)) * kFractions;
  const int q0 = std::min(static_cast<int>(frac), kFractions - 1);
  const int q1 = (q0 + 1) % kFractions;
  const double w1 = frac - q0, w0 = 1.0 - w1;

  const int r0 = std::max(0, static_cast<int>(std::ceil(px.x() - kOuterRadius)));
  const int r1 = std::min(static_cast<int>(image.rows()) - 1, static_cast<int>(std::floor(px.x() + kOuterRadius)));
  const int c0 = std::max(0, static_cast<int>(std::ceil(px.y() - kOuterRadius)));
  const int c1 = std::min(static_cast<int>(image.cols()) - 1, static_cast<int>(std::floor(px.y() + kOuterRadius)));
  if (r0 > r1 || c0 > c1) return;

  // The sub-pixel offset is the same for every pixel, so each table is read
  // on a fixed lattice with fixed bilinear weights.
  struct Lattice {
    const Table* t0;
    const Table* t1;
    double fu, fv;
    int iu0, jv0;  // lattice index of pixel (r0, c0)
  };
  auto lattice = [&](const std::vector<Table>& set) {
    const Table& t = set[static_cast<std::size_t>(q0)];
    const double u = (r0 - px.x() + t.radius) * t.substeps, v = (c0 - px.y() + t.radius) * t.substeps;
    Lattice l{&t, &set[static_cast<std::size_t>(q1)], 0.0, 0.0, static_cast<int>(std::floor(u)),
              static_cast<int>(std::floor(v))};
    l.fu = u - l.iu0;
    l.fv = v - l.jv0;
    return l;
  };
  const Lattice core = lattice(core_), outer = lattice(outer_);

  auto sampleAt = [&](const Lattice& l, int i, int j) -> cd {
    const Table& t = *l.t0;
    int a = l.iu0 + (i - r0) * t.substeps, b = l.jv0 + (j - c0) * t.substeps;
    double fu = l.fu, fv = l.fv;
    if (a < 0 || b < 0 || a > t.side - 1 || b > t.side - 1) return 0.0;
    if (a == t.side - 1) {
      if (fu > 0.0) return 0.0;
      a -= 1;
      fu = 1.0;
    }
    if (b == t.side - 1) {
      if (fv > 0.0) return 0.0;
      b -= 1;
      fv = 1.0;
    }
    const std::size_t k = static_cast<std::size_t>(a) * t.side + b, side = static_cast<std::size_t>(t.side);
    const cd* p = t.values.data() + k;
    const cd* p1 = l.t1->values.data() + k;
    const cd v0 = (1 - fu) * ((1 - fv) * p[0] + fv * p[1]) + fu * ((1 - fv) * p[side] + fv * p[side + 1]);
    const cd v1 = (1 - fu) * ((1 - fv) * p1[0] + fv * p1[1]) + fu * ((1 - fv) * p1[side] + fv * p1[side + 1]);
    return w0 * v0 + w1 * v1;
  };
  for (int i = r0; i <= r1; ++i) {
    const bool coreRow = std::abs(i - px.x()) <= kRadius;
    cd* row = image.row(i).data();
    for (int j = c0; j <= c1; ++j) {
      const bool inCore = coreRow && std::abs(j - px.y()) <= kRadius;
      row[j] += rot * sampleAt(inCore ? core : outer, i, j);
    }
  }
}

ComplexImage PointResponseRenderer::renderReflectors(const std::vector<ReflectorConfig>& reflectors,
                                                     const AspectAngles& aspect) const {
  if (std::abs(aspect.incidence - incidence_) > 1e-9) {
    fail(ErrorClass::kInvalidArgument, "GeometryMismatch", "renderer built for another incidence");
  }
  ComplexImage img;
  img.spacingRange = spec_.gsdRange;
  img.spacingAzimuth = spec_.gsdAzimuth;
  img.pixels = ComplexMatrix::Zero(spec_.chipRows, spec_.chipCols);
  for (const auto& r : reflectors) {
    checkSwath(r.x, r.y, aspect, spec_, plan_);
    const double amp = reflectorAmplitude(r, aspect, spec_, geometry_);
    if (amp == 0.0) continue;
    const Vec2 gs = groundRangeAzimuth(r.x, r.y, aspect.azimuth);
    const double R = closestApproachRange(gs.x(), incidence_, spec_);
    stamp(img.pixels, r.x, r.y, aspect.azimuth, amp / R);
  }
  return img;
}

}  // namespace sarcr
