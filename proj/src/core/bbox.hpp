// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "core/data.hpp"

namespace sarcr {

// Rotated rectangle in pixel coordinates: x is the column, y the row
// (growing toward the radar). `rotation` is the angle of the width axis
// measured from +x toward +y.
struct RotatedRect {
  double centerX = 0.0, centerY = 0.0;
  double width = 0.0, height = 0.0;
  double rotation = 0.0;

  Polygon2 corners() const;
  bool contains(double x, double y) const;
  double area() const { return width * height; }
};

struct BBoxConfig {
  double threshold = 0.7;
  double verticalExponent = 1.5;  // alpha
  double distanceExponent = 0.5;  // beta
  double distanceWeight = 0.1;    // lambda
  int maxShiftX = 32;
  int maxShiftY = 32;
  bool coarseToFine = false;      // exhaustive search otherwise
  void validate() const;
};

// Rotates every chip into the zero-azimuth frame, averages each pixel over
// the chips covering it, log-scales with a 40 dB floor below the maximum,
// and min-max normalizes. All samples must share the raster size.
RealMatrix compositeImage(const std::vector<SarSample>& samples, const SarSystemSpec& spec);

// Largest 8-connected component of composite >= threshold, enclosed by its
// minimum-area rectangle. Throws NoForeground.
RealMatrix thresholdMask(const RealMatrix& image, double threshold);
RotatedRect referenceRect(const RealMatrix& composite, double threshold);
// Minimum-area enclosing rectangle of a point set (convex hull plus
// rotating calipers). Width is the longer side.
RotatedRect minAreaRect(const std::vector<Vec2>& points);

// Log scale with a 40 dB floor, min-max to [0, 1], zero below 0.5, gamma 1.5.
RealMatrix preprocessForBox(const RealMatrix& chip);

struct BoxFit {
  RotatedRect rect;
  double loss = 0.0;
  int shiftX = 0, shiftY = 0;
};

// Box with the reference size, rotated to the sample's azimuth, placed to
// minimize pixel loss + lambda * distance loss over integer shifts around
// the reference center. `image` is the preprocessed chip.
BoxFit localizeBox(const RealMatrix& image, double azimuth, const RotatedRect& ref, const BBoxConfig& cfg,
                   const SarSystemSpec& spec);
// Combined loss of a box at integer shift (sx, sy); exposed for testing.
double boxLoss(const RealMatrix& image, const RotatedRect& placed, const RotatedRect& refPlaced, const BBoxConfig& cfg);

// The reference rectangle as seen at `azimuth`.
RotatedRect rectAtAzimuth(const RotatedRect& ref, double azimuth, const SarSystemSpec& spec);

double intersectionOverUnion(const RotatedRect& a, const RotatedRect& b);

std::string boxesCsv(const std::vector<std::string>& ids, const std::vector<RotatedRect>& boxes);

}  // namespace sarcr
