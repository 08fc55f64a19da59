// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "core/imaging.hpp"

namespace sarcr {

// Tabulated focused response of a point scatterer, taken from the full
// echo -> compression -> focusing chain for one incidence angle. Images of
// point-like scenes are then built by stamping shifted, phase-rotated copies
// of the table instead of re-running the chain.
//
// The sample rate is below the chirp bandwidth in the reference system, so
// the focused response depends on where the target falls between fast-time
// samples. The table is therefore built for kFractions sub-sample offsets
// and blended linearly.
class PointResponseRenderer {
 public:
  // Fine core around the peak, coarse skirt for the far sidelobes.
  static constexpr int kRadius = 16;
  static constexpr int kSubsteps = 16;
  static constexpr int kOuterRadius = 64;
  static constexpr int kOuterSubsteps = 4;
  static constexpr int kFractions = 8;

  PointResponseRenderer(const SarSystemSpec& spec, double incidence);

  const SarSystemSpec& spec() const { return spec_; }
  const ImagingPlan& plan() const { return plan_; }
  // The tables are normalized to a unit point, so only reflector amplitudes
  // depend on the transmit amplitude.
  void setTxAmplitude(double amplitude);
  double incidence() const { return incidence_; }

  // Adds amplitude * response of a point at scene (x, y) seen from `azimuth`.
  void stamp(ComplexMatrix& image, double x, double y, double azimuth, double amplitude) const;

  ComplexImage renderReflectors(const std::vector<ReflectorConfig>& reflectors,
                                const AspectAngles& aspect) const;

  // Focused peak magnitude of a unit point on a fast-time sample.
  double unitPeak() const;

 private:
  struct Table {
    int radius = 0, substeps = 0, side = 0;
    std::vector<cd> values;  // row-major, side x side
    cd at(double dRow, double dCol) const;
  };
  cd lookup(int fraction, double dRow, double dCol) const;

  SarSystemSpec spec_;
  double incidence_;
  TrihedralGeometry geometry_;
  ImagingPlan plan_;
  std::vector<Table> core_;   // per fraction
  std::vector<Table> outer_;  // per fraction
};

}  // namespace sarcr
