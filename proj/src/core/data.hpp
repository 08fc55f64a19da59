// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "core/imaging.hpp"
#include "core/point_response.hpp"

namespace sarcr {

struct SarSample {
  RealMatrix chip;              // magnitude, chipRows x chipCols
  ComplexMatrix complexChip;    // empty when only magnitude is known
  double incidenceDeg = 0.0;
  double azimuthDeg = 0.0;
  std::string classLabel;
  std::string sourceId;
  // Known target center in pixels (synthetic data only); NaN otherwise.
  double truthRow = std::numeric_limits<double>::quiet_NaN();
  double truthCol = std::numeric_limits<double>::quiet_NaN();

  bool hasComplex() const { return complexChip.size() > 0; }
  AspectAngles aspect() const;
};

// Samples grouped by (class, incidence), each group sorted by azimuth with
// sourceId as tie-break. Holds indices into the owning sample vector.
class DatasetIndex {
 public:
  explicit DatasetIndex(const std::vector<SarSample>& samples);

  using Key = std::pair<std::string, double>;  // class, incidence (deg, 0.01 grid)
  const std::map<Key, std::vector<std::size_t>>& groups() const { return groups_; }
  const std::vector<SarSample>& samples() const { return *samples_; }
  std::vector<std::string> classes() const;
  std::vector<std::size_t> classMembers(const std::string& label) const;

 private:
  const std::vector<SarSample>* samples_;
  std::map<Key, std::vector<std::size_t>> groups_;
};

struct SubsetReport {
  std::vector<std::size_t> selected;  // indices into the dataset
  int steps = 0;
  int skippedSteps = 0;  // steps without an in-tolerance sample
};

// Azimuth-uniform random subset of one class, one walk per incidence angle.
// `exclude` marks samples that may not be drawn (e.g. a training split).
SubsetReport sampleSubset(const DatasetIndex& index, const std::string& classLabel,
                          double spacingDeg, double toleranceDeg, std::uint64_t seed,
                          const std::vector<bool>& exclude = {});

// Circular distance between two azimuths in degrees, in [0, 180].
double azimuthDistanceDeg(double a, double b);

// MSTAR Phoenix-header chips: ASCII header, then big-endian float32
// magnitude and phase blocks.
SarSample readMstarChip(const std::vector<std::uint8_t>& bytes, int outRows = 128, int outCols = 128);
std::vector<std::uint8_t> writeMstarChip(const SarSample& sample, const RealMatrix& phase = {});

struct PointScatterer {
  double x = 0.0, y = 0.0;  // meters, target frame
  double amplitude = 1.0;
  double lobeCenterDeg = 0.0;
  double lobeWidthDeg = 360.0;  // >= 360 is isotropic
};

struct SyntheticTargetModel {
  std::string label;
  std::vector<PointScatterer> pointScatterers;
  double clutterLevel = 0.0;
  double footprintLength = 0.0;  // body rectangle in the target frame
  double footprintWidth = 0.0;
};

struct SyntheticClassOptions {
  double clutterLevel = 0.05;
  int distinctiveCount = 1;          // isotropic scatterers unique to a class
  double distinctiveAmplitude = 1.0;
  int bodyRows = 6;                  // body grid along the length
  int bodyCols = 3;                  // and across the width
  double bodyAmplitudeMin = 0.3;     // shared body scatterers, drawn once
  double bodyAmplitudeMax = 0.7;
  double bodyLobeMinDeg = 60.0;      // full width at half maximum of body lobes
  double bodyLobeMaxDeg = 150.0;
  double bodyVariation = 0.0;        // per-class relative jitter of body amplitudes
};

// Deterministic family of classes sharing one vehicle-like body; classes
// differ by their distinctive scatterers and optional body variation.
std::vector<SyntheticTargetModel> makeSyntheticClasses(int count, std::uint64_t seed,
                                                       const SyntheticClassOptions& options = {});

struct SyntheticRenderOptions {
  double maxJitterPx = 0.0;  // uniform target translation per sample
};

SarSample renderSyntheticSample(const SyntheticTargetModel& target, const AspectAngles& aspect,
                                const PointResponseRenderer& renderer, std::uint64_t seed,
                                const SyntheticRenderOptions& options = {});

// Dataset on disk: CIMG chips plus index.jsonl with classLabel,
// incidence_deg, azimuth_deg, path, sourceId (and truth_row/col if known).
void saveDataset(const std::string& dir, const std::vector<SarSample>& samples);
std::vector<SarSample> loadDataset(const std::string& dir);
// Every readable MSTAR chip below `dir`, sorted by path.
std::vector<SarSample> loadMstarDirectory(const std::string& dir);

}  // namespace sarcr
