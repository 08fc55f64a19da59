// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "core/classify.hpp"
#include "core/imaging.hpp"
#include "core/optimize.hpp"
#include "core/point_response.hpp"

namespace sarcr {

// Reflector attack vector: [x_1..x_m, y_1..y_m, theta_1..theta_m, phi_1].
// Reflector i points at azimuth phi_1 + (i - 1) 2 pi / m. Positions are
// relative to the target anchor (the localized box center).
struct AttackParams {
  int reflectorCount = 4;
  std::vector<double> theta;
  double sceneWidth = 38.4;
  double sceneHeight = 38.4;
};

Bounds attackBounds(int reflectorCount, double sceneWidth, double sceneHeight);
// Throws ConstraintViolation naming every violated bound.
std::vector<ReflectorConfig> expandParams(const AttackParams& params);
AttackParams packParams(const std::vector<ReflectorConfig>& reflectors, double sceneWidth, double sceneHeight);

// Text form, one reflector per line: index x y theta_deg phi_deg.
std::string formatParams(const AttackParams& params);
AttackParams parseParams(const std::string& text);

// Shift reflector positions from the anchor frame to the scene.
std::vector<ReflectorConfig> placeReflectors(std::vector<ReflectorConfig> reflectors, const Vec2& anchor);

// Clean magnitude plus perturbation magnitude.
RealMatrix composeAdversarial(const RealMatrix& clean, const ComplexImage& perturbation);
// Magnitude of the complex sum, for scenes with known phase.
RealMatrix composeAdversarial(const ComplexMatrix& clean, const ComplexImage& perturbation);

// Renders the image of a reflector set, in scene coordinates.
class PerturbationRenderer {
 public:
  virtual ~PerturbationRenderer() = default;
  virtual ComplexImage render(const std::vector<ReflectorConfig>& reflectors, const AspectAngles& aspect) const = 0;
};

// Runs the full echo, demodulation, and focusing chain.
class ChainRenderer final : public PerturbationRenderer {
 public:
  explicit ChainRenderer(SarSystemSpec spec) : spec_(std::move(spec)) {}
  ComplexImage render(const std::vector<ReflectorConfig>& reflectors, const AspectAngles& aspect) const override;

 private:
  SarSystemSpec spec_;
};

// Stamps tabulated point responses; tables are built lazily per incidence.
class FastRenderer final : public PerturbationRenderer {
 public:
  explicit FastRenderer(SarSystemSpec spec) : spec_(std::move(spec)) {}
  ComplexImage render(const std::vector<ReflectorConfig>& reflectors, const AspectAngles& aspect) const override;
  const PointResponseRenderer& forIncidence(double incidence) const;
  void setTxAmplitude(double amplitude);
  const SarSystemSpec& spec() const { return spec_; }

 private:
  SarSystemSpec spec_;
  mutable std::mutex mutex_;
  mutable std::map<long long, std::shared_ptr<PointResponseRenderer>> tables_;
};

struct Observation {
  AspectAngles aspect;
  RealMatrix clean;             // magnitude chip
  ComplexMatrix cleanComplex;   // optional; enables complex composition
  std::string classLabel;
  Vec2 anchor = Vec2::Zero();   // scene position of the target anchor, meters
};
using ObservationSet = std::vector<Observation>;

// Builds observations from samples. The anchor is the scene position of
// `anchorPixel[i]` (row, col), or the chip center when that list is empty.
ObservationSet makeObservations(const std::vector<SarSample>& samples, const SarSystemSpec& spec,
                                const std::vector<Vec2>& anchorPixels = {});

// Adversarial magnitude chip of one observation.
RealMatrix adversarialChip(const Observation& obs, const std::vector<ReflectorConfig>& reflectors,
                           const PerturbationRenderer& renderer, bool complexComposition = true);

// -(1/N) sum_n CE(model(adversarial_n), classLabel).
double attackLoss(const AttackParams& params, const ObservationSet& obs, const TargetModel& model,
                  const std::string& classLabel, const PerturbationRenderer& renderer,
                  bool complexComposition = true);

// Single reflector oriented at the aspect estimate and placed at (x, y)
// relative to the anchor.
ReflectorConfig knownAspectReflector(const KnownAspectAttack& kaa, double x, double y);
double knownAspectLoss(const KnownAspectAttack& kaa, double x, double y, const Observation& training,
                       const TargetModel& model, const std::string& classLabel,
                       const PerturbationRenderer& renderer, bool complexComposition = true);

// Focused peak of a boresight-facing reflector at the scene center.
double boresightPeak(const FastRenderer& renderer, double incidence);
// Bisection on the transmit amplitude so boresightPeak equals targetPeak.
// Returns the amplitude and installs it in the renderer.
double calibrateTxAmplitude(FastRenderer& renderer, double incidence, double targetPeak);
// Mean over classes of the mean per-chip maximum.
double meanClassMaximum(const std::vector<SarSample>& samples);

}  // namespace sarcr
