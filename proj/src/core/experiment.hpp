// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

// Pipeline orchestration shared by the command-line tool and the
// end-to-end checks: dataset synthesis, anchoring, attack optimization,
// and evaluation, all driven by JSON configuration.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "core/attack.hpp"
#include "core/bbox.hpp"
#include "core/classify.hpp"
#include "core/data.hpp"
#include "core/optimize.hpp"

namespace sarcr {

using Json = nlohmann::json;

SarSystemSpec specFromJson(const Json& j);
Json specToJson(const SarSystemSpec& spec);
SyntheticClassOptions classOptionsFromJson(const Json& j);
DEConfig deConfigFromJson(const Json& j);
PSOConfig psoConfigFromJson(const Json& j);
BBoxConfig bboxConfigFromJson(const Json& j);
PrototypeOptions prototypeOptionsFromJson(const Json& j);

struct SynthConfig {
  int classes = 4;
  std::uint64_t classSeed = 7;  // class family
  std::uint64_t seed = 1;       // clutter and jitter
  SyntheticClassOptions classOptions;
  std::vector<double> incidencesDeg{75.0};
  double azimuthStepDeg = 1.0;
  double azimuthOffsetDeg = 0.0;
  double jitterPx = 0.0;
};
SynthConfig synthConfigFromJson(const Json& j);
std::vector<SarSample> synthesizeDataset(const SynthConfig& cfg, const FastRenderer& renderer);

// Anchor pixels (row, col) of each sample from the box method: one
// reference rectangle per (class, incidence) group of `reference`, then a
// localized box per sample.
std::vector<Vec2> boxAnchors(const std::vector<SarSample>& samples, const std::vector<SarSample>& reference,
                             const BBoxConfig& cfg, const SarSystemSpec& spec);

enum class AnchorMode { kBox, kTruth, kCenter };
AnchorMode anchorModeFromString(const std::string& s);

struct AttackConfig {
  int reflectors = 4;
  std::string optimizer = "de";  // "de" or "pso"
  DEConfig de;
  PSOConfig pso;
  AngleVariant variant = AngleVariant::kFree;
  double sceneWidth = 38.4;
  double sceneHeight = 38.4;
  bool complexComposition = true;
};
AttackConfig attackConfigFromJson(const Json& j);

struct AttackOutcome {
  AttackParams params;
  OptimizeTrace trace;
};
AttackOutcome optimizeAttack(const ObservationSet& obs, const TargetModel& model, const std::string& classLabel,
                             const PerturbationRenderer& renderer, const AttackConfig& cfg);

// Adversarial chips for arbitrary samples: reflectors are placed relative
// to the anchor of each sample, looked up by sample sourceId.
AttackFn makeAttackFn(std::vector<ReflectorConfig> reflectors, const PerturbationRenderer& renderer,
                      const SarSystemSpec& spec, std::map<std::string, Vec2> anchorPixels,
                      bool complexComposition);

// Uniform random parameter vectors inside the attack box.
AttackParams randomParams(int reflectors, double sceneWidth, double sceneHeight, std::uint64_t seed);

// Known-aspect attack on one training sample: the reflector faces the
// sample's aspect; only its position is searched.
struct KnownAspectOutcome {
  KnownAspectAttack kaa;
  double x = 0.0, y = 0.0;
  OptimizeTrace trace;
};
KnownAspectOutcome optimizeKnownAspect(const Observation& training, const TargetModel& model,
                                       const std::string& classLabel, const PerturbationRenderer& renderer,
                                       double sceneWidth, double sceneHeight, const DEConfig& de,
                                       bool complexComposition);

// Desk-scale end-to-end experiment on synthetic data.
struct DeskConfig {
  SynthConfig synth;               // classifier training set
  std::uint64_t poolSeed = 1001;   // attack pool noise seed
  double poolAzimuthOffsetDeg = 0.5;
  PrototypeOptions model;
  AttackConfig attack;
  double trainSpacingDeg = 10.0, trainToleranceDeg = 2.0;
  double testSpacingDeg = 2.5, testToleranceDeg = 1.0;
  std::uint64_t splitSeed = 11;
  int randomDraws = 20;
  std::uint64_t randomSeed = 99;
  DEConfig knownAspectDe;
  std::vector<double> uncertaintiesDeg{0.0, 22.5, 45.0, 90.0};
  AnchorMode anchors = AnchorMode::kTruth;
  BBoxConfig box;
  bool runEightReflectors = true;
};
DeskConfig deskConfigFromJson(const Json& j);

struct DeskReport {
  double cleanAccuracy = 0.0;
  double txAmplitude = 0.0;
  FoolingReport m4, m8, randomBest;
  std::vector<double> knownAspectTrainingRates;  // per class, at zero uncertainty
  std::vector<double> uncertaintyRates;          // average over classes per uncertainty
  double seconds = 0.0;
  Json toJson() const;
};
DeskReport runDeskExperiment(const DeskConfig& cfg, std::ostream* log = nullptr);

// A trained reference model (JSON) or a subprocess adapter description
// {"kind": "subprocess", "command": ..., "labels": [...]}.
std::unique_ptr<TargetModel> loadModelFile(const std::string& path);

// Command entry point: "synth", "train", "simulate", "attack", "evaluate",
// "bbox", "desk". Writes under outDir and returns a summary.
Json runCommand(const std::string& command, const Json& config, const std::string& outDir);

}  // namespace sarcr
