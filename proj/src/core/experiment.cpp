// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "core/errors.hpp"
#include "core/image_io.hpp"
#include "core/rng.hpp"

namespace sarcr {

namespace fs = std::filesystem;

namespace {

// Rejects keys outside `allowed` so typos surface as config errors.
void checkKeys(const Json& j, std::initializer_list<const char*> allowed, const std::string& section) {
  if (j.is_null()) return;
  if (!j.is_object()) fail(ErrorClass::kConfig, "InvalidConfig", section + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) fail(ErrorClass::kConfig, "UnknownKey", section + "." + it.key());
  }
}

template <class T>
T get(const Json& j, const char* key, T fallback) {
  if (j.is_null() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorClass::kConfig, "InvalidValue", std::string(key) + ": " + e.what());
  }
}

const Json& section(const Json& j, const char* key) {
  static const Json kNull;
  if (j.is_null() || !j.contains(key)) return kNull;
  return j.at(key);
}

std::string requireString(const Json& j, const char* key, const std::string& where) {
  if (j.is_null() || !j.contains(key) || !j.at(key).is_string()) {
    fail(ErrorClass::kConfig, "MissingKey", where + "." + key);
  }
  return j.at(key).get<std::string>();
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string angleTag(double incidenceDeg, double azimuthDeg) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << "i" << incidenceDeg << "_a" << azimuthDeg;
  return os.str();
}

void ensureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorClass::kIo, "WriteFailed", "cannot create " + dir + ": " + ec.message());
}

void writeText(const std::string& path, const std::string& text) {
  writeFileBytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string readText(const std::string& path) {
  const auto bytes = readFileBytes(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

SarSystemSpec specFromJson(const Json& j) {
  checkKeys(j,
            {"standoff_range", "platform_speed", "center_frequency", "bandwidth", "pulse_duration", "sample_rate",
             "prf", "gsd_range", "gsd_azimuth", "tx_amplitude", "chip_rows", "chip_cols", "plate_side",
             "polarization"},
            "spec");
  SarSystemSpec s;
  s.standoffRange = get(j, "standoff_range", s.standoffRange);
  s.platformSpeed = get(j, "platform_speed", s.platformSpeed);
  s.centerFrequency = get(j, "center_frequency", s.centerFrequency);
  s.bandwidth = get(j, "bandwidth", s.bandwidth);
  s.pulseDuration = get(j, "pulse_duration", s.pulseDuration);
  s.sampleRate = get(j, "sample_rate", s.sampleRate);
  s.prf = get(j, "prf", s.prf);
  s.gsdRange = get(j, "gsd_range", s.gsdRange);
  s.gsdAzimuth = get(j, "gsd_azimuth", s.gsdAzimuth);
  s.txAmplitude = get(j, "tx_amplitude", s.txAmplitude);
  s.chipRows = get(j, "chip_rows", s.chipRows);
  s.chipCols = get(j, "chip_cols", s.chipCols);
  s.plateSide = get(j, "plate_side", s.plateSide);
  if (get<std::string>(j, "polarization", "HH") != "HH") {
    fail(ErrorClass::kConfig, "UnsupportedPolarization", "only HH is modeled");
  }
  try {
    s.validate();
  } catch (const Error& e) {
    fail(ErrorClass::kConfig, e.kind(), e.what());
  }
  return s;
}

Json specToJson(const SarSystemSpec& s) {
  return Json{{"standoff_range", s.standoffRange}, {"platform_speed", s.platformSpeed},
              {"center_frequency", s.centerFrequency}, {"bandwidth", s.bandwidth},
              {"pulse_duration", s.pulseDuration}, {"sample_rate", s.sampleRate},
              {"prf", s.prf}, {"gsd_range", s.gsdRange}, {"gsd_azimuth", s.gsdAzimuth},
              {"tx_amplitude", s.txAmplitude}, {"chip_rows", s.chipRows}, {"chip_cols", s.chipCols},
              {"plate_side", s.plateSide}, {"polarization", "HH"}};
}

SyntheticClassOptions classOptionsFromJson(const Json& j) {
  checkKeys(j,
            {"clutter_level", "distinctive_count", "distinctive_amplitude", "body_rows", "body_cols",
             "body_amplitude_min", "body_amplitude_max", "body_lobe_min_deg", "body_lobe_max_deg",
             "body_variation"},
            "classes");
  SyntheticClassOptions o;
  o.clutterLevel = get(j, "clutter_level", o.clutterLevel);
  o.distinctiveCount = get(j, "distinctive_count", o.distinctiveCount);
  o.distinctiveAmplitude = get(j, "distinctive_amplitude", o.distinctiveAmplitude);
  o.bodyRows = get(j, "body_rows", o.bodyRows);
  o.bodyCols = get(j, "body_cols", o.bodyCols);
  o.bodyAmplitudeMin = get(j, "body_amplitude_min", o.bodyAmplitudeMin);
  o.bodyAmplitudeMax = get(j, "body_amplitude_max", o.bodyAmplitudeMax);
  o.bodyLobeMinDeg = get(j, "body_lobe_min_deg", o.bodyLobeMinDeg);
  o.bodyLobeMaxDeg = get(j, "body_lobe_max_deg", o.bodyLobeMaxDeg);
  o.bodyVariation = get(j, "body_variation", o.bodyVariation);
  return o;
}

DEConfig deConfigFromJson(const Json& j) {
  checkKeys(j,
            {"population_size", "max_iterations", "mutation_factor", "recombination_probability",
             "mutation_probability", "tournament_size", "crowding", "seed", "jobs"},
            "de");
  DEConfig c;
  c.populationSize = get(j, "population_size", c.populationSize);
  c.maxIterations = get(j, "max_iterations", c.maxIterations);
  c.mutationFactor = get(j, "mutation_factor", c.mutationFactor);
  c.recombinationProbability = get(j, "recombination_probability", c.recombinationProbability);
  c.mutationProbability = get(j, "mutation_probability", c.mutationProbability);
  c.tournamentSize = get(j, "tournament_size", c.tournamentSize);
  c.crowding = get(j, "crowding", c.crowding);
  c.seed = get(j, "seed", c.seed);
  c.jobs = get(j, "jobs", c.jobs);
  return c;
}

PSOConfig psoConfigFromJson(const Json& j) {
  checkKeys(j, {"particle_count", "max_iterations", "cognitive", "social", "inertia", "velocity_clamp", "seed", "jobs"},
            "pso");
  PSOConfig c;
  c.particleCount = get(j, "particle_count", c.particleCount);
  c.maxIterations = get(j, "max_iterations", c.maxIterations);
  c.cognitiveRate = get(j, "cognitive", c.cognitiveRate);
  c.socialRate = get(j, "social", c.socialRate);
  c.inertiaWeight = get(j, "inertia", c.inertiaWeight);
  c.velocityClamp = get(j, "velocity_clamp", c.velocityClamp);
  c.seed = get(j, "seed", c.seed);
  c.jobs = get(j, "jobs", c.jobs);
  return c;
}

BBoxConfig bboxConfigFromJson(const Json& j) {
  checkKeys(j, {"threshold", "alpha", "beta", "lambda", "max_shift_x", "max_shift_y", "coarse_to_fine"}, "bbox");
  BBoxConfig c;
  c.threshold = get(j, "threshold", c.threshold);
  c.verticalExponent = get(j, "alpha", c.verticalExponent);
  c.distanceExponent = get(j, "beta", c.distanceExponent);
  c.distanceWeight = get(j, "lambda", c.distanceWeight);
  c.maxShiftX = get(j, "max_shift_x", c.maxShiftX);
  c.maxShiftY = get(j, "max_shift_y", c.maxShiftY);
  c.coarseToFine = get(j, "coarse_to_fine", c.coarseToFine);
  try {
    c.validate();
  } catch (const Error& e) {
    fail(ErrorClass::kConfig, e.kind(), e.what());
  }
  return c;
}

PrototypeOptions prototypeOptionsFromJson(const Json& j) {
  checkKeys(j, {"bin_width_deg", "downsample", "temperature", "floor_db"}, "model");
  PrototypeOptions o;
  o.binWidthDeg = get(j, "bin_width_deg", o.binWidthDeg);
  o.downsample = get(j, "downsample", o.downsample);
  o.temperature = get(j, "temperature", o.temperature);
  o.floorDb = get(j, "floor_db", o.floorDb);
  return o;
}

SynthConfig synthConfigFromJson(const Json& j) {
  checkKeys(j,
            {"classes", "class_seed", "seed", "class_options", "incidences_deg", "azimuth_step_deg",
             "azimuth_offset_deg", "jitter_px"},
            "synth");
  SynthConfig c;
  c.classes = get(j, "classes", c.classes);
  c.classSeed = get(j, "class_seed", c.classSeed);
  c.seed = get(j, "seed", c.seed);
  c.classOptions = classOptionsFromJson(section(j, "class_options"));
  c.incidencesDeg = get(j, "incidences_deg", c.incidencesDeg);
  c.azimuthStepDeg = get(j, "azimuth_step_deg", c.azimuthStepDeg);
  c.azimuthOffsetDeg = get(j, "azimuth_offset_deg", c.azimuthOffsetDeg);
  c.jitterPx = get(j, "jitter_px", c.jitterPx);
  if (c.classes < 1) fail(ErrorClass::kConfig, "InvalidValue", "synth.classes must be >= 1");
  if (!(c.azimuthStepDeg > 0.0)) fail(ErrorClass::kConfig, "InvalidValue", "synth.azimuth_step_deg must be > 0");
  if (c.incidencesDeg.empty()) fail(ErrorClass::kConfig, "InvalidValue", "synth.incidences_deg is empty");
  return c;
}

AnchorMode anchorModeFromString(const std::string& s) {
  if (s == "box") return AnchorMode::kBox;
  if (s == "truth") return AnchorMode::kTruth;
  if (s == "center") return AnchorMode::kCenter;
  fail(ErrorClass::kConfig, "InvalidValue", "anchors must be box, truth or center, got " + s);
}

AttackConfig attackConfigFromJson(const Json& j) {
  checkKeys(j,
            {"reflectors", "optimizer", "de", "pso", "variant", "scene_width", "scene_height", "complex_composition"},
            "attack");
  AttackConfig c;
  c.reflectors = get(j, "reflectors", c.reflectors);
  c.optimizer = get(j, "optimizer", c.optimizer);
  c.de = deConfigFromJson(section(j, "de"));
  c.pso = psoConfigFromJson(section(j, "pso"));
  const int variant = get(j, "variant", 1);
  if (variant < 1 || variant > 4) fail(ErrorClass::kConfig, "InvalidValue", "attack.variant must be 1..4");
  c.variant = static_cast<AngleVariant>(variant);
  c.sceneWidth = get(j, "scene_width", c.sceneWidth);
  c.sceneHeight = get(j, "scene_height", c.sceneHeight);
  c.complexComposition = get(j, "complex_composition", c.complexComposition);
  if (c.reflectors < 4) fail(ErrorClass::kConfig, "InvalidValue", "attack.reflectors must be >= 4");
  if (c.optimizer != "de" && c.optimizer != "pso") {
    fail(ErrorClass::kConfig, "InvalidValue", "attack.optimizer must be de or pso");
  }
  if (!(c.sceneWidth > 0.0) || !(c.sceneHeight > 0.0)) {
    fail(ErrorClass::kConfig, "InvalidValue", "scene_width and scene_height must be > 0");
  }
  return c;
}

// Defaults of the desk experiment. The synthetic classes share one body and
// differ by one weak scatterer each; the classifier pools 4x4 pixels; the
// attack box covers the vehicle footprint.
DeskConfig deskConfigFromJson(const Json& j) {
  checkKeys(j,
            {"synth", "pool_seed", "pool_azimuth_offset_deg", "model", "attack", "train_spacing_deg",
             "train_tolerance_deg", "test_spacing_deg", "test_tolerance_deg", "split_seed", "random_draws",
             "random_seed", "known_aspect_de", "uncertainties_deg", "anchors", "bbox", "run_eight_reflectors"},
            "desk");
  DeskConfig c;
  Json synth = section(j, "synth");
  if (synth.is_null()) synth = Json::object();
  if (!synth.contains("class_options")) {
    synth["class_options"] = Json{{"clutter_level", 0.02}, {"distinctive_amplitude", 0.18}};
  }
  c.synth = synthConfigFromJson(synth);
  c.poolSeed = get(j, "pool_seed", c.poolSeed);
  c.poolAzimuthOffsetDeg = get(j, "pool_azimuth_offset_deg", c.poolAzimuthOffsetDeg);
  Json model = section(j, "model");
  if (model.is_null()) model = Json{{"bin_width_deg", 2.5}, {"downsample", 4}, {"temperature", 0.1}, {"floor_db", -20.0}};
  c.model = prototypeOptionsFromJson(model);
  Json attack = section(j, "attack");
  if (attack.is_null()) attack = Json{{"scene_width", 7.0}, {"scene_height", 3.6}};
  c.attack = attackConfigFromJson(attack);
  c.trainSpacingDeg = get(j, "train_spacing_deg", c.trainSpacingDeg);
  c.trainToleranceDeg = get(j, "train_tolerance_deg", c.trainToleranceDeg);
  c.testSpacingDeg = get(j, "test_spacing_deg", c.testSpacingDeg);
  c.testToleranceDeg = get(j, "test_tolerance_deg", c.testToleranceDeg);
  c.splitSeed = get(j, "split_seed", c.splitSeed);
  c.randomDraws = get(j, "random_draws", c.randomDraws);
  c.randomSeed = get(j, "random_seed", c.randomSeed);
  c.knownAspectDe = deConfigFromJson(section(j, "known_aspect_de"));
  c.uncertaintiesDeg = get(j, "uncertainties_deg", c.uncertaintiesDeg);
  c.anchors = anchorModeFromString(get<std::string>(j, "anchors", "truth"));
  c.box = bboxConfigFromJson(section(j, "bbox"));
  c.runEightReflectors = get(j, "run_eight_reflectors", c.runEightReflectors);
  return c;
}

// ---------------------------------------------------------------------------
// Data and anchors

std::vector<SarSample> synthesizeDataset(const SynthConfig& cfg, const FastRenderer& renderer) {
  const auto classes = makeSyntheticClasses(cfg.classes, cfg.classSeed, cfg.classOptions);
  const int steps = static_cast<int>(std::floor(360.0 / cfg.azimuthStepDeg + 1e-9));
  std::vector<SarSample> out;
  out.reserve(classes.size() * cfg.incidencesDeg.size() * static_cast<std::size_t>(steps));
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (std::size_t k = 0; k < cfg.incidencesDeg.size(); ++k) {
      const double inc = degToRad(cfg.incidencesDeg[k]);
      const PointResponseRenderer& pr = renderer.forIncidence(inc);
      for (int a = 0; a < steps; ++a) {
        const double azDeg = std::fmod(cfg.azimuthOffsetDeg + a * cfg.azimuthStepDeg, 360.0);
        const std::uint64_t seed = deriveSeed(cfg.seed, (c << 32) | k, static_cast<std::uint64_t>(a));
        out.push_back(renderSyntheticSample(classes[c], AspectAngles{inc, degToRad(azDeg)}, pr, seed,
                                            SyntheticRenderOptions{cfg.jitterPx}));
      }
    }
  }
  return out;
}

std::vector<Vec2> boxAnchors(const std::vector<SarSample>& samples, const std::vector<SarSample>& reference,
                             const BBoxConfig& cfg, const SarSystemSpec& spec) {
  const DatasetIndex refIndex(reference);
  std::map<DatasetIndex::Key, RotatedRect> refs;
  for (const auto& [key, members] : refIndex.groups()) {
    std::vector<SarSample> group;
    for (std::size_t i : members) group.push_back(reference[i]);
    refs[key] = referenceRect(compositeImage(group, spec), cfg.threshold);
  }
  std::vector<Vec2> anchors;
  anchors.reserve(samples.size());
  for (const auto& s : samples) {
    const DatasetIndex::Key key{s.classLabel, std::round(s.incidenceDeg * 100.0) / 100.0};
    auto it = refs.find(key);
    if (it == refs.end()) {
      fail(ErrorClass::kData, "EmptyGroup", "no reference for " + s.classLabel + " at incidence " +
                                                std::to_string(s.incidenceDeg));
    }
    const BoxFit fit = localizeBox(preprocessForBox(s.chip), degToRad(s.azimuthDeg), it->second, cfg, spec);
    anchors.emplace_back(fit.rect.centerY, fit.rect.centerX);
  }
  return anchors;
}

// ---------------------------------------------------------------------------
// Attacks

AttackOutcome optimizeAttack(const ObservationSet& obs, const TargetModel& model, const std::string& classLabel,
                             const PerturbationRenderer& renderer, const AttackConfig& cfg) {
  const Bounds full = attackBounds(cfg.reflectors, cfg.sceneWidth, cfg.sceneHeight);
  const ReducedSpace space = fixedAngleVariants(full, cfg.reflectors, cfg.variant);
  auto objective = [&](const std::vector<double>& free) {
    AttackParams p;
    p.reflectorCount = cfg.reflectors;
    p.sceneWidth = cfg.sceneWidth;
    p.sceneHeight = cfg.sceneHeight;
    p.theta = space.expand(free);
    return attackLoss(p, obs, model, classLabel, renderer, cfg.complexComposition);
  };
  AttackOutcome out;
  out.trace = cfg.optimizer == "pso" ? minimizePSO(objective, space.bounds, cfg.pso)
                                     : minimizeDE(objective, space.bounds, cfg.de);
  out.params.reflectorCount = cfg.reflectors;
  out.params.sceneWidth = cfg.sceneWidth;
  out.params.sceneHeight = cfg.sceneHeight;
  out.params.theta = space.expand(out.trace.bestParams);
  return out;
}

AttackFn makeAttackFn(std::vector<ReflectorConfig> reflectors, const PerturbationRenderer& renderer,
                      const SarSystemSpec& spec, std::map<std::string, Vec2> anchorPixels, bool complexComposition) {
  return [reflectors = std::move(reflectors), &renderer, spec, anchors = std::move(anchorPixels),
          complexComposition](const SarSample& s) {
    auto it = anchors.find(s.sourceId);
    std::vector<Vec2> anchor;
    if (it != anchors.end()) anchor.push_back(it->second);
    const Observation o = makeObservations({s}, spec, anchor)[0];
    return adversarialChip(o, reflectors, renderer, complexComposition);
  };
}

AttackParams randomParams(int reflectors, double sceneWidth, double sceneHeight, std::uint64_t seed) {
  const Bounds b = attackBounds(reflectors, sceneWidth, sceneHeight);
  Rng rng(seed);
  AttackParams p;
  p.reflectorCount = reflectors;
  p.sceneWidth = sceneWidth;
  p.sceneHeight = sceneHeight;
  for (std::size_t i = 0; i < b.lower.size(); ++i) {
    p.theta.push_back(b.lower[i] + (b.upper[i] - b.lower[i]) * uniform01(rng));
  }
  return p;
}

KnownAspectOutcome optimizeKnownAspect(const Observation& training, const TargetModel& model,
                                       const std::string& classLabel, const PerturbationRenderer& renderer,
                                       double sceneWidth, double sceneHeight, const DEConfig& de,
                                       bool complexComposition) {
  KnownAspectOutcome out;
  out.kaa.estimatedAzimuth = training.aspect.azimuth;
  out.kaa.estimatedIncidence = training.aspect.incidence;
  Bounds b;
  b.lower = {-sceneWidth / 2, -sceneHeight / 2};
  b.upper = {sceneWidth / 2, sceneHeight / 2};
  auto objective = [&](const std::vector<double>& v) {
    return knownAspectLoss(out.kaa, v[0], v[1], training, model, classLabel, renderer, complexComposition);
  };
  out.trace = minimizeDE(objective, b, de);
  out.x = out.trace.bestParams[0];
  out.y = out.trace.bestParams[1];
  return out;
}

// ---------------------------------------------------------------------------
// Desk experiment

Json DeskReport::toJson() const {
  auto rep = [](const FoolingReport& r) {
    Json classes = Json::object();
    for (const auto& [label, rate] : r.perClassRates) classes[label] = rate;
    return Json{{"average", r.averageRate}, {"per_class", classes}};
  };
  return Json{{"clean_accuracy", cleanAccuracy},
              {"tx_amplitude", txAmplitude},
              {"m4", rep(m4)},
              {"m8", rep(m8)},
              {"random_best_of", rep(randomBest)},
              {"known_aspect_training_rates", knownAspectTrainingRates},
              {"uncertainty_rates", uncertaintyRates},
              {"seconds", seconds}};
}

namespace {

std::map<std::string, Vec2> anchorMap(const std::vector<SarSample>& samples, const std::vector<Vec2>& anchors) {
  std::map<std::string, Vec2> out;
  for (std::size_t i = 0; i < samples.size(); ++i) out[samples[i].sourceId] = anchors[i];
  return out;
}

FoolingReport reportFromRates(const std::map<std::string, double>& rates) {
  FoolingReport r;
  r.perClassRates = rates;
  double sum = 0.0;
  for (const auto& kv : rates) sum += kv.second;
  r.averageRate = rates.empty() ? 0.0 : sum / static_cast<double>(rates.size());
  return r;
}

}  // namespace

DeskReport runDeskExperiment(const DeskConfig& cfg, std::ostream* log) {
  const auto t0 = std::chrono::steady_clock::now();
  auto say = [&](const std::string& msg) {
    if (log) *log << "[" << std::fixed << std::setprecision(1) << elapsed(t0) << "s] " << msg << std::endl;
  };
  DeskReport report;
  const SarSystemSpec spec;
  FastRenderer renderer(spec);

  // Training set for the classifier, and an independent attack pool at
  // shifted azimuths with fresh clutter.
  const std::vector<SarSample> trainSet = synthesizeDataset(cfg.synth, renderer);
  SynthConfig poolCfg = cfg.synth;
  poolCfg.seed = cfg.poolSeed;
  poolCfg.azimuthOffsetDeg = cfg.synth.azimuthOffsetDeg + cfg.poolAzimuthOffsetDeg;
  const std::vector<SarSample> pool = synthesizeDataset(poolCfg, renderer);
  say("datasets: " + std::to_string(trainSet.size()) + " training, " + std::to_string(pool.size()) + " pool");

  const auto model = ReferencePrototypeModel::train(trainSet, cfg.model, "reference");
  std::size_t correct = 0;
  for (const auto& s : pool) correct += model.classify(s.chip) == s.classLabel;
  report.cleanAccuracy = static_cast<double>(correct) / static_cast<double>(pool.size());
  say("clean accuracy " + std::to_string(report.cleanAccuracy));

  const double inc = degToRad(cfg.synth.incidencesDeg.front());
  report.txAmplitude = calibrateTxAmplitude(renderer, inc, meanClassMaximum(trainSet));

  std::vector<Vec2> anchors;
  switch (cfg.anchors) {
    case AnchorMode::kBox: anchors = boxAnchors(pool, trainSet, cfg.box, spec); break;
    case AnchorMode::kTruth:
      for (const auto& s : pool) anchors.emplace_back(s.truthRow, s.truthCol);
      break;
    case AnchorMode::kCenter:
      for (std::size_t i = 0; i < pool.size(); ++i) anchors.emplace_back(spec.chipRows / 2, spec.chipCols / 2);
      break;
  }
  const auto anchorById = anchorMap(pool, anchors);
  say("anchors ready");

  const DatasetIndex index(pool);
  std::map<std::string, double> rates4, rates8, ratesRandom;
  std::vector<std::vector<double>> uncertaintyPerClass;
  int classOrdinal = 0;
  for (const std::string& label : model.classLabels()) {
    ++classOrdinal;
    const SubsetReport trainSplit = sampleSubset(index, label, cfg.trainSpacingDeg, cfg.trainToleranceDeg,
                                                 deriveSeed(cfg.splitSeed, static_cast<std::uint64_t>(classOrdinal), 1));
    std::vector<bool> taken(pool.size(), false);
    for (std::size_t i : trainSplit.selected) taken[i] = true;
    const SubsetReport testSplit = sampleSubset(index, label, cfg.testSpacingDeg, cfg.testToleranceDeg,
                                                deriveSeed(cfg.splitSeed, static_cast<std::uint64_t>(classOrdinal), 2),
                                                taken);
    std::vector<SarSample> train, test;
    std::vector<Vec2> trainAnchors;
    for (std::size_t i : trainSplit.selected) {
      train.push_back(pool[i]);
      trainAnchors.push_back(anchors[i]);
    }
    for (std::size_t i : testSplit.selected) test.push_back(pool[i]);
    const ObservationSet obs = makeObservations(train, spec, trainAnchors);

    auto runM = [&](int m) {
      AttackConfig ac = cfg.attack;
      ac.reflectors = m;
      const AttackOutcome outcome = optimizeAttack(obs, model, label, renderer, ac);
      const AttackFn fn = makeAttackFn(expandParams(outcome.params), renderer, spec, anchorById, ac.complexComposition);
      const double rate = foolingRate(model, fn, test, label);
      say(label + " m=" + std::to_string(m) + " loss " + std::to_string(outcome.trace.bestLoss) + " train " +
          std::to_string(foolingRate(model, fn, train, label)) + " test " + std::to_string(rate));
      return rate;
    };
    rates4[label] = runM(4);
    if (cfg.runEightReflectors) rates8[label] = runM(8);

    // Random placement baseline, best of the draws on the test split.
    double bestRandom = 0.0;
    for (int d = 0; d < cfg.randomDraws; ++d) {
      const AttackParams p = randomParams(4, cfg.attack.sceneWidth, cfg.attack.sceneHeight,
                                          deriveSeed(cfg.randomSeed, static_cast<std::uint64_t>(classOrdinal),
                                                     static_cast<std::uint64_t>(d)));
      const AttackFn fn = makeAttackFn(expandParams(p), renderer, spec, anchorById, cfg.attack.complexComposition);
      bestRandom = std::max(bestRandom, foolingRate(model, fn, test, label));
    }
    ratesRandom[label] = bestRandom;

    // Known-aspect single reflector trained on one observation, evaluated
    // over the class pool within each uncertainty.
    const Observation& first = obs.front();
    const KnownAspectOutcome ka = optimizeKnownAspect(first, model, label, renderer, cfg.attack.sceneWidth,
                                                      cfg.attack.sceneHeight, cfg.knownAspectDe,
                                                      cfg.attack.complexComposition);
    const AttackFn kaFn = makeAttackFn({knownAspectReflector(ka.kaa, ka.x, ka.y)}, renderer, spec, anchorById,
                                       cfg.attack.complexComposition);
    report.knownAspectTrainingRates.push_back(foolingRate(model, kaFn, {train.front()}, label));
    std::vector<double> perDelta;
    for (double deltaDeg : cfg.uncertaintiesDeg) {
      KnownAspectAttack kaa = ka.kaa;
      kaa.uncertainty = degToRad(deltaDeg);
      perDelta.push_back(partialKnowledgeEvaluate(kaa, pool, model, label, kaFn));
    }
    uncertaintyPerClass.push_back(perDelta);
    say(label + " random best " + std::to_string(bestRandom) + " known-aspect " +
        std::to_string(report.knownAspectTrainingRates.back()));
  }

  report.m4 = reportFromRates(rates4);
  report.m8 = reportFromRates(rates8);
  report.randomBest = reportFromRates(ratesRandom);
  report.uncertaintyRates.assign(cfg.uncertaintiesDeg.size(), 0.0);
  for (const auto& row : uncertaintyPerClass) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      report.uncertaintyRates[k] += row[k] / static_cast<double>(uncertaintyPerClass.size());
    }
  }
  report.seconds = elapsed(t0);
  say("done");
  return report;
}

// ---------------------------------------------------------------------------
// Commands

std::unique_ptr<TargetModel> loadModelFile(const std::string& path) {
  const std::string text = readText(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorClass::kConfig, "InvalidModel", path + ": " + e.what());
  }
  if (j.value("kind", "") == "subprocess") {
    checkKeys(j, {"kind", "command", "labels", "name"}, "model");
    return std::make_unique<SubprocessModel>(requireString(j, "command", "model"),
                                             j.at("labels").get<std::vector<std::string>>(),
                                             j.value("name", "subprocess"));
  }
  return std::make_unique<ReferencePrototypeModel>(ReferencePrototypeModel::fromJson(text));
}

namespace {

std::vector<SarSample> loadAnyDataset(const std::string& dir) {
  if (fs::exists(fs::path(dir) / "index.jsonl")) return loadDataset(dir);
  auto samples = loadMstarDirectory(dir);
  if (samples.empty()) fail(ErrorClass::kData, "EmptyDataset", "no chips under " + dir);
  return samples;
}

std::vector<Vec2> anchorsFor(const std::vector<SarSample>& samples, AnchorMode mode, const BBoxConfig& box,
                             const SarSystemSpec& spec) {
  std::vector<Vec2> out;
  switch (mode) {
    case AnchorMode::kBox: return boxAnchors(samples, samples, box, spec);
    case AnchorMode::kTruth:
      for (const auto& s : samples) {
        if (std::isnan(s.truthRow)) fail(ErrorClass::kData, "NoTruth", s.sourceId + " has no known center");
        out.emplace_back(s.truthRow, s.truthCol);
      }
      return out;
    case AnchorMode::kCenter:
      for (std::size_t i = 0; i < samples.size(); ++i) out.emplace_back(spec.chipRows / 2, spec.chipCols / 2);
      return out;
  }
  return out;
}

Json cmdSynth(const Json& config, const std::string& outDir) {
  checkKeys(config, {"spec", "synth"}, "config");
  const SarSystemSpec spec = specFromJson(section(config, "spec"));
  const SynthConfig sc = synthConfigFromJson(section(config, "synth"));
  FastRenderer renderer(spec);
  const auto samples = synthesizeDataset(sc, renderer);
  saveDataset(outDir + "/dataset", samples);
  return Json{{"samples", samples.size()}, {"dataset", outDir + "/dataset"}};
}

Json cmdTrain(const Json& config, const std::string& outDir) {
  checkKeys(config, {"dataset", "model", "name"}, "config");
  const auto samples = loadAnyDataset(requireString(config, "dataset", "config"));
  const auto model = ReferencePrototypeModel::train(samples, prototypeOptionsFromJson(section(config, "model")),
                                                    config.value("name", "reference"));
  writeText(outDir + "/model.json", model.toJson());
  std::size_t correct = 0;
  for (const auto& s : samples) correct += model.classify(s.chip) == s.classLabel;
  return Json{{"model", outDir + "/model.json"},
              {"training_accuracy", static_cast<double>(correct) / static_cast<double>(samples.size())}};
}

Json cmdSimulate(const Json& config, const std::string& outDir) {
  checkKeys(config, {"spec", "params_file", "incidences_deg", "azimuths_deg", "full_chain"}, "config");
  const SarSystemSpec spec = specFromJson(section(config, "spec"));
  const AttackParams params = parseParams(readText(requireString(config, "params_file", "config")));
  const auto incs = get<std::vector<double>>(config, "incidences_deg", {75.0});
  const auto azs = get<std::vector<double>>(config, "azimuths_deg", {0.0});
  const bool fullChain = get(config, "full_chain", false);
  const auto reflectors = expandParams(params);
  std::unique_ptr<PerturbationRenderer> renderer;
  if (fullChain) {
    renderer = std::make_unique<ChainRenderer>(spec);
  } else {
    renderer = std::make_unique<FastRenderer>(spec);
  }
  Json files = Json::array();
  for (double inc : incs) {
    for (double az : azs) {
      const AspectAngles aspect{degToRad(inc), wrapTwoPi(degToRad(az))};
      const ComplexImage img = renderer->render(reflectors, aspect);
      const std::string stem = outDir + "/perturbation_" + angleTag(inc, az);
      writeCimg(stem + ".cimg", img);
      writeMagnitudePng(stem + ".png", img.magnitude());
      files.push_back(stem + ".cimg");
    }
  }
  return Json{{"images", files}, {"count", files.size()}};
}

Json cmdAttack(const Json& config, const std::string& outDir) {
  checkKeys(config,
            {"spec", "dataset", "class", "model", "attack", "anchors", "bbox", "train_spacing_deg",
             "train_tolerance_deg", "split_seed", "calibrate"},
            "config");
  SarSystemSpec spec = specFromJson(section(config, "spec"));
  const auto samples = loadAnyDataset(requireString(config, "dataset", "config"));
  const std::string label = requireString(config, "class", "config");
  const auto model = loadModelFile(requireString(config, "model", "config"));
  const AttackConfig ac = attackConfigFromJson(section(config, "attack"));
  const AnchorMode mode = anchorModeFromString(get<std::string>(config, "anchors", "box"));
  const BBoxConfig box = bboxConfigFromJson(section(config, "bbox"));

  const DatasetIndex index(samples);
  const SubsetReport split = sampleSubset(index, label, get(config, "train_spacing_deg", 10.0),
                                          get(config, "train_tolerance_deg", 2.0), get<std::uint64_t>(config, "split_seed", 11));
  if (split.selected.empty()) fail(ErrorClass::kData, "EmptySplit", "no training samples for " + label);
  std::vector<SarSample> train;
  for (std::size_t i : split.selected) train.push_back(samples[i]);
  const std::vector<Vec2> anchors = anchorsFor(train, mode, box, spec);

  FastRenderer renderer(spec);
  double tx = spec.txAmplitude;
  if (get(config, "calibrate", true)) {
    tx = calibrateTxAmplitude(renderer, degToRad(train.front().incidenceDeg), meanClassMaximum(samples));
  }
  const ObservationSet obs = makeObservations(train, spec, anchors);
  const AttackOutcome outcome = optimizeAttack(obs, *model, label, renderer, ac);
  writeText(outDir + "/params.txt", formatParams(outcome.params));
  writeText(outDir + "/trace.csv", outcome.trace.toCsv());

  const AttackFn fn = makeAttackFn(expandParams(outcome.params), renderer, spec, anchorMap(train, anchors),
                                   ac.complexComposition);
  const FoolingReport rep = foolingReport(*model, {{label, fn}}, train);
  writeText(outDir + "/fooling_train.csv", rep.toCsv());
  return Json{{"best_loss", outcome.trace.bestLoss},
              {"evaluations", outcome.trace.evaluationCount},
              {"train_samples", train.size()},
              {"train_fooling_rate", rep.averageRate},
              {"tx_amplitude", tx},
              {"params", outDir + "/params.txt"}};
}

Json cmdEvaluate(const Json& config, const std::string& outDir) {
  checkKeys(config, {"spec", "dataset", "params", "models", "anchors", "bbox", "tx_amplitude"}, "config");
  SarSystemSpec spec = specFromJson(section(config, "spec"));
  const auto samples = loadAnyDataset(requireString(config, "dataset", "config"));
  if (!config.contains("models") || !config.at("models").is_array() || config.at("models").empty()) {
    fail(ErrorClass::kConfig, "MissingKey", "config.models");
  }
  std::vector<std::unique_ptr<TargetModel>> models;
  for (const auto& p : config.at("models")) models.push_back(loadModelFile(p.get<std::string>()));
  const AnchorMode mode = anchorModeFromString(get<std::string>(config, "anchors", "box"));
  const auto anchors = anchorMap(samples, anchorsFor(samples, mode, bboxConfigFromJson(section(config, "bbox")), spec));

  FastRenderer renderer(spec);
  if (config.contains("tx_amplitude")) {
    renderer.setTxAmplitude(config.at("tx_amplitude").get<double>());
  } else {
    calibrateTxAmplitude(renderer, degToRad(samples.front().incidenceDeg), meanClassMaximum(samples));
  }
  // "params": {class: file}; a class without a file gets the identity attack.
  std::map<std::string, AttackFn> attacks;
  const Json& params = section(config, "params");
  for (const std::string& label : models.front()->classLabels()) {
    if (params.is_object() && params.contains(label)) {
      const AttackParams p = parseParams(readText(params.at(label).get<std::string>()));
      attacks[label] = makeAttackFn(expandParams(p), renderer, spec, anchors, true);
    } else {
      attacks[label] = [](const SarSample& s) { return s.chip; };
    }
  }
  std::vector<const TargetModel*> ptrs;
  std::vector<std::string> names;
  for (const auto& m : models) {
    ptrs.push_back(m.get());
    names.push_back(m->name());
  }
  const FoolingReport rep = foolingReport(*models.front(), attacks, samples);
  writeText(outDir + "/fooling.csv", rep.toCsv());
  const auto matrix = transferMatrix({ptrs.front()}, ptrs, {attacks}, samples);
  writeText(outDir + "/transfer.csv", transferMatrixCsv({names.front()}, names, matrix));
  return Json{{"average_fooling_rate", rep.averageRate}, {"transfer", matrix}};
}

Json cmdBBox(const Json& config, const std::string& outDir) {
  checkKeys(config, {"spec", "dataset", "bbox", "overlays"}, "config");
  const SarSystemSpec spec = specFromJson(section(config, "spec"));
  const auto samples = loadAnyDataset(requireString(config, "dataset", "config"));
  const BBoxConfig cfg = bboxConfigFromJson(section(config, "bbox"));
  const bool overlays = get(config, "overlays", true);
  const DatasetIndex index(samples);
  std::vector<std::string> ids;
  std::vector<RotatedRect> boxes;
  if (overlays) ensureDir(outDir + "/overlays");
  for (const auto& [key, members] : index.groups()) {
    std::vector<SarSample> group;
    for (std::size_t i : members) group.push_back(samples[i]);
    const RotatedRect ref = referenceRect(compositeImage(group, spec), cfg.threshold);
    for (const auto& s : group) {
      const BoxFit fit = localizeBox(preprocessForBox(s.chip), degToRad(s.azimuthDeg), ref, cfg, spec);
      ids.push_back(s.sourceId);
      boxes.push_back(fit.rect);
      if (!overlays) continue;
      // Grayscale chip with the box outline in red.
      const auto gray = logGray(s.chip);
      std::vector<std::uint8_t> rgb(gray.size() * 3);
      for (std::size_t p = 0; p < gray.size(); ++p) rgb[3 * p] = rgb[3 * p + 1] = rgb[3 * p + 2] = gray[p];
      const auto corners = fit.rect.corners();
      for (std::size_t k = 0; k < corners.size(); ++k) {
        const Vec2 a = corners[k], b = corners[(k + 1) % corners.size()];
        const int n = static_cast<int>(std::ceil((b - a).norm() * 2)) + 1;
        for (int t = 0; t <= n; ++t) {
          const Vec2 q = a + (b - a) * (static_cast<double>(t) / n);
          const int c = static_cast<int>(std::lround(q.x())), r = static_cast<int>(std::lround(q.y()));
          if (r < 0 || c < 0 || r >= s.chip.rows() || c >= s.chip.cols()) continue;
          const std::size_t p = static_cast<std::size_t>(r * s.chip.cols() + c);
          rgb[3 * p] = 255;
          rgb[3 * p + 1] = 0;
          rgb[3 * p + 2] = 0;
        }
      }
      writePngRgb(outDir + "/overlays/" + s.sourceId + ".png", rgb, static_cast<int>(s.chip.rows()),
                  static_cast<int>(s.chip.cols()));
    }
  }
  writeText(outDir + "/boxes.csv", boxesCsv(ids, boxes));
  return Json{{"boxes", boxes.size()}, {"csv", outDir + "/boxes.csv"}};
}

Json cmdDesk(const Json& config, const std::string& outDir) {
  std::ofstream log(outDir + "/desk.log");
  const DeskReport report = runDeskExperiment(deskConfigFromJson(config), &log);
  const Json j = report.toJson();
  writeText(outDir + "/desk_report.json", j.dump(2) + "\n");
  return j;
}

}  // namespace

Json runCommand(const std::string& command, const Json& config, const std::string& outDir) {
  ensureDir(outDir);
  if (command == "synth") return cmdSynth(config, outDir);
  if (command == "train") return cmdTrain(config, outDir);
  if (command == "simulate") return cmdSimulate(config, outDir);
  if (command == "attack") return cmdAttack(config, outDir);
  if (command == "evaluate") return cmdEvaluate(config, outDir);
  if (command == "bbox") return cmdBBox(config, outDir);
  if (command == "desk") return cmdDesk(config, outDir);
  fail(ErrorClass::kConfig, "UnknownCommand", command);
}

}  // namespace sarcr
