// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/attack.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "core/errors.hpp"

namespace sarcr {

Bounds attackBounds(int m, double w, double h) {
  if (m < 1) fail(ErrorClass::kInvalidArgument, "InvalidReflectorCount", "need at least one reflector");
  if (!(w > 0.0 && h > 0.0)) fail(ErrorClass::kInvalidArgument, "InvalidScene", "scene size must be positive");
  Bounds b;
  for (int i = 0; i < m; ++i) {
    b.lower.push_back(-w / 2);
    b.upper.push_back(w / 2);
  }
  for (int i = 0; i < m; ++i) {
    b.lower.push_back(-h / 2);
    b.upper.push_back(h / 2);
  }
  for (int i = 0; i < m; ++i) {
    b.lower.push_back(0.0);
    b.upper.push_back(kPi / 2);
  }
  b.lower.push_back(0.0);
  b.upper.push_back(2.0 * kPi / m);
  return b;
}

std::vector<ReflectorConfig> expandParams(const AttackParams& p) {
  const int m = p.reflectorCount;
  if (m < 1) fail(ErrorClass::kInvalidArgument, "ConstraintViolation", "reflectorCount must be >= 1");
  if (p.theta.size() != static_cast<std::size_t>(3 * m + 1)) {
    fail(ErrorClass::kInvalidArgument, "ConstraintViolation",
         "theta has " + std::to_string(p.theta.size()) + " entries, expected " + std::to_string(3 * m + 1));
  }
  const Bounds b = attackBounds(m, p.sceneWidth, p.sceneHeight);
  static const char* names[] = {"x", "y", "theta"};
  std::string violations;
  for (std::size_t k = 0; k < p.theta.size(); ++k) {
    const double v = p.theta[k];
    if (v >= b.lower[k] && v <= b.upper[k]) continue;
    const std::string name = k == p.theta.size() - 1
                                 ? std::string("phi_1")
                                 : std::string(names[k / static_cast<std::size_t>(m)]) + "_" +
                                       std::to_string(k % static_cast<std::size_t>(m) + 1);
    std::ostringstream o;
    o << std::setprecision(10) << name << "=" << v << " not in [" << b.lower[k] << ", " << b.upper[k] << "]";
    violations += (violations.empty() ? "" : "; ") + o.str();
  }
  if (!violations.empty()) fail(ErrorClass::kInvalidArgument, "ConstraintViolation", violations);

  std::vector<ReflectorConfig> out(static_cast<std::size_t>(m));
  const double phi1 = p.theta[static_cast<std::size_t>(3 * m)];
  for (int i = 0; i < m; ++i) {
    auto& r = out[static_cast<std::size_t>(i)];
    r.x = p.theta[static_cast<std::size_t>(i)];
    r.y = p.theta[static_cast<std::size_t>(m + i)];
    r.theta = p.theta[static_cast<std::size_t>(2 * m + i)];
    r.phi = phi1 + i * (2.0 * kPi / m);
  }
  return out;
}

AttackParams packParams(const std::vector<ReflectorConfig>& reflectors, double w, double h) {
  AttackParams p;
  p.reflectorCount = static_cast<int>(reflectors.size());
  p.sceneWidth = w;
  p.sceneHeight = h;
  if (reflectors.empty()) fail(ErrorClass::kInvalidArgument, "ConstraintViolation", "no reflectors");
  const int m = p.reflectorCount;
  p.theta.assign(static_cast<std::size_t>(3 * m + 1), 0.0);
  for (int i = 0; i < m; ++i) {
    p.theta[static_cast<std::size_t>(i)] = reflectors[static_cast<std::size_t>(i)].x;
    p.theta[static_cast<std::size_t>(m + i)] = reflectors[static_cast<std::size_t>(i)].y;
    p.theta[static_cast<std::size_t>(2 * m + i)] = reflectors[static_cast<std::size_t>(i)].theta;
  }
  p.theta[static_cast<std::size_t>(3 * m)] = reflectors.front().phi;
  return p;
}

std::string formatParams(const AttackParams& p) {
  const auto refl = expandParams(p);
  std::ostringstream o;
  o << std::setprecision(17);
  o << "reflectors = " << p.reflectorCount << "\n";
  o << "scene_width = " << p.sceneWidth << "\n";
  o << "scene_height = " << p.sceneHeight << "\n";
  o << "# index x y theta_deg phi_deg\n";
  for (std::size_t i = 0; i < refl.size(); ++i) {
    o << i + 1 << " " << refl[i].x << " " << refl[i].y << " " << radToDeg(refl[i].theta) << " "
      << radToDeg(refl[i].phi) << "\n";
  }
  return o.str();
}

AttackParams parseParams(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  double w = 38.4, h = 38.4;
  int declared = -1;
  std::vector<ReflectorConfig> refl;
  int lineNo = 0;
  auto bad = [&](const std::string& m) {
    fail(ErrorClass::kConfig, "MalformedParams", "line " + std::to_string(lineNo) + ": " + m);
  };
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq != std::string::npos) {
      std::istringstream k(line.substr(0, eq)), v(line.substr(eq + 1));
      std::string key;
      double value = 0.0;
      k >> key;
      if (!(v >> value)) bad("bad value for " + key);
      if (key == "reflectors") {
        declared = static_cast<int>(value);
      } else if (key == "scene_width") {
        w = value;
      } else if (key == "scene_height") {
        h = value;
      } else {
        bad("unknown key " + key);
      }
      continue;
    }
    std::istringstream f(line);
    int index = 0;
    ReflectorConfig r;
    double thetaDeg = 0.0, phiDeg = 0.0;
    if (!(f >> index >> r.x >> r.y >> thetaDeg >> phiDeg)) bad("expected: index x y theta_deg phi_deg");
    if (index != static_cast<int>(refl.size()) + 1) bad("reflector indices must run 1, 2, ...");
    r.theta = degToRad(thetaDeg);
    r.phi = degToRad(phiDeg);
    refl.push_back(r);
  }
  if (refl.empty()) fail(ErrorClass::kConfig, "MalformedParams", "no reflector lines");
  if (declared >= 0 && declared != static_cast<int>(refl.size())) {
    fail(ErrorClass::kConfig, "MalformedParams", "reflector count does not match the declared count");
  }
  const int m = static_cast<int>(refl.size());
  for (int i = 1; i < m; ++i) {
    const double expected = refl[0].phi + i * 2.0 * kPi / m;
    if (std::abs(refl[static_cast<std::size_t>(i)].phi - expected) > 1e-9) {
      fail(ErrorClass::kConfig, "ConstraintViolation", "reflector azimuths are not evenly spaced");
    }
  }
  AttackParams p = packParams(refl, w, h);
  expandParams(p);  // validates the box constraints
  return p;
}

std::vector<ReflectorConfig> placeReflectors(std::vector<ReflectorConfig> reflectors, const Vec2& anchor) {
  for (auto& r : reflectors) {
    r.x += anchor.x();
    r.y += anchor.y();
  }
  return reflectors;
}

RealMatrix composeAdversarial(const RealMatrix& clean, const ComplexImage& perturbation) {
  if (clean.rows() != perturbation.pixels.rows() || clean.cols() != perturbation.pixels.cols()) {
    fail(ErrorClass::kInvalidArgument, "GeometryMismatch", "chip and perturbation rasters differ");
  }
  RealMatrix out(clean.rows(), clean.cols());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const cd v = perturbation.pixels.data()[i];
    out.data()[i] = clean.data()[i] + std::sqrt(v.real() * v.real() + v.imag() * v.imag());
  }
  return out;
}

RealMatrix composeAdversarial(const ComplexMatrix& clean, const ComplexImage& perturbation) {
  if (clean.rows() != perturbation.pixels.rows() || clean.cols() != perturbation.pixels.cols()) {
    fail(ErrorClass::kInvalidArgument, "GeometryMismatch", "chip and perturbation rasters differ");
  }
  RealMatrix out(clean.rows(), clean.cols());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const cd v = clean.data()[i] + perturbation.pixels.data()[i];
    out.data()[i] = std::sqrt(v.real() * v.real() + v.imag() * v.imag());
  }
  return out;
}

ComplexImage ChainRenderer::render(const std::vector<ReflectorConfig>& reflectors, const AspectAngles& aspect) const {
  if (reflectors.empty()) {
    ComplexImage img;
    img.spacingRange = spec_.gsdRange;
    img.spacingAzimuth = spec_.gsdAzimuth;
    img.pixels = ComplexMatrix::Zero(spec_.chipRows, spec_.chipCols);
    return img;
  }
  return imagePerturbation(reflectors, aspect, spec_);
}

const PointResponseRenderer& FastRenderer::forIncidence(double incidence) const {
  const long long key = std::llround(incidence * 1e9);
  std::lock_guard<std::mutex> lock(mutex_);
  auto& slot = tables_[key];
  if (!slot) slot = std::make_shared<PointResponseRenderer>(spec_, incidence);
  return *slot;
}

void FastRenderer::setTxAmplitude(double amplitude) {
  std::lock_guard<std::mutex> lock(mutex_);
  for (auto& [key, r] : tables_) r->setTxAmplitude(amplitude);
  spec_.txAmplitude = amplitude;
}

ComplexImage FastRenderer::render(const std::vector<ReflectorConfig>& reflectors, const AspectAngles& aspect) const {
  return forIncidence(aspect.incidence).renderReflectors(reflectors, aspect);
}

ObservationSet makeObservations(const std::vector<SarSample>& samples, const SarSystemSpec& spec,
                                const std::vector<Vec2>& anchorPixels) {
  if (samples.empty()) fail(ErrorClass::kData, "EmptyObservationSet", "no observations");
  if (!anchorPixels.empty() && anchorPixels.size() != samples.size()) {
    fail(ErrorClass::kInvalidArgument, "SizeMismatch", "one anchor per sample is required");
  }
  ObservationSet out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SarSample& s = samples[i];
    if (s.chip.rows() != samples.front().chip.rows() || s.chip.cols() != samples.front().chip.cols()) {
      fail(ErrorClass::kData, "GeometryMismatch", "observation chips differ in size");
    }
    Observation o;
    o.aspect = s.aspect();
    o.clean = s.chip;
    o.cleanComplex = s.complexChip;
    o.classLabel = s.classLabel;
    const Vec2 px = anchorPixels.empty() ? Vec2(spec.chipRows / 2, spec.chipCols / 2) : anchorPixels[i];
    o.anchor = pixelToGround(px.x(), px.y(), o.aspect.azimuth, spec);
    out.push_back(std::move(o));
  }
  return out;
}

RealMatrix adversarialChip(const Observation& obs, const std::vector<ReflectorConfig>& reflectors,
                           const PerturbationRenderer& renderer, bool complexComposition) {
  const ComplexImage pert = renderer.render(placeReflectors(reflectors, obs.anchor), obs.aspect);
  if (complexComposition && obs.cleanComplex.size() > 0) return composeAdversarial(obs.cleanComplex, pert);
  return composeAdversarial(obs.clean, pert);
}

double attackLoss(const AttackParams& params, const ObservationSet& obs, const TargetModel& model,
                  const std::string& classLabel, const PerturbationRenderer& renderer, bool complexComposition) {
  if (obs.empty()) fail(ErrorClass::kData, "EmptyObservationSet", "no observations");
  const auto reflectors = expandParams(params);
  const int label = model.classIndex(classLabel);
  double sum = 0.0;
  for (const auto& o : obs) {
    sum += crossEntropy(model.predict(adversarialChip(o, reflectors, renderer, complexComposition)), label);
  }
  return -sum / static_cast<double>(obs.size());
}

ReflectorConfig knownAspectReflector(const KnownAspectAttack& kaa, double x, double y) {
  ReflectorConfig r;
  r.x = x;
  r.y = y;
  r.theta = kaa.estimatedIncidence;
  r.phi = kaa.estimatedAzimuth;
  return r;
}

double knownAspectLoss(const KnownAspectAttack& kaa, double x, double y, const Observation& training,
                       const TargetModel& model, const std::string& classLabel,
                       const PerturbationRenderer& renderer, bool complexComposition) {
  const RealMatrix adv = adversarialChip(training, {knownAspectReflector(kaa, x, y)}, renderer, complexComposition);
  return -crossEntropy(model.predict(adv), model.classIndex(classLabel));
}

double boresightPeak(const FastRenderer& renderer, double incidence) {
  ReflectorConfig r;
  r.theta = incidence;
  r.phi = 0.0;
  return renderer.render({r}, AspectAngles{incidence, 0.0}).pixels.cwiseAbs().maxCoeff();
}

double calibrateTxAmplitude(FastRenderer& renderer, double incidence, double targetPeak) {
  if (!(targetPeak > 0.0) || !std::isfinite(targetPeak)) {
    fail(ErrorClass::kInvalidArgument, "InvalidCalibrationTarget", "target peak must be positive");
  }
  auto peakAt = [&](double a) {
    renderer.setTxAmplitude(a);
    return boresightPeak(renderer, incidence);
  };
  double lo = 0.0, hi = 1.0;
  for (int i = 0; peakAt(hi) < targetPeak; ++i) {
    if (i > 200) fail(ErrorClass::kNumerical, "CalibrationFailed", "cannot bracket the target peak");
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && (hi - lo) > 1e-12 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (peakAt(mid) < targetPeak ? lo : hi) = mid;
  }
  const double a = 0.5 * (lo + hi);
  renderer.setTxAmplitude(a);
  return a;
}

double meanClassMaximum(const std::vector<SarSample>& samples) {
  if (samples.empty()) fail(ErrorClass::kData, "EmptyDataset", "no samples");
  std::map<std::string, std::pair<double, int>> acc;
  for (const auto& s : samples) {
    auto& a = acc[s.classLabel];
    a.first += s.chip.maxCoeff();
    ++a.second;
  }
  double sum = 0.0;
  for (const auto& [label, a] : acc) sum += a.first / a.second;
  return sum / static_cast<double>(acc.size());
}

}  // namespace sarcr
