// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/imaging.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/fft.hpp"
#include "core/interp.hpp"

namespace sarcr {

void SarSystemSpec::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorClass::kConfig, "InvalidSystemSpec", what);
  };
  require(standoffRange > 0.0, "standoffRange must be > 0");
  require(platformSpeed > 0.0, "platformSpeed must be > 0");
  require(bandwidth > 0.0, "bandwidth must be > 0");
  require(centerFrequency > bandwidth / 2.0, "centerFrequency must exceed bandwidth/2");
  require(pulseDuration > 0.0, "pulseDuration must be > 0");
  require(sampleRate > 0.0, "sampleRate must be > 0");
  require(prf > 0.0, "prf must be > 0");
  require(gsdRange > 0.0 && gsdAzimuth > 0.0, "ground sample distance must be > 0");
  require(chipRows > 0 && chipCols > 0, "chip dimensions must be > 0");
  require(plateSide > 0.0, "plateSide must be > 0");
  require(txAmplitude >= 0.0, "txAmplitude must be >= 0");
}

double ImagingPlan::slowTime(int m) const { return (m - pulses / 2) / prf; }

double ImagingPlan::referenceLength() const { return refPulses / prf; }

ImagingPlan planImaging(const SarSystemSpec& spec, double incidence) {
  spec.validate();
  ImagingPlan p;
  p.incidence = incidence;
  p.prf = spec.prf;
  p.sampleRate = spec.sampleRate;
  const double v = spec.platformSpeed;

  // Aperture long enough that lambda r0 / (2L) <= azimuth pixel spacing.
  const double refLength = spec.wavelength() * spec.standoffRange / (2.0 * spec.gsdAzimuth);
  p.refPulses = 2 * static_cast<int>(std::ceil(refLength / v * spec.prf / 2.0));
  const double halfAz = (spec.chipCols / 2 + 8) * spec.gsdAzimuth;
  p.pulses = p.refPulses + 2 * static_cast<int>(std::ceil(halfAz / v * spec.prf)) + 2;

  // Fast-time window: pulse plus scene depth plus worst-case migration.
  const double halfApertureM = p.pulses / 2.0 / spec.prf * v + halfAz;
  const double migration = halfApertureM * halfApertureM / (2.0 * spec.standoffRange);
  const double depth = (spec.chipRows / 2 + 8) * spec.gsdRange;
  const double guard = 2.0 * (depth + migration) / kLightSpeed + 64.0 / spec.sampleRate;
  const int n0 = static_cast<int>(std::ceil((spec.pulseDuration / 2.0 + guard) * spec.sampleRate));
  const double tau0 = 2.0 * spec.standoffRange / kLightSpeed;
  p.fastTimeOrigin = tau0 - n0 / spec.sampleRate;
  p.fastSamples = 2 * n0 + 1;
  p.pulseSamples = 2 * static_cast<int>(std::floor(spec.pulseDuration / 2.0 * spec.sampleRate)) + 1;

  const double binMeters = kLightSpeed / (2.0 * spec.sampleRate);
  const int needHalf = static_cast<int>(std::ceil((depth + migration) / binMeters)) + 16;
  p.cropBins = std::max(256, 2 * needHalf);
  p.cropStart = n0 - p.cropBins / 2;
  return p;
}

Vec2 groundRangeAzimuth(double x, double y, double azimuth) {
  const double c = std::cos(azimuth), s = std::sin(azimuth);
  return Vec2(x * c + y * s, -x * s + y * c);
}

Vec2 groundToPixel(double x, double y, double azimuth, const SarSystemSpec& spec) {
  const Vec2 gs = groundRangeAzimuth(x, y, azimuth);
  return Vec2(spec.chipRows / 2 + gs.x() / spec.gsdRange, spec.chipCols / 2 + gs.y() / spec.gsdAzimuth);
}

Vec2 pixelToGround(double row, double col, double azimuth, const SarSystemSpec& spec) {
  const double g = (row - spec.chipRows / 2) * spec.gsdRange;
  const double s = (col - spec.chipCols / 2) * spec.gsdAzimuth;
  const double c = std::cos(azimuth), sn = std::sin(azimuth);
  return Vec2(g * c - s * sn, g * sn + s * c);
}

double closestApproachRange(double g, double incidence, const SarSystemSpec& spec) {
  const double r0 = spec.standoffRange;
  return std::sqrt(r0 * r0 - 2.0 * r0 * std::sin(incidence) * g + g * g);
}

double chirp(const SarSystemSpec& spec, double t) {
  if (std::abs(t) > spec.pulseDuration / 2.0) return 0.0;
  return spec.txAmplitude *
         std::cos(2.0 * kPi * spec.centerFrequency * t + kPi * spec.chirpRate() * t * t);
}

double reflectorAmplitude(const ReflectorConfig& r, const AspectAngles& aspect,
                          const SarSystemSpec& spec, const TrihedralGeometry& geometry) {
  BoresightAngles b = toBoresightFrame(aspect, r.theta, r.phi);
  // Azimuth is periodic; bring the relative azimuth into [-pi, pi).
  b.azimuthPrime = wrapTwoPi(b.azimuthPrime + kPi) - kPi;
  if (!b.inWindow()) return 0.0;
  const ScatterResult s = totalScatter(b, geometry, 1.0, spec.txAmplitude, spec.phaseConstant());
  return std::abs(s.ePhi);
}

namespace {

EchoMatrix emptyEcho(const AspectAngles& aspect, const ImagingPlan& plan) {
  EchoMatrix e;
  e.samples = ComplexMatrix::Zero(plan.pulses, plan.fastSamples);
  e.fastTimeOrigin = plan.fastTimeOrigin;
  e.slowTimeSpan = plan.pulses / plan.prf;
  e.incidence = aspect.incidence;
  e.azimuth = aspect.azimuth;
  return e;
}

PlatformPath pathFor(const AspectAngles& aspect, const SarSystemSpec& spec) {
  return PlatformPath{spec.standoffRange, spec.platformSpeed, aspect.azimuth, aspect.incidence};
}

void accumulate(EchoMatrix& echo, double x, double y, double amplitude, bool inverseRange,
                const AspectAngles& aspect, const SarSystemSpec& spec, const ImagingPlan& plan) {
  checkSwath(x, y, aspect, spec, plan);
  if (amplitude == 0.0) return;
  const PlatformPath path = pathFor(aspect, spec);
  const Vec3 p(x, y, 0.0);
  const double fs = spec.sampleRate, f0 = spec.centerFrequency, K = spec.chirpRate();
  const double halfT = spec.pulseDuration / 2.0;
  for (int m = 0; m < plan.pulses; ++m) {
    const double r = (platformPosition(path, plan.slowTime(m)) - p).norm();
    const double tau = 2.0 * r / kLightSpeed;
    const double a = inverseRange ? amplitude / r : amplitude;
    // Carrier phase 2 pi f0 tau reduced modulo one cycle before scaling.
    const double cycles = f0 * tau;
    const double carrier = 2.0 * kPi * (cycles - std::floor(cycles));
    const int nLo = std::max(0, static_cast<int>(std::ceil((tau - halfT - plan.fastTimeOrigin) * fs)));
    const int nHi = std::min(plan.fastSamples - 1,
                             static_cast<int>(std::floor((tau + halfT - plan.fastTimeOrigin) * fs)));
    cd* row = echo.samples.row(m).data();
    for (int n = nLo; n <= nHi; ++n) {
      const double d = plan.fastTimeOrigin + n / fs - tau;
      row[n] += std::polar(a, carrier - kPi * K * d * d);
    }
  }
}

}  // namespace

// Checks that every pulse of a scatterer at (x, y) lands in the window.
void checkSwath(double x, double y, const AspectAngles& aspect, const SarSystemSpec& spec,
                const ImagingPlan& plan) {
  const PlatformPath path = pathFor(aspect, spec);
  const Vec3 p(x, y, 0.0);
  const double tEnd = plan.fastTimeOrigin + (plan.fastSamples - 1) / plan.sampleRate;
  for (int m : {0, plan.pulses / 2, plan.pulses - 1}) {
    const double tau = 2.0 * (platformPosition(path, plan.slowTime(m)) - p).norm() / kLightSpeed;
    if (tau - spec.pulseDuration / 2.0 < plan.fastTimeOrigin || tau + spec.pulseDuration / 2.0 > tEnd) {
      fail(ErrorClass::kData, "OutOfSwath",
           "scatterer at (" + std::to_string(x) + ", " + std::to_string(y) +
               ") falls outside the fast-time window");
    }
  }
}

EchoMatrix synthesizeEcho(const ReflectorConfig& reflector, const AspectAngles& aspect,
                          const SarSystemSpec& spec, const ImagingPlan& plan) {
  EchoMatrix e = emptyEcho(aspect, plan);
  const double amp = reflectorAmplitude(reflector, aspect, spec, TrihedralGeometry::make(spec.plateSide));
  accumulate(e, reflector.x, reflector.y, amp, true, aspect, spec, plan);
  return e;
}

EchoMatrix synthesizePointEcho(double x, double y, double amplitude, const AspectAngles& aspect,
                               const SarSystemSpec& spec, const ImagingPlan& plan) {
  EchoMatrix e = emptyEcho(aspect, plan);
  accumulate(e, x, y, amplitude, false, aspect, spec, plan);
  return e;
}

void accumulatePointEcho(EchoMatrix& echo, double x, double y, double amplitude,
                         const AspectAngles& aspect, const SarSystemSpec& spec,
                         const ImagingPlan& plan) {
  accumulate(echo, x, y, amplitude, false, aspect, spec, plan);
}

std::vector<double> passbandEcho(const SarSystemSpec& spec, double amplitude, double tau,
                                 double t0, double rfRate, int count) {
  std::vector<double> x(count);
  SarSystemSpec unit = spec;
  unit.txAmplitude = amplitude;
  for (int n = 0; n < count; ++n) x[n] = chirp(unit, t0 + n / rfRate - tau);
  return x;
}

std::vector<cd> quadratureDemodulate(const std::vector<double>& passband, double rfRate, double t0,
                                     const SarSystemSpec& spec) {
  const double ratio = rfRate / spec.sampleRate;
  const int decim = static_cast<int>(std::lround(ratio));
  if (decim < 1 || std::abs(ratio - decim) > 1e-9 * ratio) {
    fail(ErrorClass::kInvalidArgument, "InvalidRate", "rfRate must be an integer multiple of sampleRate");
  }
  const std::size_t n = passband.size();
  if (n == 0) return {};
  std::vector<cd> buf(n);
  const double f0 = spec.centerFrequency;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = t0 + static_cast<double>(i) / rfRate;
    const double cyc = f0 * t - std::floor(f0 * t);
    buf[i] = passband[i] * std::polar(1.0, -2.0 * kPi * cyc);
  }
  FftPlan fwd(n, FftPlan::Direction::kForward);
  FftPlan inv(n, FftPlan::Direction::kInverse);
  fwd.execute(buf.data());
  const double cutoff = 1.1 * spec.bandwidth / 2.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double f = (k <= n / 2 ? static_cast<double>(k) : static_cast<double>(k) - n) * rfRate / n;
    if (std::abs(f) > cutoff) buf[k] = 0.0;
  }
  inv.execute(buf.data());
  std::vector<cd> out;
  out.reserve(n / decim + 1);
  // 2 LPF{x e^{-j 2 pi f0 t}} carries the phase -2 pi f0 tau + pi K (t-tau)^2;
  // the conjugate matches the convention used for the synthesized echoes.
  for (std::size_t i = 0; i < n; i += decim) out.push_back(std::conj(2.0 * buf[i] / static_cast<double>(n)));
  return out;
}

void rangeCompress(ComplexMatrix& samples, const SarSystemSpec& spec, const ImagingPlan& plan) {
  const int nFast = static_cast<int>(samples.cols());
  const std::size_t nr = goodFftSize(static_cast<std::size_t>(nFast + plan.pulseSamples));
  const double fs = spec.sampleRate, K = spec.chirpRate();
  const int kc = (plan.pulseSamples - 1) / 2;

  // Replica exp(-j pi K t^2) with its center at index 0; correlating with it
  // is filtering by the reference exp(+j pi K t^2).
  std::vector<cd> ref(nr, 0.0);
  for (int k = 0; k < plan.pulseSamples; ++k) {
    const double t = (k - kc) / fs;
    ref[static_cast<std::size_t>((k - kc + static_cast<long>(nr)) % static_cast<long>(nr))] =
        std::polar(1.0, -kPi * K * t * t);
  }
  FftPlan fwd(nr, FftPlan::Direction::kForward);
  FftPlan inv(nr, FftPlan::Direction::kInverse);
  fwd.execute(ref.data());
  for (auto& v : ref) v = std::conj(v) / static_cast<double>(nr);

  std::vector<cd> buf(nr);
  for (Eigen::Index m = 0; m < samples.rows(); ++m) {
    cd* row = samples.row(m).data();
    std::copy(row, row + nFast, buf.begin());
    std::fill(buf.begin() + nFast, buf.end(), cd(0.0));
    fwd.execute(buf.data());
    for (std::size_t k = 0; k < nr; ++k) buf[k] *= ref[k];
    inv.execute(buf.data());
    std::copy(buf.begin(), buf.begin() + nFast, row);
  }
}

double FocusedGrid::rangeBinOf(double slantRange) const {
  return (2.0 * slantRange / kLightSpeed - plan.fastTimeOrigin) * plan.sampleRate - plan.cropStart;
}

double FocusedGrid::azimuthIndexOf(double slowTime) const {
  return plan.pulses / 2 + slowTime * plan.prf;
}

cd FocusedGrid::sample(double rangeBin, double azimuthIndex) const {
  const auto& interp = SincInterpolator::instance();
  const int rows = static_cast<int>(data.rows()), cols = static_cast<int>(data.cols());
  const double fl = std::floor(rangeBin);
  const int base = static_cast<int>(fl) - (SincInterpolator::kTaps / 2 - 1);
  const auto& w = interp.weights(rangeBin - fl);
  cd acc = 0.0;
  for (int t = 0; t < SincInterpolator::kTaps; ++t) {
    const int b = base + t;
    if (b < 0 || b >= rows) continue;
    acc += w[t] * interp(data.row(b).data(), cols, 1, azimuthIndex);
  }
  return acc;
}

FocusedGrid focusGrid(const EchoMatrix& echo, const SarSystemSpec& spec) {
  FocusedGrid grid;
  grid.spec = spec;
  grid.plan = planImaging(spec, echo.incidence);
  grid.azimuth = echo.azimuth;
  const ImagingPlan& plan = grid.plan;
  if (echo.samples.rows() != plan.pulses || echo.samples.cols() != plan.fastSamples) {
    fail(ErrorClass::kInvalidArgument, "GeometryMismatch", "echo does not match the imaging plan");
  }

  // 1. Range compression, keeping only the bins around the scene.
  ComplexMatrix rc = echo.samples;
  rangeCompress(rc, spec, plan);

  const std::size_t na = goodFftSize(static_cast<std::size_t>(plan.pulses + plan.refPulses + 1));
  const int nb = plan.cropBins;
  ComplexMatrix rd = ComplexMatrix::Zero(nb, static_cast<Eigen::Index>(na));
  for (int m = 0; m < plan.pulses; ++m) {
    for (int b = 0; b < nb; ++b) rd(b, m) = rc(m, plan.cropStart + b);
  }
  rc.resize(0, 0);

  // 2. Azimuth transform into the range-Doppler domain.
  FftPlan fwd(na, FftPlan::Direction::kForward);
  FftPlan inv(na, FftPlan::Direction::kInverse);
  for (int b = 0; b < nb; ++b) fwd.execute(rd.row(b).data());

  const double fs = spec.sampleRate, v = spec.platformSpeed, lambda = spec.wavelength();
  auto binRange = [&](double b) {
    return 0.5 * kLightSpeed * (plan.fastTimeOrigin + (plan.cropStart + b) / fs);
  };
  auto doppler = [&](std::size_t k) {
    const double kk = k <= na / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(na);
    return kk * spec.prf / static_cast<double>(na);
  };

  // 3. Range cell migration correction: energy of a target at closest range
  // R sits at R / D(f) in Doppler bin f.
  const auto& interp = SincInterpolator::instance();
  std::vector<cd> col(nb), out(nb);
  for (std::size_t k = 0; k < na; ++k) {
    const double f = doppler(k);
    const double q = lambda * f / (2.0 * v);
    const double invD = 1.0 / std::sqrt(1.0 - q * q);
    for (int b = 0; b < nb; ++b) col[b] = rd(b, static_cast<Eigen::Index>(k));
    for (int b = 0; b < nb; ++b) {
      const double shiftBins = 2.0 * binRange(b) * (invD - 1.0) / kLightSpeed * fs;
      out[b] = interp(col.data(), nb, 1, b + shiftBins);
    }
    for (int b = 0; b < nb; ++b) rd(b, static_cast<Eigen::Index>(k)) = out[b];
  }

  // 4. Azimuth matched filter, Doppler rate evaluated per range bin.
  std::vector<cd> h(na);
  const int half = plan.refPulses / 2;
  for (int b = 0; b < nb; ++b) {
    const double R = binRange(b);
    const double ka = 2.0 * spec.centerFrequency * v * v / (R * kLightSpeed);
    std::fill(h.begin(), h.end(), cd(0.0));
    for (int l = -half; l <= half; ++l) {
      const double eta = l / spec.prf;
      h[static_cast<std::size_t>((l + static_cast<long>(na)) % static_cast<long>(na))] =
          std::polar(1.0, kPi * ka * eta * eta);
    }
    fwd.execute(h.data());
    cd* row = rd.row(b).data();
    for (std::size_t k = 0; k < na; ++k) row[k] *= std::conj(h[k]) / static_cast<double>(na);
    // 5. Back to slow time.
    inv.execute(row);
  }

  grid.data = rd.leftCols(plan.pulses);
  return grid;
}

ComplexImage resampleToGround(const FocusedGrid& grid) {
  const SarSystemSpec& spec = grid.spec;
  ComplexImage img;
  img.spacingRange = spec.gsdRange;
  img.spacingAzimuth = spec.gsdAzimuth;
  img.pixels = ComplexMatrix::Zero(spec.chipRows, spec.chipCols);
  for (int i = 0; i < spec.chipRows; ++i) {
    const double g = (i - spec.chipRows / 2) * spec.gsdRange;
    const double rb = grid.rangeBinOf(closestApproachRange(g, grid.plan.incidence, spec));
    for (int j = 0; j < spec.chipCols; ++j) {
      const double s = (j - spec.chipCols / 2) * spec.gsdAzimuth;
      img.pixels(i, j) = grid.sample(rb, grid.azimuthIndexOf(s / spec.platformSpeed));
    }
  }
  return img;
}

ComplexImage focusRDA(const EchoMatrix& echo, const SarSystemSpec& spec) {
  return resampleToGround(focusGrid(echo, spec));
}

ComplexImage imagePerturbation(const std::vector<ReflectorConfig>& reflectors,
                               const AspectAngles& aspect, const SarSystemSpec& spec) {
  if (reflectors.empty()) fail(ErrorClass::kInvalidArgument, "NoReflectors", "need at least one reflector");
  const ImagingPlan plan = planImaging(spec, aspect.incidence);
  const TrihedralGeometry geom = TrihedralGeometry::make(spec.plateSide);
  EchoMatrix echo = emptyEcho(aspect, plan);
  bool any = false;
  for (const auto& r : reflectors) {
    const double amp = reflectorAmplitude(r, aspect, spec, geom);
    accumulate(echo, r.x, r.y, amp, true, aspect, spec, plan);
    any = any || amp != 0.0;
  }
  if (!any) {
    ComplexImage img;
    img.spacingRange = spec.gsdRange;
    img.spacingAzimuth = spec.gsdAzimuth;
    img.pixels = ComplexMatrix::Zero(spec.chipRows, spec.chipCols);
    return img;
  }
  return focusRDA(echo, spec);
}

}  // namespace sarcr
