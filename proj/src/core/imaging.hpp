// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

#include "core/geometry.hpp"
#include "core/scattering.hpp"

namespace sarcr {

using ComplexMatrix = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Polarization { kHH };

struct SarSystemSpec {
  double standoffRange = 5000.0;
  double platformSpeed = 50.0;
  double centerFrequency = 9.6e9;
  double bandwidth = 591e6;
  double pulseDuration = 5e-6;
  double sampleRate = 500e6;
  double prf = 1200.0;
  double gsdRange = 0.3;
  double gsdAzimuth = 0.3;
  Polarization polarization = Polarization::kHH;
  double txAmplitude = 1.0;
  int chipRows = 128;
  int chipCols = 128;
  double plateSide = 0.3;  // trihedral plate edge

  double chirpRate() const { return bandwidth / pulseDuration; }
  double wavelength() const { return kLightSpeed / centerFrequency; }
  double phaseConstant() const { return 2.0 * kPi / wavelength(); }
  // True when the complex sample rate is below the chirp bandwidth. The
  // reference system does this; the focused range response then follows the
  // sample rate rather than the bandwidth.
  bool undersampled() const { return sampleRate < bandwidth; }
  void validate() const;
};

// Derived sampling layout for one incidence angle.
struct ImagingPlan {
  double incidence = 0.0;
  int pulses = 0;           // slow-time samples in the aperture
  int refPulses = 0;        // azimuth reference length
  int fastSamples = 0;      // fast-time window length
  double fastTimeOrigin = 0.0;
  int pulseSamples = 0;     // replica length
  int cropBins = 256;       // range bins kept after compression
  int cropStart = 0;        // first kept bin (fast-time index)
  double referenceLength() const;

  double slowTime(int m) const;  // (m - pulses/2) / prf
  double prf = 0.0;
  double sampleRate = 0.0;
};

ImagingPlan planImaging(const SarSystemSpec& spec, double incidence);

struct ReflectorConfig {
  double x = 0.0;  // meters, scene frame
  double y = 0.0;
  double theta = kDiagonalIncidence;  // boresight incidence
  double phi = 0.0;                   // boresight azimuth
};

struct EchoMatrix {
  ComplexMatrix samples;  // [slow time x fast time]
  double fastTimeOrigin = 0.0;
  double slowTimeSpan = 0.0;
  double incidence = 0.0;  // geometry needed by the focuser
  double azimuth = 0.0;
};

struct ComplexImage {
  ComplexMatrix pixels;
  double spacingRange = 0.3;
  double spacingAzimuth = 0.3;

  RealMatrix magnitude() const { return pixels.cwiseAbs(); }
};

// Scene frame <-> chip pixels. Rows grow toward the radar, columns along
// the flight direction. Every module that maps scene points to pixels goes
// through these two functions.
Vec2 groundToPixel(double x, double y, double azimuth, const SarSystemSpec& spec);
Vec2 pixelToGround(double row, double col, double azimuth, const SarSystemSpec& spec);
// Ground range (toward the radar) and azimuth coordinate of a scene point.
Vec2 groundRangeAzimuth(double x, double y, double azimuth);
double closestApproachRange(double groundRange, double incidence, const SarSystemSpec& spec);

double chirp(const SarSystemSpec& spec, double t);

// Reflected HH field magnitude of one reflector at unit range.
double reflectorAmplitude(const ReflectorConfig& r, const AspectAngles& aspect,
                          const SarSystemSpec& spec, const TrihedralGeometry& geometry);

// Baseband echo of one reflector, i.e. the quadrature-demodulated form of
// the delayed chirp, sampled on the plan's fast/slow-time grid.
// Throws OutOfSwath unless every pulse of a scatterer at (x, y) lands in the
// fast-time window of `plan`.
void checkSwath(double x, double y, const AspectAngles& aspect, const SarSystemSpec& spec,
                const ImagingPlan& plan);

EchoMatrix synthesizeEcho(const ReflectorConfig& reflector, const AspectAngles& aspect,
                          const SarSystemSpec& spec, const ImagingPlan& plan);
// Same, for a unit-amplitude point scatterer (no trihedral pattern).
EchoMatrix synthesizePointEcho(double x, double y, double amplitude, const AspectAngles& aspect,
                               const SarSystemSpec& spec, const ImagingPlan& plan);
void accumulatePointEcho(EchoMatrix& echo, double x, double y, double amplitude,
                         const AspectAngles& aspect, const SarSystemSpec& spec,
                         const ImagingPlan& plan);

// Real passband echo of a point at delay tau, sampled at rfRate from t0.
std::vector<double> passbandEcho(const SarSystemSpec& spec, double amplitude, double tau,
                                 double t0, double rfRate, int count);
// Mix to baseband, brick-wall low-pass, decimate to spec.sampleRate. rfRate
// must be an integer multiple of the sample rate.
std::vector<cd> quadratureDemodulate(const std::vector<double>& passband, double rfRate,
                                     double t0, const SarSystemSpec& spec);

// Range-compressed and azimuth-focused samples on the cropped slant-range
// by slow-time grid, before resampling to ground pixels.
struct FocusedGrid {
  ComplexMatrix data;  // [range bin x slow time], crop layout
  ImagingPlan plan;
  SarSystemSpec spec;
  double azimuth = 0.0;

  double rangeBinOf(double slantRange) const;
  double azimuthIndexOf(double slowTime) const;
  cd sample(double rangeBin, double azimuthIndex) const;
};

// Range compression of one baseband pulse; output index n corresponds to
// delay fastTimeOrigin + n / sampleRate.
void rangeCompress(ComplexMatrix& samples, const SarSystemSpec& spec, const ImagingPlan& plan);

FocusedGrid focusGrid(const EchoMatrix& echo, const SarSystemSpec& spec);
ComplexImage resampleToGround(const FocusedGrid& grid);
ComplexImage focusRDA(const EchoMatrix& echo, const SarSystemSpec& spec);

// Full chain for a set of reflectors: synthesize, sum, focus.
ComplexImage imagePerturbation(const std::vector<ReflectorConfig>& reflectors,
                               const AspectAngles& aspect, const SarSystemSpec& spec);

}  // namespace sarcr
