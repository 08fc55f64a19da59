// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <complex>
#include <vector>

namespace sarcr {

// 8-tap Kaiser-windowed sinc interpolator with a tabulated kernel.
class SincInterpolator {
 public:
  static constexpr int kTaps = 8;

  SincInterpolator();

  // Value at fractional index pos of data[0], data[stride], ... data[(n-1)*stride].
  // Samples outside [0, n) count as zero.
  std::complex<double> operator()(const std::complex<double>* data, int n, int stride,
                                  double pos) const;

  // Kernel weights for taps floor(pos)-3 .. floor(pos)+4.
  const std::array<double, kTaps>& weights(double frac) const;

  static const SincInterpolator& instance();

 private:
  static constexpr int kTableSteps = 2048;
  std::vector<std::array<double, kTaps>> table_;
};

// Bilinear sample of a row-major real image; zero outside.
double bilinear(const double* img, int rows, int cols, double r, double c);

}  // namespace sarcr
