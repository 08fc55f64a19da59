// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/interp.hpp"

#include <cmath>

namespace sarcr {

namespace {

constexpr double kPiLocal = 3.14159265358979323846;

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPiLocal * x) / (kPiLocal * x);
}

double kaiser(double x, double halfWidth, double beta) {
  const double r = x / halfWidth;
  if (std::abs(r) >= 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / std::cyl_bessel_i(0.0, beta);
}

}  // namespace

SincInterpolator::SincInterpolator() : table_(kTableSteps + 1) {
  const double half = kTaps / 2.0;
  for (int s = 0; s <= kTableSteps; ++s) {
    const double frac = static_cast<double>(s) / kTableSteps;
    double sum = 0.0;
    for (int t = 0; t < kTaps; ++t) {
      const double x = (t - (kTaps / 2 - 1)) - frac;  // tap offset from pos
      table_[s][t] = sinc(x) * kaiser(x, half, 2.5);
      sum += table_[s][t];
    }
    for (auto& w : table_[s]) w /= sum;
  }
}

const std::array<double, SincInterpolator::kTaps>& SincInterpolator::weights(double frac) const {
  const int s = static_cast<int>(std::lround(frac * kTableSteps));
  return table_[s];
}

std::complex<double> SincInterpolator::operator()(const std::complex<double>* data, int n,
                                                  int stride, double pos) const {
  const double fl = std::floor(pos);
  const int base = static_cast<int>(fl) - (kTaps / 2 - 1);
  const auto& w = weights(pos - fl);
  std::complex<double> acc = 0.0;
  for (int t = 0; t < kTaps; ++t) {
    const int i = base + t;
    if (i >= 0 && i < n) acc += w[t] * data[static_cast<std::ptrdiff_t>(i) * stride];
  }
  return acc;
}

const SincInterpolator& SincInterpolator::instance() {
  static const SincInterpolator interp;
  return interp;
}

double bilinear(const double* img, int rows, int cols, double r, double c) {
  const double r0f = std::floor(r), c0f = std::floor(c);
  const int r0 = static_cast<int>(r0f), c0 = static_cast<int>(c0f);
  const double fr = r - r0f, fc = c - c0f;
  auto at = [&](int i, int j) {
    return (i >= 0 && i < rows && j >= 0 && j < cols) ? img[i * cols + j] : 0.0;
  };
  return (1 - fr) * ((1 - fc) * at(r0, c0) + fc * at(r0, c0 + 1)) +
         fr * ((1 - fc) * at(r0 + 1, c0) + fc * at(r0 + 1, c0 + 1));
}

}  // namespace sarcr
