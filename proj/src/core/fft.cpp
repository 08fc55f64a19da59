// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

#include "core/errors.hpp"

namespace sarcr {

namespace {
// FFTW's planner is not reentrant.
std::mutex& plannerMutex() {
  static std::mutex m;
  return m;
}
}  // namespace

std::size_t goodFftSize(std::size_t n) {
  for (std::size_t m = std::max<std::size_t>(n, 1);; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return m;
  }
}

FftPlan::FftPlan(std::size_t n, Direction dir) : n_(n) {
  if (n == 0) fail(ErrorClass::kInvalidArgument, "InvalidSize", "FFT length must be > 0");
  std::lock_guard<std::mutex> lock(plannerMutex());
  auto* buf = fftw_alloc_complex(n);
  scratch_ = buf;
  plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf, buf,
                           dir == Direction::kForward ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plan_) fail(ErrorClass::kNumerical, "FftPlanFailed", "FFTW could not plan");
}

FftPlan::~FftPlan() {
  std::lock_guard<std::mutex> lock(plannerMutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  fftw_free(scratch_);
}

void FftPlan::execute(std::complex<double>* data) const {
  // The new-array interface requires matching alignment; copy through the
  // planned buffer when the caller's array is not SIMD aligned.
  auto* buf = static_cast<fftw_complex*>(scratch_);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  if (fftw_alignment_of(reinterpret_cast<double*>(d)) ==
      fftw_alignment_of(reinterpret_cast<double*>(buf))) {
    fftw_execute_dft(static_cast<fftw_plan>(plan_), d, d);
  } else {
    std::memcpy(buf, d, n_ * sizeof(fftw_complex));
    fftw_execute(static_cast<fftw_plan>(plan_));
    std::memcpy(d, buf, n_ * sizeof(fftw_complex));
  }
}

}  // namespace sarcr
