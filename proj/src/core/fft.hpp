// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>

namespace sarcr {

// Smallest n' >= n whose only prime factors are 2, 3, 5, 7.
std::size_t goodFftSize(std::size_t n);

// In-place 1-D complex transform of fixed length backed by FFTW. The
// inverse is unnormalized, as in FFTW.
class FftPlan {
 public:
  enum class Direction { kForward, kInverse };

  FftPlan(std::size_t n, Direction dir);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t size() const { return n_; }
  void execute(std::complex<double>* data) const;

 private:
  std::size_t n_;
  void* plan_;
  void* scratch_;
};

}  // namespace sarcr
