// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/errors.hpp"

namespace sarcr {

struct Bounds {
  std::vector<double> lower, upper;

  std::size_t dim() const { return lower.size(); }
  // Throws InvalidBounds.
  void validate() const;
  bool contains(const std::vector<double>& x) const;
  std::vector<double> clip(std::vector<double> x) const;
};

using Objective = std::function<double(const std::vector<double>&)>;

struct DEConfig {
  int populationSize = 40;
  int maxIterations = 60;
  double mutationFactor = 0.5;
  double recombinationProbability = 0.9;
  double mutationProbability = 0.8;
  int tournamentSize = 3;
  // Trial vectors replace the nearest of this many neighbours of their
  // parent instead of the parent itself; 0 disables crowding.
  int crowding = 0;
  std::uint64_t seed = 0;
  int jobs = 1;
  void validate() const;
};

struct PSOConfig {
  int particleCount = 40;
  int maxIterations = 60;
  double cognitiveRate = 0.6;
  double socialRate = 1.0;
  double inertiaWeight = 0.8;
  double velocityClamp = 0.2;  // fraction of the box span
  std::uint64_t seed = 0;
  int jobs = 1;
  void validate() const;
};

struct OptimizeTrace {
  // Entry 0 is the initial population; then one entry per iteration.
  std::vector<double> bestLossPerIteration;
  std::vector<double> bestParams;
  double bestLoss = 0.0;
  int evaluationCount = 0;
  std::string toCsv() const;
};

// Thrown when the objective fails; carries the trace up to the failure.
class ObjectiveFailure : public Error {
 public:
  ObjectiveFailure(const std::string& message, OptimizeTrace partial)
      : Error(ErrorClass::kNumerical, "ObjectiveFailure", message), partial_(std::move(partial)) {}
  const OptimizeTrace& partialTrace() const { return partial_; }

 private:
  OptimizeTrace partial_;
};

// Differential evolution. For each individual, with probability
// mutationProbability a mutant base + F (b - c) is formed, where base is a
// tournament winner, b a tournament winner among the rest, and c random;
// otherwise the individual is left alone this generation. Binomial crossover,
// clipping to the box, greedy replacement.
OptimizeTrace minimizeDE(const Objective& objective, const Bounds& bounds, const DEConfig& config);

// Global-best particle swarm with inertia, velocity clamping, and clipping.
OptimizeTrace minimizePSO(const Objective& objective, const Bounds& bounds, const PSOConfig& config);

// Which reflector angles are searched. The attack vector is laid out as
// [x_1..x_m, y_1..y_m, theta_1..theta_m, phi_1].
enum class AngleVariant { kFree = 1, kThetaFixed = 2, kPhiFixed = 3, kBothFixed = 4 };

struct ReducedSpace {
  Bounds bounds;                 // search bounds of the free coordinates
  std::vector<int> freeIndex;    // full-vector index of each free coordinate
  std::vector<double> template_; // full vector holding the fixed values
  std::vector<double> expand(const std::vector<double>& reduced) const;
};

// Fixed theta is the interior-diagonal incidence arctan(sqrt 2); fixed phi
// is phi_1 = 0.
ReducedSpace fixedAngleVariants(const Bounds& full, int reflectorCount, AngleVariant variant);

}  // namespace sarcr
