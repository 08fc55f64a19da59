// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "core/data.hpp"

namespace sarcr {

// Classifier under attack: magnitude chip in, probability vector out.
// Implementations must be safe to call concurrently.
class TargetModel {
 public:
  virtual ~TargetModel() = default;
  virtual const std::vector<std::string>& classLabels() const = 0;
  virtual std::vector<double> predict(const RealMatrix& chip) const = 0;
  virtual std::string name() const = 0;

  int classCount() const { return static_cast<int>(classLabels().size()); }
  // Index of `label`; throws UnknownClass.
  int classIndex(const std::string& label) const;
  // Arg-max label.
  std::string classify(const RealMatrix& chip) const;
};

struct PrototypeOptions {
  double binWidthDeg = 30.0;
  int downsample = 4;
  double temperature = 0.02;
  double floorDb = -40.0;  // dynamic range kept below the chip maximum
};

// Nearest-prototype classifier over downsampled log-magnitude chips. One
// prototype per (class, azimuth bin); a class scores its closest bin.
class ReferencePrototypeModel final : public TargetModel {
 public:
  static ReferencePrototypeModel train(const std::vector<SarSample>& samples,
                                       const PrototypeOptions& options, const std::string& name = "reference");

  const std::vector<std::string>& classLabels() const override { return labels_; }
  std::vector<double> predict(const RealMatrix& chip) const override;
  std::string name() const override { return name_; }

  const PrototypeOptions& options() const { return options_; }
  // Feature vector used for both prototypes and queries: dB relative to the
  // chip maximum, floored at options().floorDb, mapped to [0, 1], average-pooled, and
  // L2-normalized.
  Eigen::VectorXd features(const RealMatrix& chip) const;

  std::string toJson() const;
  static ReferencePrototypeModel fromJson(const std::string& text);

 private:
  std::string name_;
  PrototypeOptions options_;
  std::vector<std::string> labels_;
  int rows_ = 0, cols_ = 0;
  std::vector<std::vector<Eigen::VectorXd>> prototypes_;  // [class][bin], empty bins skipped
  // All prototypes as rows, with the owning class of each row.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> stacked_;
  std::vector<int> owner_;
  void stack();
};

// Model living in another process: each call writes the chip as a CIMG
// image to the command's stdin and parses a JSON probability array from
// its stdout.
class SubprocessModel final : public TargetModel {
 public:
  SubprocessModel(std::string command, std::vector<std::string> labels, std::string name = "subprocess");
  const std::vector<std::string>& classLabels() const override { return labels_; }
  std::vector<double> predict(const RealMatrix& chip) const override;
  std::string name() const override { return name_; }

 private:
  std::string command_;
  std::vector<std::string> labels_;
  std::string name_;
};

// Throws InvalidProbabilities unless p is finite, nonnegative, and sums to 1.
void validateProbabilities(const std::vector<double>& p);
// -ln p[trueIndex] with p floored at 1e-12.
double crossEntropy(const std::vector<double>& p, int trueIndex);

// Adversarial version of a sample's chip.
using AttackFn = std::function<RealMatrix(const SarSample&)>;

struct FoolingCount {
  int cleanCorrect = 0;
  int flipped = 0;
  // Zero when no sample is clean-correct.
  double rate() const { return cleanCorrect == 0 ? 0.0 : static_cast<double>(flipped) / cleanCorrect; }
};

// Fooling count over the samples labeled `classLabel`.
FoolingCount foolingCount(const TargetModel& model, const AttackFn& attack,
                          const std::vector<SarSample>& samples, const std::string& classLabel);
double foolingRate(const TargetModel& model, const AttackFn& attack, const std::vector<SarSample>& samples,
                   const std::string& classLabel);

struct FoolingReport {
  std::map<std::string, double> perClassRates;
  std::map<std::string, FoolingCount> counts;
  double averageRate = 0.0;
  std::string toCsv() const;
};

// One attack per class; each is evaluated on the samples of its class.
FoolingReport foolingReport(const TargetModel& model, const std::map<std::string, AttackFn>& attacks,
                            const std::vector<SarSample>& samples);

// Entry (s, t): average fooling rate on target t of the attacks optimized
// against surrogate s.
std::vector<std::vector<double>> transferMatrix(
    const std::vector<const TargetModel*>& surrogates, const std::vector<const TargetModel*>& targets,
    const std::vector<std::map<std::string, AttackFn>>& attacksPerSurrogate,
    const std::vector<SarSample>& samples);
std::string transferMatrixCsv(const std::vector<std::string>& surrogateNames,
                              const std::vector<std::string>& targetNames,
                              const std::vector<std::vector<double>>& matrix);

// Single reflector with fixed orientation from an aspect estimate; only its
// position is optimized.
struct KnownAspectAttack {
  double estimatedAzimuth = 0.0;    // radians
  double estimatedIncidence = 0.0;  // radians
  double uncertainty = 0.0;         // radians, [0, pi/2]
};

// Indices of class samples with both aspect angles within the uncertainty.
std::vector<std::size_t> knownAspectSubset(const KnownAspectAttack& kaa, const std::vector<SarSample>& samples,
                                           const std::string& classLabel);
// Fooling rate over knownAspectSubset; throws EmptyEvaluationSet.
double partialKnowledgeEvaluate(const KnownAspectAttack& kaa, const std::vector<SarSample>& samples,
                                const TargetModel& model, const std::string& classLabel,
                                const AttackFn& attack);

}  // namespace sarcr
