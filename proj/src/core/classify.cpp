// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/classify.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <csignal>
#include <iomanip>
#include <json.hpp>
#include <limits>
#include <sstream>

#include "core/errors.hpp"
#include "core/image_io.hpp"

namespace sarcr {

int TargetModel::classIndex(const std::string& label) const {
  const auto& labels = classLabels();
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) fail(ErrorClass::kData, "UnknownClass", "model has no class '" + label + "'");
  return static_cast<int>(it - labels.begin());
}

std::string TargetModel::classify(const RealMatrix& chip) const {
  const std::vector<double> p = predict(chip);
  return classLabels()[std::max_element(p.begin(), p.end()) - p.begin()];
}

// ---------------------------------------------------------------------------

Eigen::VectorXd ReferencePrototypeModel::features(const RealMatrix& chip) const {
  if (chip.rows() != rows_ || chip.cols() != cols_) {
    fail(ErrorClass::kInvalidArgument, "GeometryMismatch", "chip size differs from the training chips");
  }
  const int f = options_.downsample;
  const int pr = rows_ / f, pc = cols_ / f;
  const double peak = chip.maxCoeff();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pr) * pc);
  if (!(peak > 0.0)) return out;
  const double floorDb = options_.floorDb;
  // Pixels under the floor contribute zero; skip their logarithm.
  const double floorLinear = peak * std::pow(10.0, floorDb / 20.0);
  for (int i = 0; i < pr * f; ++i) {
    for (int j = 0; j < pc * f; ++j) {
      const double v = chip(i, j);
      if (v <= floorLinear) continue;
      out[(i / f) * pc + j / f] += 1.0 - 20.0 * std::log10(v / peak) / floorDb;
    }
  }
  const double n = out.norm();
  if (n > 0.0) out /= n;
  return out;
}

ReferencePrototypeModel ReferencePrototypeModel::train(const std::vector<SarSample>& samples,
                                                       const PrototypeOptions& options, const std::string& name) {
  if (samples.empty()) fail(ErrorClass::kData, "EmptyClass", "no training samples");
  if (!(options.binWidthDeg > 0.0 && options.binWidthDeg <= 360.0)) {
    fail(ErrorClass::kInvalidArgument, "InvalidBinWidth", "bin width must be in (0, 360]");
  }
  if (options.downsample < 1) fail(ErrorClass::kInvalidArgument, "InvalidDownsample", "downsample must be >= 1");
  if (!(options.temperature > 0.0)) fail(ErrorClass::kInvalidArgument, "InvalidTemperature", "temperature must be > 0");
  if (!(options.floorDb < 0.0)) fail(ErrorClass::kInvalidArgument, "InvalidFloor", "floorDb must be < 0");

  ReferencePrototypeModel m;
  m.name_ = name;
  m.options_ = options;
  m.rows_ = static_cast<int>(samples.front().chip.rows());
  m.cols_ = static_cast<int>(samples.front().chip.cols());
  const DatasetIndex index(samples);
  m.labels_ = index.classes();
  const int bins = static_cast<int>(std::ceil(360.0 / options.binWidthDeg - 1e-9));
  for (const auto& label : m.labels_) {
    std::vector<Eigen::VectorXd> sums(bins);
    for (std::size_t i : index.classMembers(label)) {
      const double az = std::fmod(std::fmod(samples[i].azimuthDeg, 360.0) + 360.0, 360.0);
      const int b = std::min(bins - 1, static_cast<int>(az / options.binWidthDeg));
      const Eigen::VectorXd f = m.features(samples[i].chip);
      if (sums[b].size() == 0) sums[b] = Eigen::VectorXd::Zero(f.size());
      sums[b] += f;
    }
    std::vector<Eigen::VectorXd> protos;
    for (auto& s : sums) {
      if (s.size() == 0 || s.norm() == 0.0) continue;
      protos.push_back(s / s.norm());
    }
    if (protos.empty()) fail(ErrorClass::kData, "EmptyClass", "class '" + label + "' has no usable samples");
    m.prototypes_.push_back(std::move(protos));
  }
  m.stack();
  return m;
}

void ReferencePrototypeModel::stack() {
  std::size_t n = 0;
  for (const auto& cls : prototypes_) n += cls.size();
  const Eigen::Index dim = prototypes_.empty() || prototypes_[0].empty() ? 0 : prototypes_[0][0].size();
  stacked_.resize(static_cast<Eigen::Index>(n), dim);
  owner_.clear();
  Eigen::Index r = 0;
  for (std::size_t c = 0; c < prototypes_.size(); ++c) {
    for (const auto& p : prototypes_[c]) {
      stacked_.row(r++) = p.transpose();
      owner_.push_back(static_cast<int>(c));
    }
  }
}

std::vector<double> ReferencePrototypeModel::predict(const RealMatrix& chip) const {
  const Eigen::VectorXd f = features(chip);
  // Prototypes are unit vectors: |f - p|^2 = |f|^2 + 1 - 2 f.p.
  const Eigen::VectorXd dots = stacked_ * f;
  const double ff = f.squaredNorm();
  std::vector<double> d(labels_.size(), std::numeric_limits<double>::infinity());
  for (Eigen::Index r = 0; r < dots.size(); ++r) {
    const double dist = std::sqrt(std::max(0.0, ff + 1.0 - 2.0 * dots[r]));
    double& slot = d[static_cast<std::size_t>(owner_[static_cast<std::size_t>(r)])];
    slot = std::min(slot, dist);
  }
  const double dmin = *std::min_element(d.begin(), d.end());
  std::vector<double> p(d.size());
  double sum = 0.0;
  for (std::size_t c = 0; c < d.size(); ++c) sum += p[c] = std::exp(-(d[c] - dmin) / options_.temperature);
  for (double& v : p) v /= sum;
  return p;
}

std::string ReferencePrototypeModel::toJson() const {
  nlohmann::json j;
  j["kind"] = "reference-prototype";
  j["name"] = name_;
  j["bin_width_deg"] = options_.binWidthDeg;
  j["downsample"] = options_.downsample;
  j["temperature"] = options_.temperature;
  j["floor_db"] = options_.floorDb;
  j["rows"] = rows_;
  j["cols"] = cols_;
  j["labels"] = labels_;
  nlohmann::json protos = nlohmann::json::array();
  for (const auto& cls : prototypes_) {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& p : cls) list.push_back(std::vector<double>(p.data(), p.data() + p.size()));
    protos.push_back(std::move(list));
  }
  j["prototypes"] = std::move(protos);
  return j.dump();
}

ReferencePrototypeModel ReferencePrototypeModel::fromJson(const std::string& text) {
  ReferencePrototypeModel m;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("kind") != "reference-prototype") fail(ErrorClass::kConfig, "UnknownModelKind", "not a prototype model");
    m.name_ = j.at("name").get<std::string>();
    m.options_.binWidthDeg = j.at("bin_width_deg").get<double>();
    m.options_.downsample = j.at("downsample").get<int>();
    m.options_.temperature = j.at("temperature").get<double>();
    m.options_.floorDb = j.value("floor_db", -40.0);
    m.rows_ = j.at("rows").get<int>();
    m.cols_ = j.at("cols").get<int>();
    m.labels_ = j.at("labels").get<std::vector<std::string>>();
    const std::size_t dim = static_cast<std::size_t>(m.rows_ / m.options_.downsample) * (m.cols_ / m.options_.downsample);
    for (const auto& cls : j.at("prototypes")) {
      std::vector<Eigen::VectorXd> list;
      for (const auto& p : cls) {
        const auto v = p.get<std::vector<double>>();
        if (v.size() != dim) fail(ErrorClass::kConfig, "MalformedModel", "prototype length mismatch");
        list.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
      }
      m.prototypes_.push_back(std::move(list));
    }
    if (m.prototypes_.size() != m.labels_.size()) fail(ErrorClass::kConfig, "MalformedModel", "label count mismatch");
    for (const auto& cls : m.prototypes_) {
      if (cls.empty()) fail(ErrorClass::kConfig, "MalformedModel", "class without prototypes");
    }
    m.stack();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorClass::kConfig, "MalformedModel", e.what());
  }
  return m;
}

// ---------------------------------------------------------------------------

SubprocessModel::SubprocessModel(std::string command, std::vector<std::string> labels, std::string name)
    : command_(std::move(command)), labels_(std::move(labels)), name_(std::move(name)) {
  if (labels_.empty()) fail(ErrorClass::kConfig, "EmptyLabels", "subprocess model needs class labels");
}

namespace {

void writeAll(int fd, const std::uint8_t* p, std::size_t n) {
  while (n > 0) {
    const ssize_t w = ::write(fd, p, n);
    if (w < 0) {
      if (errno == EINTR) continue;
      fail(ErrorClass::kIo, "SubprocessFailed", "write to model process failed");
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

std::string runFiltered(const std::string& command, const std::vector<std::uint8_t>& input) {
  int in[2], out[2];
  if (::pipe(in) != 0 || ::pipe(out) != 0) fail(ErrorClass::kIo, "SubprocessFailed", "pipe failed");
  const pid_t pid = ::fork();
  if (pid < 0) fail(ErrorClass::kIo, "SubprocessFailed", "fork failed");
  if (pid == 0) {
    ::dup2(in[0], 0);
    ::dup2(out[1], 1);
    ::close(in[0]);
    ::close(in[1]);
    ::close(out[0]);
    ::close(out[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in[0]);
  ::close(out[1]);
  // A model that exits early must not kill us with SIGPIPE.
  struct sigaction ignore {}, previous {};
  ignore.sa_handler = SIG_IGN;
  ::sigaction(SIGPIPE, &ignore, &previous);
  bool writeOk = true;
  try {
    writeAll(in[1], input.data(), input.size());
  } catch (const Error&) {
    writeOk = false;
  }
  ::close(in[1]);
  ::sigaction(SIGPIPE, &previous, nullptr);
  std::string text;
  char buf[4096];
  for (;;) {
    const ssize_t r = ::read(out[0], buf, sizeof buf);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) break;
    text.append(buf, static_cast<std::size_t>(r));
  }
  ::close(out[0]);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!writeOk || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    fail(ErrorClass::kIo, "SubprocessFailed", "model command failed: " + command);
  }
  return text;
}

}  // namespace

std::vector<double> SubprocessModel::predict(const RealMatrix& chip) const {
  ComplexImage img;
  img.pixels = chip.cast<cd>();
  const std::string text = runFiltered(command_, encodeCimg(img));
  std::vector<double> p;
  try {
    p = nlohmann::json::parse(text).get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorClass::kData, "InvalidProbabilities", std::string("model output is not a JSON array: ") + e.what());
  }
  if (p.size() != labels_.size()) {
    fail(ErrorClass::kData, "InvalidProbabilities", "model returned " + std::to_string(p.size()) + " probabilities");
  }
  validateProbabilities(p);
  return p;
}

// ---------------------------------------------------------------------------

void validateProbabilities(const std::vector<double>& p) {
  if (p.empty()) fail(ErrorClass::kNumerical, "InvalidProbabilities", "empty probability vector");
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) fail(ErrorClass::kNumerical, "InvalidProbabilities", "negative or non-finite entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    fail(ErrorClass::kNumerical, "InvalidProbabilities", "probabilities sum to " + std::to_string(sum));
  }
}

double crossEntropy(const std::vector<double>& p, int trueIndex) {
  validateProbabilities(p);
  if (trueIndex < 0 || trueIndex >= static_cast<int>(p.size())) {
    fail(ErrorClass::kInvalidArgument, "InvalidLabel", "label index out of range");
  }
  return -std::log(std::max(p[static_cast<std::size_t>(trueIndex)], 1e-12));
}

FoolingCount foolingCount(const TargetModel& model, const AttackFn& attack, const std::vector<SarSample>& samples,
                          const std::string& classLabel) {
  FoolingCount count;
  for (const auto& s : samples) {
    if (s.classLabel != classLabel) continue;
    if (model.classify(s.chip) != classLabel) continue;
    ++count.cleanCorrect;
    if (model.classify(attack(s)) != classLabel) ++count.flipped;
  }
  return count;
}

double foolingRate(const TargetModel& model, const AttackFn& attack, const std::vector<SarSample>& samples,
                   const std::string& classLabel) {
  return foolingCount(model, attack, samples, classLabel).rate();
}

FoolingReport foolingReport(const TargetModel& model, const std::map<std::string, AttackFn>& attacks,
                            const std::vector<SarSample>& samples) {
  FoolingReport r;
  for (const auto& [label, attack] : attacks) {
    const FoolingCount c = foolingCount(model, attack, samples, label);
    r.counts[label] = c;
    r.perClassRates[label] = c.rate();
  }
  double sum = 0.0;
  for (const auto& [label, rate] : r.perClassRates) sum += rate;
  r.averageRate = r.perClassRates.empty() ? 0.0 : sum / static_cast<double>(r.perClassRates.size());
  return r;
}

std::string FoolingReport::toCsv() const {
  std::ostringstream o;
  o << std::setprecision(10) << "class,clean_correct,flipped,rate\n";
  for (const auto& [label, rate] : perClassRates) {
    const FoolingCount& c = counts.at(label);
    o << label << "," << c.cleanCorrect << "," << c.flipped << "," << rate << "\n";
  }
  o << "average,,," << averageRate << "\n";
  return o.str();
}

std::vector<std::vector<double>> transferMatrix(const std::vector<const TargetModel*>& surrogates,
                                                const std::vector<const TargetModel*>& targets,
                                                const std::vector<std::map<std::string, AttackFn>>& attacksPerSurrogate,
                                                const std::vector<SarSample>& samples) {
  if (attacksPerSurrogate.size() != surrogates.size()) {
    fail(ErrorClass::kInvalidArgument, "SizeMismatch", "one attack set per surrogate is required");
  }
  std::vector<std::vector<double>> m(surrogates.size(), std::vector<double>(targets.size(), 0.0));
  for (std::size_t s = 0; s < surrogates.size(); ++s) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      m[s][t] = foolingReport(*targets[t], attacksPerSurrogate[s], samples).averageRate;
    }
  }
  return m;
}

std::string transferMatrixCsv(const std::vector<std::string>& surrogateNames,
                              const std::vector<std::string>& targetNames,
                              const std::vector<std::vector<double>>& matrix) {
  std::ostringstream o;
  o << std::setprecision(10) << "surrogate";
  for (const auto& t : targetNames) o << "," << t;
  o << "\n";
  for (std::size_t s = 0; s < matrix.size(); ++s) {
    o << surrogateNames.at(s);
    for (double v : matrix[s]) o << "," << v;
    o << "\n";
  }
  return o.str();
}

std::vector<std::size_t> knownAspectSubset(const KnownAspectAttack& kaa, const std::vector<SarSample>& samples,
                                           const std::string& classLabel) {
  if (!(kaa.uncertainty >= 0.0 && kaa.uncertainty <= kPi / 2 + 1e-12)) {
    fail(ErrorClass::kInvalidArgument, "InvalidUncertainty", "uncertainty must be in [0, pi/2]");
  }
  const double tolDeg = radToDeg(kaa.uncertainty) + 1e-9;
  const double azDeg = radToDeg(kaa.estimatedAzimuth), incDeg = radToDeg(kaa.estimatedIncidence);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SarSample& s = samples[i];
    if (s.classLabel != classLabel) continue;
    if (azimuthDistanceDeg(s.azimuthDeg, azDeg) <= tolDeg && std::abs(s.incidenceDeg - incDeg) <= tolDeg) {
      out.push_back(i);
    }
  }
  return out;
}

double partialKnowledgeEvaluate(const KnownAspectAttack& kaa, const std::vector<SarSample>& samples,
                                const TargetModel& model, const std::string& classLabel, const AttackFn& attack) {
  const auto idx = knownAspectSubset(kaa, samples, classLabel);
  if (idx.empty()) fail(ErrorClass::kData, "EmptyEvaluationSet", "no samples within the aspect bounds");
  std::vector<SarSample> subset;
  subset.reserve(idx.size());
  for (std::size_t i : idx) subset.push_back(samples[i]);
  return foolingRate(model, attack, subset, classLabel);
}

}  // namespace sarcr
