// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <sstream>

#include "core/errors.hpp"
#include "core/image_io.hpp"
#include "core/rng.hpp"

namespace sarcr {

namespace fs = std::filesystem;

AspectAngles SarSample::aspect() const {
  return AspectAngles{degToRad(incidenceDeg), wrapTwoPi(degToRad(azimuthDeg))};
}

namespace {
double roundIncidence(double deg) { return std::round(deg * 100.0) / 100.0; }
}  // namespace

DatasetIndex::DatasetIndex(const std::vector<SarSample>& samples) : samples_(&samples) {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    groups_[{samples[i].classLabel, roundIncidence(samples[i].incidenceDeg)}].push_back(i);
  }
  for (auto& [key, members] : groups_) {
    std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
      if (samples[a].azimuthDeg != samples[b].azimuthDeg) return samples[a].azimuthDeg < samples[b].azimuthDeg;
      return samples[a].sourceId < samples[b].sourceId;
    });
  }
}

std::vector<std::string> DatasetIndex::classes() const {
  std::vector<std::string> out;
  for (const auto& [key, members] : groups_) {
    if (out.empty() || out.back() != key.first) out.push_back(key.first);
  }
  return out;
}

std::vector<std::size_t> DatasetIndex::classMembers(const std::string& label) const {
  std::vector<std::size_t> out;
  for (const auto& [key, members] : groups_) {
    if (key.first == label) out.insert(out.end(), members.begin(), members.end());
  }
  return out;
}

double azimuthDistanceDeg(double a, double b) {
  double d = std::fmod(std::abs(a - b), 360.0);
  return d > 180.0 ? 360.0 - d : d;
}

SubsetReport sampleSubset(const DatasetIndex& index, const std::string& classLabel, double spacingDeg,
                          double toleranceDeg, std::uint64_t seed, const std::vector<bool>& exclude) {
  if (!(spacingDeg > 0.0)) fail(ErrorClass::kInvalidArgument, "InvalidSpacing", "azimuth spacing must be > 0");
  if (!(toleranceDeg >= 0.0)) fail(ErrorClass::kInvalidArgument, "InvalidTolerance", "tolerance must be >= 0");
  SubsetReport report;
  const auto& samples = index.samples();
  std::uint64_t groupOrdinal = 0;
  bool found = false;
  for (const auto& [key, members] : index.groups()) {
    if (key.first != classLabel) continue;
    found = true;
    Rng rng(deriveSeed(seed, ++groupOrdinal));
    std::vector<bool> taken(samples.size(), false);
    double phi = std::uniform_real_distribution<double>(0.0, spacingDeg)(rng);
    std::vector<std::size_t> candidates;
    for (; phi < 360.0; phi += spacingDeg) {
      ++report.steps;
      candidates.clear();
      for (std::size_t i : members) {
        if (taken[i] || (!exclude.empty() && exclude[i])) continue;
        if (azimuthDistanceDeg(samples[i].azimuthDeg, phi) <= toleranceDeg) candidates.push_back(i);
      }
      if (candidates.empty()) {
        ++report.skippedSteps;
        continue;
      }
      const std::size_t pick =
          candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
      taken[pick] = true;
      report.selected.push_back(pick);
    }
  }
  if (!found) fail(ErrorClass::kData, "UnknownClass", "no samples labeled '" + classLabel + "'");
  return report;
}

// ---------------------------------------------------------------------------
// MSTAR

namespace {

float readBigEndianFloat(const std::uint8_t* p) {
  const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) << 24 | static_cast<std::uint32_t>(p[1]) << 16 |
                             static_cast<std::uint32_t>(p[2]) << 8 | static_cast<std::uint32_t>(p[3]);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

void appendBigEndianFloat(std::vector<std::uint8_t>& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof bits);
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(bits >> s));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double headerNumber(const std::map<std::string, std::string>& h, const std::string& key) {
  const auto it = h.find(key);
  if (it == h.end()) fail(ErrorClass::kData, "MalformedHeader", "missing header key " + key);
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    return v;
  } catch (const std::exception&) {
    fail(ErrorClass::kData, "MalformedHeader", "non-numeric value for " + key);
  }
}

}  // namespace

SarSample readMstarChip(const std::vector<std::uint8_t>& bytes, int outRows, int outCols) {
  static const char kBegin[] = "[PhoenixHeader";
  static const char kEnd[] = "[EndofPhoenixHeader]";
  if (bytes.size() < sizeof(kBegin) - 1 || std::memcmp(bytes.data(), kBegin, sizeof(kBegin) - 1) != 0) {
    fail(ErrorClass::kData, "MalformedHeader", "missing Phoenix header");
  }
  const std::string head(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(bytes.size(), 1 << 16)));
  const auto endPos = head.find(kEnd);
  if (endPos == std::string::npos) fail(ErrorClass::kData, "MalformedHeader", "unterminated Phoenix header");

  std::map<std::string, std::string> h;
  std::istringstream lines(head.substr(0, endPos));
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    h[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  std::size_t dataStart;
  if (h.count("PhoenixHeaderLength")) {
    dataStart = static_cast<std::size_t>(headerNumber(h, "PhoenixHeaderLength"));
    if (h.count("native_header_length")) dataStart += static_cast<std::size_t>(headerNumber(h, "native_header_length"));
  } else {
    dataStart = head.find('\n', endPos);
    dataStart = dataStart == std::string::npos ? endPos + sizeof(kEnd) - 1 : dataStart + 1;
  }
  const int cols = static_cast<int>(headerNumber(h, "NumberOfColumns"));
  const int rows = static_cast<int>(headerNumber(h, "NumberOfRows"));
  if (rows <= 0 || cols <= 0) fail(ErrorClass::kData, "MalformedHeader", "non-positive raster size");

  SarSample s;
  s.azimuthDeg = headerNumber(h, "TargetAz");
  if (h.count("Incidence")) {
    s.incidenceDeg = headerNumber(h, "Incidence");
  } else if (h.count("IncidenceAngle")) {
    s.incidenceDeg = headerNumber(h, "IncidenceAngle");
  } else {
    s.incidenceDeg = 90.0 - headerNumber(h, "DesiredDepression");
  }
  s.classLabel = h.count("TargetType") ? h["TargetType"] : std::string();
  s.sourceId = h.count("Filename") ? h["Filename"] : std::string();

  const std::size_t block = static_cast<std::size_t>(rows) * cols * 4;
  const std::size_t need = dataStart + 2 * block;
  if (bytes.size() < need) {
    fail(ErrorClass::kData, "TruncatedData",
         "expected " + std::to_string(need) + " bytes, found " + std::to_string(bytes.size()));
  }
  // Center crop or zero pad to the output raster; the phase block is not used.
  s.chip = RealMatrix::Zero(outRows, outCols);
  const int r0 = (rows - outRows) / 2, c0 = (cols - outCols) / 2;
  for (int i = 0; i < outRows; ++i) {
    const int si = i + r0;
    if (si < 0 || si >= rows) continue;
    for (int j = 0; j < outCols; ++j) {
      const int sj = j + c0;
      if (sj < 0 || sj >= cols) continue;
      s.chip(i, j) = readBigEndianFloat(bytes.data() + dataStart + (static_cast<std::size_t>(si) * cols + sj) * 4);
    }
  }
  return s;
}

std::vector<std::uint8_t> writeMstarChip(const SarSample& sample, const RealMatrix& phase) {
  const int rows = static_cast<int>(sample.chip.rows()), cols = static_cast<int>(sample.chip.cols());
  auto body = [&](std::size_t headerLength) {
    std::ostringstream h;
    h << "[PhoenixHeaderVer01.04]\n"
      << "PhoenixHeaderLength= " << std::setw(6) << std::setfill('0') << headerLength << "\n"
      << std::setfill(' ') << "native_header_length= 0\n"
      << "NumberOfColumns= " << cols << "\n"
      << "NumberOfRows= " << rows << "\n"
      << "TargetType= " << sample.classLabel << "\n"
      << "Filename= " << sample.sourceId << "\n"
      << std::setprecision(17) << "TargetAz= " << sample.azimuthDeg << "\n"
      << "Incidence= " << sample.incidenceDeg << "\n"
      << "DesiredDepression= " << 90.0 - sample.incidenceDeg << "\n"
      << "[EndofPhoenixHeader]\n";
    return h.str();
  };
  std::string header = body(0);
  header = body(header.size());

  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + static_cast<std::size_t>(rows) * cols * 8);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) appendBigEndianFloat(out, static_cast<float>(sample.chip(i, j)));
  }
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      appendBigEndianFloat(out, phase.size() ? static_cast<float>(phase(i, j)) : 0.0f);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic scenes

std::vector<SyntheticTargetModel> makeSyntheticClasses(int count, std::uint64_t seed,
                                                       const SyntheticClassOptions& options) {
  if (count < 1) fail(ErrorClass::kInvalidArgument, "InvalidClassCount", "need at least one class");
  if (options.clutterLevel < 0.0) fail(ErrorClass::kInvalidArgument, "InvalidClutter", "clutterLevel must be >= 0");
  if (options.distinctiveCount < 0) fail(ErrorClass::kInvalidArgument, "InvalidClassOptions", "distinctiveCount < 0");
  if (options.bodyRows < 1 || options.bodyCols < 1) {
    fail(ErrorClass::kInvalidArgument, "InvalidClassOptions", "body grid needs at least one scatterer");
  }
  const double length = 6.6, width = 3.3;
  const int rows = options.bodyRows, cols = options.bodyCols;
  // Shared body: a jittered grid of directional scatterers.
  Rng layoutRng(deriveSeed(seed, 0xB0D1));
  std::vector<PointScatterer> body;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      PointScatterer s;
      s.x = (i + 0.5) / rows * length - length / 2 + 0.25 * (uniform01(layoutRng) - 0.5);
      s.y = (j + 0.5) / cols * width - width / 2 + 0.25 * (uniform01(layoutRng) - 0.5);
      s.amplitude = options.bodyAmplitudeMin +
                    (options.bodyAmplitudeMax - options.bodyAmplitudeMin) * uniform01(layoutRng);
      s.lobeCenterDeg = 360.0 * uniform01(layoutRng);
      s.lobeWidthDeg = options.bodyLobeMinDeg + (options.bodyLobeMaxDeg - options.bodyLobeMinDeg) * uniform01(layoutRng);
      body.push_back(s);
    }
  }
  // Distinctive sites: at least 1.2 m apart and 0.4 m clear of the body so
  // they stay resolvable.
  std::vector<Vec2> sites;
  const std::size_t needed = static_cast<std::size_t>(count) * static_cast<std::size_t>(options.distinctiveCount);
  for (int guard = 0; sites.size() < needed; ++guard) {
    if (guard > 100000) fail(ErrorClass::kInvalidArgument, "InvalidClassOptions", "too many distinctive scatterers");
    const Vec2 p((uniform01(layoutRng) - 0.5) * 0.85 * length, (uniform01(layoutRng) - 0.5) * 0.85 * width);
    bool clear = true;
    for (const auto& q : sites) clear = clear && (p - q).norm() >= 1.2;
    for (const auto& b : body) clear = clear && (p - Vec2(b.x, b.y)).norm() >= 0.4;
    if (clear) sites.push_back(p);
  }

  std::vector<SyntheticTargetModel> classes;
  for (int c = 0; c < count; ++c) {
    Rng rng(deriveSeed(seed, 0xC1A5, static_cast<std::uint64_t>(c)));
    SyntheticTargetModel t;
    t.label = "class" + std::to_string(c);
    t.clutterLevel = options.clutterLevel;
    t.footprintLength = length;
    t.footprintWidth = width;
    for (PointScatterer s : body) {
      s.amplitude *= 1.0 + options.bodyVariation * (2.0 * uniform01(rng) - 1.0);
      t.pointScatterers.push_back(s);
    }
    for (int k = 0; k < options.distinctiveCount; ++k) {
      PointScatterer s;
      const Vec2& site = sites[static_cast<std::size_t>(c * options.distinctiveCount + k)];
      s.x = site.x();
      s.y = site.y();
      s.amplitude = options.distinctiveAmplitude;
      s.lobeWidthDeg = 360.0;  // isotropic
      t.pointScatterers.push_back(s);
    }
    classes.push_back(std::move(t));
  }
  return classes;
}

namespace {

double lobeGain(const PointScatterer& s, double azimuthDeg) {
  if (s.lobeWidthDeg >= 360.0) return 1.0;
  const double sigma = s.lobeWidthDeg / 2.354820045;  // width is the FWHM
  const double d = azimuthDistanceDeg(azimuthDeg, s.lobeCenterDeg);
  return std::exp(-0.5 * d * d / (sigma * sigma));
}

std::string formatAngle(double deg) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(2) << deg;
  return o.str();
}

}  // namespace

SarSample renderSyntheticSample(const SyntheticTargetModel& target, const AspectAngles& aspect,
                                const PointResponseRenderer& renderer, std::uint64_t seed,
                                const SyntheticRenderOptions& options) {
  if (target.pointScatterers.empty()) fail(ErrorClass::kInvalidArgument, "EmptyTarget", "no scatterers");
  if (target.clutterLevel < 0.0) fail(ErrorClass::kInvalidArgument, "InvalidClutter", "clutterLevel must be >= 0");
  const SarSystemSpec& spec = renderer.spec();
  Rng rng(deriveSeed(seed, 0x5A3));

  const double cr = spec.chipRows / 2, cc = spec.chipCols / 2;
  double jr = 0.0, jc = 0.0;
  if (options.maxJitterPx > 0.0) {
    jr = (2.0 * uniform01(rng) - 1.0) * options.maxJitterPx;
    jc = (2.0 * uniform01(rng) - 1.0) * options.maxJitterPx;
  }
  const Vec2 offset = pixelToGround(cr + jr, cc + jc, aspect.azimuth, spec);
  const double azDeg = radToDeg(aspect.azimuth);

  ComplexMatrix px = ComplexMatrix::Zero(spec.chipRows, spec.chipCols);
  for (const auto& s : target.pointScatterers) {
    renderer.stamp(px, offset.x() + s.x, offset.y() + s.y, aspect.azimuth, s.amplitude * lobeGain(s, azDeg));
  }
  if (target.clutterLevel > 0.0) {
    const double level = target.clutterLevel * px.cwiseAbs().maxCoeff();
    std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
    for (Eigen::Index i = 0; i < px.size(); ++i) px.data()[i] += level * cd(n01(rng), n01(rng));
  }

  SarSample out;
  out.complexChip = std::move(px);
  out.chip = out.complexChip.cwiseAbs();
  out.incidenceDeg = radToDeg(aspect.incidence);
  out.azimuthDeg = azDeg;
  out.classLabel = target.label;
  out.sourceId = target.label + "_i" + formatAngle(out.incidenceDeg) + "_a" + formatAngle(azDeg);
  out.truthRow = cr + jr;
  out.truthCol = cc + jc;
  return out;
}

// ---------------------------------------------------------------------------
// Persistence

void saveDataset(const std::string& dir, const std::vector<SarSample>& samples) {
  std::error_code ec;
  fs::create_directories(fs::path(dir) / "chips", ec);
  if (ec) fail(ErrorClass::kIo, "WriteFailed", "cannot create " + dir + ": " + ec.message());
  std::ofstream index(fs::path(dir) / "index.jsonl");
  if (!index) fail(ErrorClass::kIo, "WriteFailed", "cannot write index in " + dir);
  for (const auto& s : samples) {
    const std::string rel = "chips/" + s.sourceId + ".cimg";
    ComplexImage img;
    img.pixels = s.hasComplex() ? s.complexChip : ComplexMatrix(s.chip.cast<cd>());
    writeCimg((fs::path(dir) / rel).string(), img);
    nlohmann::ordered_json j;
    j["classLabel"] = s.classLabel;
    j["incidence_deg"] = s.incidenceDeg;
    j["azimuth_deg"] = s.azimuthDeg;
    j["path"] = rel;
    j["sourceId"] = s.sourceId;
    if (!std::isnan(s.truthRow)) {
      j["truth_row"] = s.truthRow;
      j["truth_col"] = s.truthCol;
    }
    index << j.dump() << "\n";
  }
}

std::vector<SarSample> loadDataset(const std::string& dir) {
  const fs::path indexPath = fs::path(dir) / "index.jsonl";
  std::ifstream in(indexPath);
  if (!in) fail(ErrorClass::kData, "MissingIndex", "no index.jsonl in " + dir);
  std::vector<SarSample> out;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      SarSample s;
      s.classLabel = j.at("classLabel").get<std::string>();
      s.incidenceDeg = j.at("incidence_deg").get<double>();
      s.azimuthDeg = j.at("azimuth_deg").get<double>();
      s.sourceId = j.value("sourceId", j.at("path").get<std::string>());
      if (j.contains("truth_row")) {
        s.truthRow = j["truth_row"].get<double>();
        s.truthCol = j["truth_col"].get<double>();
      }
      const ComplexImage img = readCimg((fs::path(dir) / j.at("path").get<std::string>()).string());
      s.complexChip = img.pixels;
      s.chip = img.pixels.cwiseAbs();
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorClass::kData, "MalformedIndex", indexPath.string() + ":" + std::to_string(lineNo) + ": " + e.what());
    }
  }
  if (out.empty()) fail(ErrorClass::kData, "EmptyDataset", "no samples in " + dir);
  return out;
}

std::vector<SarSample> loadMstarDirectory(const std::string& dir) {
  if (!fs::is_directory(dir)) fail(ErrorClass::kData, "NotADirectory", dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SarSample> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    char probe[14] = {};
    in.read(probe, sizeof probe);
    if (in.gcount() < static_cast<std::streamsize>(sizeof probe) || std::memcmp(probe, "[PhoenixHeader", 14) != 0) {
      continue;
    }
    SarSample s = readMstarChip(readFileBytes(f.string()));
    if (s.sourceId.empty()) s.sourceId = f.filename().string();
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace sarcr
