// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <set>

#include "core/data.hpp"
#include "core/errors.hpp"

using namespace sarcr;

namespace {

// One sample per whole degree for each class and incidence.
std::vector<SarSample> gridDataset(const std::vector<std::string>& labels, const std::vector<double>& incidences) {
  std::vector<SarSample> out;
  for (const auto& l : labels) {
    for (double inc : incidences) {
      for (int a = 0; a < 360; ++a) {
        SarSample s;
        s.chip = RealMatrix::Constant(4, 4, a);
        s.classLabel = l;
        s.incidenceDeg = inc;
        s.azimuthDeg = a;
        s.sourceId = l + "_" + std::to_string(static_cast<int>(inc)) + "_" + std::to_string(a);
        out.push_back(s);
      }
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("data") {
  TEST_CASE("circular azimuth distance") {
    CHECK(azimuthDistanceDeg(359.0, 1.0) == doctest::Approx(2.0));
    CHECK(azimuthDistanceDeg(10.0, 190.0) == doctest::Approx(180.0));
    CHECK(azimuthDistanceDeg(-5.0, 5.0) == doctest::Approx(10.0));
  }

  TEST_CASE("index groups by class and incidence") {
    const auto samples = gridDataset({"b", "a"}, {70.0, 75.0});
    const DatasetIndex index(samples);
    CHECK(index.groups().size() == 4);
    CHECK(index.classes() == std::vector<std::string>{"a", "b"});
    CHECK(index.classMembers("a").size() == 720);
    for (const auto& [key, members] : index.groups()) {
      for (std::size_t i = 1; i < members.size(); ++i) {
        CHECK(samples[members[i - 1]].azimuthDeg <= samples[members[i]].azimuthDeg);
      }
    }
  }

  TEST_CASE("azimuth-uniform subset on a one-degree index") {
    const auto samples = gridDataset({"a", "b"}, {70.0, 75.0});
    const DatasetIndex index(samples);
    const SubsetReport r = sampleSubset(index, "a", 10.0, 2.0, 5);
    CHECK(r.selected.size() == 72);
    CHECK(r.skippedSteps == 0);
    std::set<std::size_t> unique(r.selected.begin(), r.selected.end());
    CHECK(unique.size() == r.selected.size());
    int perIncidence[2] = {0, 0};
    for (std::size_t i : r.selected) {
      CHECK(samples[i].classLabel == "a");
      ++perIncidence[samples[i].incidenceDeg > 72.0];
    }
    CHECK(perIncidence[0] == 36);
    CHECK(perIncidence[1] == 36);

    const SubsetReport again = sampleSubset(index, "a", 10.0, 2.0, 5);
    CHECK(again.selected == r.selected);
    const SubsetReport other = sampleSubset(index, "a", 10.0, 2.0, 6);
    CHECK(other.selected != r.selected);
  }

  TEST_CASE("consecutive picks are close to the spacing") {
    const auto samples = gridDataset({"a"}, {75.0});
    const DatasetIndex index(samples);
    const SubsetReport r = sampleSubset(index, "a", 10.0, 2.0, 21);
    std::vector<double> az;
    for (std::size_t i : r.selected) az.push_back(samples[i].azimuthDeg);
    std::sort(az.begin(), az.end());
    for (std::size_t i = 0; i < az.size(); ++i) {
      const double gap = azimuthDistanceDeg(az[(i + 1) % az.size()], az[i]);
      CHECK(gap >= 6.0);
      CHECK(gap <= 14.0);
    }
  }

  TEST_CASE("excluded samples are never drawn") {
    const auto samples = gridDataset({"a"}, {75.0});
    const DatasetIndex index(samples);
    const SubsetReport first = sampleSubset(index, "a", 10.0, 2.0, 1);
    std::vector<bool> exclude(samples.size(), false);
    for (std::size_t i : first.selected) exclude[i] = true;
    const SubsetReport second = sampleSubset(index, "a", 10.0, 2.0, 2, exclude);
    for (std::size_t i : second.selected) CHECK_FALSE(exclude[i]);
  }

  TEST_CASE("sparse data skips steps") {
    auto samples = gridDataset({"a"}, {75.0});
    samples.erase(std::remove_if(samples.begin(), samples.end(),
                                 [](const SarSample& s) { return s.azimuthDeg >= 180.0; }),
                  samples.end());
    const DatasetIndex index(samples);
    const SubsetReport r = sampleSubset(index, "a", 10.0, 2.0, 3);
    CHECK(r.steps == 36);
    CHECK(r.skippedSteps >= 16);
    CHECK(r.selected.size() + static_cast<std::size_t>(r.skippedSteps) == 36);
  }

  TEST_CASE("subset errors") {
    const auto samples = gridDataset({"a"}, {75.0});
    const DatasetIndex index(samples);
    CHECK_THROWS_AS(sampleSubset(index, "zzz", 10.0, 2.0, 1), Error);
    CHECK_THROWS_AS(sampleSubset(index, "a", 0.0, 2.0, 1), Error);
    CHECK_THROWS_AS(sampleSubset(index, "a", 10.0, -1.0, 1), Error);
  }

  TEST_CASE("MSTAR chip round trip, crop and truncation") {
    SarSample s;
    s.chip = RealMatrix(6, 5);
    for (int i = 0; i < 6; ++i) {
      for (int j = 0; j < 5; ++j) s.chip(i, j) = 0.25 * (i * 5 + j);
    }
    s.classLabel = "T72";
    s.sourceId = "HB03333.015";
    s.azimuthDeg = 123.5;
    s.incidenceDeg = 75.0;
    const auto bytes = writeMstarChip(s);
    const SarSample back = readMstarChip(bytes, 6, 5);
    CHECK(back.classLabel == "T72");
    CHECK(back.sourceId == "HB03333.015");
    CHECK(back.azimuthDeg == doctest::Approx(123.5));
    CHECK(back.incidenceDeg == doctest::Approx(75.0));
    CHECK(back.chip.isApprox(s.chip));

    const SarSample crop = readMstarChip(bytes, 2, 3);
    CHECK(crop.chip(0, 0) == doctest::Approx(s.chip(2, 1)));
    const SarSample pad = readMstarChip(bytes, 8, 5);
    CHECK(pad.chip(0, 0) == 0.0);
    CHECK(pad.chip(1, 0) == doctest::Approx(s.chip(0, 0)));

    std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 1);
    try {
      readMstarChip(cut, 6, 5);
      FAIL("truncated chip accepted");
    } catch (const Error& e) {
      CHECK(e.kind() == "TruncatedData");
    }
    std::vector<std::uint8_t> junk{'n', 'o', 'p', 'e'};
    CHECK_THROWS_AS(readMstarChip(junk), Error);
  }

  TEST_CASE("synthetic classes keep distinctive sites clear of the body") {
    SyntheticClassOptions opt;
    opt.distinctiveAmplitude = 0.18;
    const auto classes = makeSyntheticClasses(4, 7, opt);
    REQUIRE(classes.size() == 4);
    const auto again = makeSyntheticClasses(4, 7, opt);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      REQUIRE(classes[c].pointScatterers.size() == again[c].pointScatterers.size());
      const auto& ps = classes[c].pointScatterers;
      const PointScatterer& site = ps.back();
      CHECK(site.lobeWidthDeg >= 360.0);
      CHECK(site.amplitude == doctest::Approx(0.18));
      for (std::size_t k = 0; k + 1 < ps.size(); ++k) {
        CHECK(std::hypot(site.x - ps[k].x, site.y - ps[k].y) >= 0.4 - 1e-12);
      }
    }
    CHECK_THROWS_AS(makeSyntheticClasses(0, 7), Error);
  }

  TEST_CASE("dataset save and load") {
    const auto dir = std::filesystem::temp_directory_path() / "sarcr_test_dataset";
    std::filesystem::remove_all(dir);
    auto samples = gridDataset({"a"}, {75.0});
    samples.resize(3);
    samples[1].truthRow = 60.5;
    samples[1].truthCol = 63.0;
    saveDataset(dir.string(), samples);
    const auto back = loadDataset(dir.string());
    REQUIRE(back.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(back[i].sourceId == samples[i].sourceId);
      CHECK(back[i].azimuthDeg == samples[i].azimuthDeg);
      CHECK(back[i].chip.isApprox(samples[i].chip));
    }
    CHECK(back[1].truthRow == 60.5);
    CHECK(std::isnan(back[0].truthRow));
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(loadDataset(dir.string()), Error);
  }
}
