// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "core/errors.hpp"
#include "core/experiment.hpp"

using namespace sarcr;

namespace {

std::string kindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return "";
}

}  // namespace

TEST_SUITE("experiment") {
  TEST_CASE("spec JSON round trip") {
    SarSystemSpec s;
    s.bandwidth = 300e6;
    const SarSystemSpec back = specFromJson(specToJson(s));
    CHECK(back.bandwidth == s.bandwidth);
    CHECK(back.chipRows == s.chipRows);
    CHECK(kindOf([] { specFromJson(Json{{"bandwith", 1.0}}); }) == "UnknownKey");
    CHECK(kindOf([] { specFromJson(Json{{"bandwidth", "wide"}}); }) == "InvalidValue");
  }

  TEST_CASE("optimizer sections") {
    const DEConfig de = deConfigFromJson(Json{{"population_size", 12}, {"crowding", 20}, {"seed", 5}});
    CHECK(de.populationSize == 12);
    CHECK(de.crowding == 20);
    CHECK(de.seed == 5);
    const PSOConfig pso = psoConfigFromJson(Json{{"particle_count", 7}, {"inertia", 0.4}});
    CHECK(pso.particleCount == 7);
    CHECK(pso.inertiaWeight == doctest::Approx(0.4));
    CHECK(kindOf([] { deConfigFromJson(Json{{"pop", 3}}); }) == "UnknownKey");
    const BBoxConfig box = bboxConfigFromJson(Json{{"coarse_to_fine", true}, {"alpha", 2.0}});
    CHECK(box.coarseToFine);
    CHECK(box.verticalExponent == 2.0);
  }

  TEST_CASE("attack and desk sections") {
    const AttackConfig a = attackConfigFromJson(Json{{"reflectors", 8}, {"optimizer", "pso"}});
    CHECK(a.reflectors == 8);
    CHECK(a.optimizer == "pso");
    CHECK(kindOf([] { attackConfigFromJson(Json{{"optimizer", "sgd"}}); }) != "");
    const DeskConfig d = deskConfigFromJson(Json::object());
    CHECK(d.attack.sceneWidth == doctest::Approx(7.0));
    CHECK(d.model.binWidthDeg == doctest::Approx(2.5));
    CHECK(d.anchors == AnchorMode::kTruth);
    const DeskConfig e = deskConfigFromJson(Json{{"anchors", "box"}, {"attack", {{"scene_width", 38.4}}}});
    CHECK(e.anchors == AnchorMode::kBox);
    CHECK(e.attack.sceneWidth == doctest::Approx(38.4));
    CHECK(kindOf([] { deskConfigFromJson(Json{{"anchors", "left"}}); }) != "");
  }

  TEST_CASE("unknown commands and missing inputs") {
    CHECK(kindOf([] { runCommand("fly", Json::object(), "unused"); }) != "");
    CHECK(kindOf([] { runCommand("train", Json::object(), "unused"); }) != "");
  }
}
