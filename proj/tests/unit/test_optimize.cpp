// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/geometry.hpp"
#include "core/optimize.hpp"

using namespace sarcr;

namespace {

double sphere(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

Bounds box(int dim, double half) {
  Bounds b;
  b.lower.assign(static_cast<std::size_t>(dim), -half);
  b.upper.assign(static_cast<std::size_t>(dim), half);
  return b;
}

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1]) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("optimize") {
  TEST_CASE("differential evolution on the sphere") {
    DEConfig c;
    c.seed = 42;
    const OptimizeTrace t = minimizeDE(sphere, box(13, 1.0), c);
    CHECK(t.bestLoss < 1e-2);
    CHECK(nonincreasing(t.bestLossPerIteration));
    CHECK(t.bestLossPerIteration.size() == static_cast<std::size_t>(c.maxIterations + 1));
    CHECK(t.evaluationCount <= c.populationSize * (c.maxIterations + 1));
    CHECK(box(13, 1.0).contains(t.bestParams));
    const OptimizeTrace again = minimizeDE(sphere, box(13, 1.0), c);
    CHECK(again.bestParams == t.bestParams);
    CHECK(again.bestLossPerIteration == t.bestLossPerIteration);
  }

  TEST_CASE("parallel evaluation does not change the result") {
    DEConfig c;
    c.seed = 7;
    c.maxIterations = 10;
    const OptimizeTrace a = minimizeDE(sphere, box(5, 1.0), c);
    c.jobs = 3;
    const OptimizeTrace b = minimizeDE(sphere, box(5, 1.0), c);
    CHECK(a.bestParams == b.bestParams);
    PSOConfig p;
    p.seed = 7;
    p.maxIterations = 10;
    const OptimizeTrace x = minimizePSO(sphere, box(5, 1.0), p);
    p.jobs = 4;
    CHECK(minimizePSO(sphere, box(5, 1.0), p).bestParams == x.bestParams);
  }

  TEST_CASE("particle swarm on the sphere") {
    PSOConfig c;
    c.seed = 42;
    const OptimizeTrace t = minimizePSO(sphere, box(13, 1.0), c);
    CHECK(t.bestLoss < 1e-2);
    CHECK(nonincreasing(t.bestLossPerIteration));
    CHECK(t.evaluationCount <= c.particleCount * (c.maxIterations + 1));
    CHECK(minimizePSO(sphere, box(13, 1.0), c).bestParams == t.bestParams);
  }

  TEST_CASE("crowding replacement still converges") {
    DEConfig c;
    c.seed = 3;
    c.crowding = 20;
    c.maxIterations = 200;
    const OptimizeTrace t = minimizeDE(sphere, box(6, 1.0), c);
    CHECK(t.bestLoss < 1e-2);
    CHECK(t.bestLoss < 1e-2 * t.bestLossPerIteration.front());
  }

  TEST_CASE("degenerate box returns its only point") {
    Bounds b;
    b.lower = {0.5, -0.25};
    b.upper = {0.5, -0.25};
    DEConfig c;
    const OptimizeTrace t = minimizeDE(sphere, b, c);
    CHECK(t.bestParams == b.lower);
    CHECK(t.bestLoss == doctest::Approx(0.3125));
    PSOConfig p;
    CHECK(minimizePSO(sphere, b, p).bestParams == b.lower);
  }

  TEST_CASE("two particles stay inside the box") {
    PSOConfig p;
    p.particleCount = 2;
    p.maxIterations = 20;
    const OptimizeTrace t = minimizePSO(sphere, box(3, 2.0), p);
    CHECK(box(3, 2.0).contains(t.bestParams));
    CHECK(nonincreasing(t.bestLossPerIteration));
  }

  TEST_CASE("invalid inputs") {
    Bounds b;
    b.lower = {1.0};
    b.upper = {0.0};
    CHECK_THROWS_AS(minimizeDE(sphere, b, DEConfig{}), Error);
    DEConfig c;
    c.populationSize = 3;
    CHECK_THROWS_AS(minimizeDE(sphere, box(2, 1.0), c), Error);
    PSOConfig p;
    p.particleCount = 1;
    CHECK_THROWS_AS(minimizePSO(sphere, box(2, 1.0), p), Error);
  }

  TEST_CASE("objective failure keeps the partial trace") {
    int calls = 0;
    auto bad = [&](const std::vector<double>& x) {
      return ++calls > 50 ? std::nan("") : sphere(x);
    };
    try {
      minimizeDE(bad, box(2, 1.0), DEConfig{});
      FAIL("expected ObjectiveFailure");
    } catch (const ObjectiveFailure& e) {
      CHECK(e.partialTrace().bestLossPerIteration.size() >= 1);
    }
  }

  TEST_CASE("trace CSV") {
    OptimizeTrace t;
    t.bestLossPerIteration = {2.0, 1.5};
    CHECK(t.toCsv() == "iteration,bestLoss\n0,2\n1,1.5\n");
  }

  TEST_CASE("fixed-angle variants") {
    Bounds full;
    for (int i = 0; i < 13; ++i) {
      full.lower.push_back(-1.0 - i);
      full.upper.push_back(1.0 + i);
    }
    CHECK(fixedAngleVariants(full, 4, AngleVariant::kFree).bounds.dim() == 13);
    const ReducedSpace theta = fixedAngleVariants(full, 4, AngleVariant::kThetaFixed);
    CHECK(theta.bounds.dim() == 9);
    const auto v = theta.expand(std::vector<double>(9, 0.0));
    CHECK(v[8] == doctest::Approx(kDiagonalIncidence));
    const ReducedSpace both = fixedAngleVariants(full, 4, AngleVariant::kBothFixed);
    CHECK(both.bounds.dim() == 8);
    CHECK(both.expand(std::vector<double>(8, 0.0))[12] == 0.0);
    CHECK(fixedAngleVariants(full, 4, AngleVariant::kPhiFixed).bounds.dim() == 12);
  }
}
