// Copyright 2026 The sarcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "core/attack.hpp"
#include "core/errors.hpp"

using namespace sarcr;

namespace {

// Fixed output regardless of input.
class ConstantModel final : public TargetModel {
 public:
  explicit ConstantModel(std::vector<double> p) : p_(std::move(p)) {
    for (std::size_t i = 0; i < p_.size(); ++i) labels_.push_back("c" + std::to_string(i));
  }
  const std::vector<std::string>& classLabels() const override { return labels_; }
  std::vector<double> predict(const RealMatrix&) const override { return p_; }
  std::string name() const override { return "constant"; }

 private:
  std::vector<double> p_;
  std::vector<std::string> labels_;
};

AttackParams sampleParams(int m) {
  AttackParams p;
  p.reflectorCount = m;
  for (int i = 0; i < m; ++i) p.theta.push_back(0.5 * i - 1.0);
  for (int i = 0; i < m; ++i) p.theta.push_back(-0.25 * i);
  for (int i = 0; i < m; ++i) p.theta.push_back(0.2 + 0.1 * i);
  p.theta.push_back(0.3);
  return p;
}

}  // namespace

TEST_SUITE("attack") {
  TEST_CASE("parameter vector round trip and even azimuth spacing") {
    for (int m : {4, 8}) {
      const AttackParams p = sampleParams(m);
      const auto refl = expandParams(p);
      REQUIRE(refl.size() == static_cast<std::size_t>(m));
      CHECK(packParams(refl, p.sceneWidth, p.sceneHeight).theta == p.theta);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          const double d = std::remainder(refl[static_cast<std::size_t>(i)].phi - refl[static_cast<std::size_t>(j)].phi,
                                          2 * kPi / m);
          CHECK(std::abs(d) < 1e-12);
        }
      }
      CHECK(refl[1].phi - refl[0].phi == doctest::Approx(2 * kPi / m));
    }
  }

  TEST_CASE("constraint violations name the parameter") {
    AttackParams p = sampleParams(4);
    p.theta[0] = 100.0;
    try {
      expandParams(p);
      FAIL("expected ConstraintViolation");
    } catch (const Error& e) {
      CHECK(e.kind() == "ConstraintViolation");
      CHECK(std::string(e.what()).find("x_1") != std::string::npos);
    }
    p = sampleParams(4);
    p.theta.back() = kPi;  // phi_1 > 2 pi / 4
    CHECK_THROWS_AS(expandParams(p), Error);
    p = sampleParams(4);
    p.theta.pop_back();
    CHECK_THROWS_AS(expandParams(p), Error);
  }

  TEST_CASE("text format round trip") {
    const AttackParams p = sampleParams(4);
    const AttackParams q = parseParams(formatParams(p));
    REQUIRE(q.theta.size() == p.theta.size());
    for (std::size_t i = 0; i < p.theta.size(); ++i) CHECK(q.theta[i] == doctest::Approx(p.theta[i]).epsilon(1e-12));
    CHECK_THROWS_AS(parseParams("reflectors = 4\n1 0 0 45\n"), Error);
  }

  TEST_CASE("four reflectors always cover the azimuth") {
    const AttackParams p = sampleParams(4);
    const auto refl = expandParams(p);
    for (int k = 0; k < 720; ++k) {
      const AspectAngles a = AspectAngles::make(degToRad(75), 2 * kPi * k / 720.0);
      bool covered = false;
      for (const auto& r : refl) {
        const double phiPrime = wrapTwoPi(toBoresightFrame(a, r.theta, r.phi).azimuthPrime);
        covered = covered || phiPrime <= kPi / 2;
      }
      CHECK(covered);
    }
  }

  TEST_CASE("composition rules") {
    RealMatrix clean = RealMatrix::Constant(4, 4, 2.0);
    ComplexImage zero;
    zero.pixels = ComplexMatrix::Zero(4, 4);
    CHECK(composeAdversarial(clean, zero) == clean);
    ComplexImage p;
    p.pixels = ComplexMatrix::Constant(4, 4, cd(3.0, 4.0));
    CHECK(composeAdversarial(RealMatrix(RealMatrix::Zero(4, 4)), p).isApprox(RealMatrix::Constant(4, 4, 5.0)));
    CHECK(composeAdversarial(clean, p).isApprox(RealMatrix::Constant(4, 4, 7.0)));
    // Complex composition is bounded by the magnitude rule.
    const ComplexMatrix cc = ComplexMatrix::Constant(4, 4, cd(-2.0, 0.0));
    CHECK(composeAdversarial(cc, p).maxCoeff() <= 7.0);
    CHECK(composeAdversarial(cc, p)(0, 0) == doctest::Approx(std::abs(cd(1.0, 4.0))));
    CHECK_THROWS_AS(composeAdversarial(RealMatrix(RealMatrix::Zero(3, 4)), p), Error);
  }

  TEST_CASE("loss of constant models") {
    const SarSystemSpec s;
    ObservationSet obs(3);
    for (auto& o : obs) {
      o.aspect = AspectAngles::make(degToRad(75), 0.4);
      o.clean = RealMatrix::Ones(s.chipRows, s.chipCols);
      o.classLabel = "c0";
    }
    const ChainRenderer r(s);
    AttackParams empty = sampleParams(4);
    const ConstantModel uniform(std::vector<double>(10, 0.1));
    // The model ignores its input, so a cheap stand-in renderer suffices.
    class Blank final : public PerturbationRenderer {
     public:
      ComplexImage render(const std::vector<ReflectorConfig>&, const AspectAngles&) const override {
        ComplexImage i;
        i.pixels = ComplexMatrix::Zero(128, 128);
        return i;
      }
    } blank;
    CHECK(attackLoss(empty, obs, uniform, "c0", blank) == doctest::Approx(-std::log(10.0)));
    const ConstantModel sure({1.0, 0.0});
    CHECK(attackLoss(empty, obs, sure, "c0", blank) == doctest::Approx(0.0));
    const ConstantModel broken({0.7, 0.7});
    CHECK_THROWS_AS(attackLoss(empty, obs, broken, "c0", blank), Error);
  }

  TEST_CASE("fast renderer calibration hits its target") {
    FastRenderer r{SarSystemSpec{}};
    const double inc = degToRad(75);
    const double target = 3.0 * boresightPeak(r, inc);
    const double amp = calibrateTxAmplitude(r, inc, target);
    CHECK(amp == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(boresightPeak(r, inc) == doctest::Approx(target).epsilon(1e-9));
  }

  TEST_CASE("known-aspect reflector faces the estimate") {
    KnownAspectAttack k;
    k.estimatedAzimuth = 1.1;
    k.estimatedIncidence = 1.2;
    const ReflectorConfig r = knownAspectReflector(k, 0.5, -0.5);
    CHECK(r.phi == doctest::Approx(1.1));
    CHECK(r.theta == doctest::Approx(1.2));
    CHECK(r.x == 0.5);
  }
}
