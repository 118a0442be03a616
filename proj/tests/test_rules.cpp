#include <doctest.h>

#include "qceq/angles.hpp"
#include "qceq/rules.hpp"
#include "qceq/semantics.hpp"

using namespace qceq;

TEST_CASE("instantiate basic rules") {
  RuleInstance a = instantiate("A", {kTau});
  CHECK(a.lhs.gates.size() == 1);
  CHECK(a.rhs.gates.empty());
  CHECK(soundness_check(a).pass);
  CHECK_THROWS_AS(instantiate("A", {1.0}), Error);

  RuleInstance c = instantiate("C", {});
  CHECK(c.lhs.gates.size() == 2);
  CHECK(soundness_check(c).deviation < 1e-12);

  CHECK_THROWS_AS(instantiate("nonsense", {}), Error);
  CHECK_THROWS_AS(instantiate("G", {}), Error); // missing parameter
}

TEST_CASE("rule E is exactly sound (permutations)") {
  RuleInstance e = instantiate("E", {});
  CHECK(soundness_check(e).deviation == 0.0);
}

TEST_CASE("rule I is exact") {
  RuleInstance i = instantiate("I", {});
  CHECK(soundness_check(i).deviation < 1e-12);
}

TEST_CASE("K* instances at several sizes") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> ang(0, 2 * kTau);
  for (int n = 2; n <= 5; ++n) {
    RuleInstance k =
        instantiate("K*", {ang(rng), ang(rng), ang(rng), ang(rng)}, n);
    CHECK(k.lhs.n_in == n);
    SoundnessReport rep = soundness_check(k);
    CHECK(rep.pass);
    CHECK(rep.deviation < 1e-9);
  }
}

TEST_CASE("axioms pass a soundness sweep in their own theories") {
  std::mt19937_64 rng(5);
  for (Theory t : {Theory::QC, Theory::QCiso, Theory::QCancilla, Theory::QCground}) {
    for (const std::string &name : axiom_set(t)) {
      const Rule &r = find_rule(name);
      for (int i = 0; i < 3; ++i) {
        RuleInstance inst = instantiate_random(r, rng, 4);
        SoundnessReport rep = t == Theory::QCground
                                  ? soundness_check_cptp(inst)
                                  : soundness_check(inst);
        INFO(name);
        CHECK(rep.pass);
      }
    }
  }
}

TEST_CASE("retired rules are sound") {
  std::mt19937_64 rng(6);
  for (const std::string &name : retired_set()) {
    const Rule &r = find_rule(name);
    for (int i = 0; i < 5; ++i) {
      RuleInstance inst = instantiate_random(r, rng, 4);
      INFO(name);
      CHECK(soundness_check(inst).pass);
    }
  }
}

TEST_CASE("derived identities hold across theories") {
  for (Theory t : {Theory::QC, Theory::QCiso, Theory::QCancilla}) {
    for (const IdentityReport &rep : derived_identity_suite(t, 4, 11)) {
      INFO(rep.rule);
      CHECK(rep.pass);
    }
  }
}

TEST_CASE("specific identity examples from the catalog") {
  // XX = Id at one qubit, exactly
  CHECK(soundness_check(instantiate("XX", {})).deviation == 0.0);
  // multi-controlled phase lifting
  RuleInstance lift = instantiate("mctrlPlift", {0.9}, 4);
  CHECK(soundness_check(lift).deviation < 1e-10);
  // ancilla-mediated MCP definition at 4 and 5 wires
  for (int size : {4, 5, 6}) {
    RuleInstance p = instantiate("Paltdef", {1.1}, size);
    CHECK(soundness_check(p).deviation < 1e-10);
  }
}

TEST_CASE("explicit RHS parameters are accepted and validated") {
  std::array<double, 4> g{0.5, 1.2, 2.7, 4.1};
  KstarAngles k = solve_kstar(g);
  std::vector<double> both(g.begin(), g.end());
  both.insert(both.end(), k.delta.begin(), k.delta.end());
  RuleInstance inst = instantiate("K*", both, 3);
  CHECK(soundness_check(inst).pass);
  // non-canonical explicit deltas are rejected
  std::vector<double> bad = both;
  bad[4 + 1] = 2.0; // delta2 with delta3 = ... violates a range or clause
  bad[4 + 0] = 5.0; // delta1 outside [0, pi)
  CHECK_THROWS_AS(instantiate("K*", bad, 3), Error);

  // J with explicit canonical betas
  std::vector<double> jp{0.7, 1.1, 2.3};
  RuleInstance j = instantiate("J", jp);
  std::vector<double> jboth = jp;
  EulerAngles e = euler_zxz(eval_unitary(j.lhs));
  jboth.insert(jboth.end(), {e.b0, e.b1, e.b2, e.b3});
  RuleInstance j2 = instantiate("J", jboth);
  CHECK(soundness_check(j2).pass);
  std::vector<double> jbad = jboth;
  jbad[3 + 1] = kPi + 0.5; // beta1 out of range
  CHECK_THROWS_AS(instantiate("J", jbad), Error);
}

TEST_CASE("K2 under CPTP semantics (ground reading)") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ang(0, 2 * kTau);
  RuleInstance k = instantiate("K2", {ang(rng), ang(rng), ang(rng), ang(rng)});
  SoundnessReport rep = soundness_check_cptp(k);
  CHECK(rep.pass);
}
