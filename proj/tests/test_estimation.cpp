#include <doctest.h>

#include <cmath>

#include "blindspot/estimation.hpp"
#include "blindspot/rng.hpp"
#include "oracles.hpp"

using namespace blindspot;
using oracle::dist;
using oracle::kernel;

TEST_CASE("sample_joint is deterministic and converges") {
  SUBCASE("point-mass joint yields identical records") {
    JointLaw pm = joint(dist({"x1"}, {1.0}), kernel({"y1"}, {{"x1", {1.0}}}), Regime::on_policy);
    SampleSet s = sample_joint(pm, 5, 99);
    REQUIRE(s.records.size() == 5);
    for (const auto& [x, y] : s.records) {
      CHECK(x == "x1");
      CHECK(y == "y1");
    }
  }

  SUBCASE("same (j, n, seed) twice gives identical sample sets") {
    oracle::Instance inst = oracle::reference_instance();
    SampleSet a = sample_joint(inst.p, 1000, 123);
    SampleSet b = sample_joint(inst.p, 1000, 123);
    CHECK(a.records == b.records);
    SampleSet c = sample_joint(inst.p, 1000, 124);
    CHECK(a.records != c.records);
  }

  SUBCASE("n = 0 is an error") {
    oracle::Instance inst = oracle::reference_instance();
    CHECK_THROWS_AS(sample_joint(inst.p, 0, 1), ValidationError);
  }

  SUBCASE("empirical frequency of (x2, y2) near its exact mass 0.4") {
    oracle::Instance inst = oracle::reference_instance();
    const double exact = oracle::enumerate_joint(inst.p).at({"x2", "y2"});
    REQUIRE(exact == doctest::Approx(0.4).epsilon(1e-15));
    SampleSet s = sample_joint(inst.p, 100000, 7);
    double count = 0.0;
    for (const auto& [x, y] : s.records)
      if (x == "x2" && y == "y2") count += 1.0;
    CHECK(std::abs(count / 100000.0 - exact) < 0.01);
  }
}

TEST_CASE("mc_risk: sample mean with a Hoeffding interval") {
  oracle::Instance inst = oracle::reference_instance();
  BoundedLoss loss = oracle::reference_loss();

  SUBCASE("constant loss is estimated exactly") {
    BoundedLoss c = BoundedLoss::make({"x1", "x2"}, {"y1", "y2"}, {0.3, 0.3, 0.3, 0.3}, 0.0, 1.0);
    SampleSet s = sample_joint(inst.p, 500, 5);
    Estimate e = mc_risk(s, c, 0.95);
    CHECK(e.value == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(e.n == 500);
  }

  SUBCASE("quadrupling n halves the half-width") {
    SampleSet s1 = sample_joint(inst.p, 1000, 5);
    SampleSet s4 = sample_joint(inst.p, 4000, 5);
    Estimate e1 = mc_risk(s1, loss, 0.99);
    Estimate e4 = mc_risk(s4, loss, 0.99);
    const double hw1 = e1.ci_high - e1.value;
    const double hw4 = e4.ci_high - e4.value;
    CHECK(hw4 == doctest::Approx(hw1 / 2.0).epsilon(1e-12));
  }

  SUBCASE("interval brackets the point value") {
    SampleSet s = sample_joint(inst.p, 100, 5);
    Estimate e = mc_risk(s, loss, 0.9);
    CHECK(e.ci_low <= e.value);
    CHECK(e.value <= e.ci_high);
  }

  SUBCASE("interval contains the exact risk on seeded smoke trials") {
    const double exact = risk(inst.p, loss);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      SampleSet s = sample_joint(inst.p, 2000, seed);
      Estimate e = mc_risk(s, loss, 0.99);
      REQUIRE(e.ci_low <= exact);
      REQUIRE(exact <= e.ci_high);
    }
  }

  SUBCASE("one-prompt instance: CI brackets the exact risk 0.1 in nearly every trial") {
    JointLaw p = joint(dist({"x1"}, {1.0}), kernel({"y1", "y2"}, {{"x1", {0.9, 0.1}}}),
                       Regime::on_policy);
    BoundedLoss l = BoundedLoss::make({"x1"}, {"y1", "y2"}, {0.0, 1.0}, 0.0, 1.0);
    REQUIRE(risk(p, l) == doctest::Approx(0.1).epsilon(1e-15));
    std::size_t covered = 0;
    const std::size_t trials = 1000;
    for (std::uint64_t seed = 0; seed < trials; ++seed) {
      Estimate e = mc_risk(sample_joint(p, 10000, seed), l, 0.99);
      if (e.ci_low <= 0.1 && 0.1 <= e.ci_high) ++covered;
    }
    CHECK(covered >= trials * 99 / 100);
  }

  SUBCASE("errors") {
    SampleSet empty;
    CHECK_THROWS_AS(mc_risk(empty, loss, 0.95), ValidationError);
    SampleSet s = sample_joint(inst.p, 10, 5);
    CHECK_THROWS_AS(mc_risk(s, loss, 0.0), ValidationError);
    CHECK_THROWS_AS(mc_risk(s, loss, 1.0), ValidationError);
    BoundedLoss partial = BoundedLoss::make({"x1"}, {"y1", "y2"}, {0.0, 1.0}, 0.0, 1.0);
    CHECK_THROWS_AS(mc_risk(s, partial, 0.95), ValidationError);
  }
}

TEST_CASE("empirical_kernel reconstructs conditional frequencies") {
  const std::vector<Label> xs = {"x1", "x2"};
  const std::vector<Label> ys = {"y1", "y2"};

  SUBCASE("all mass on one pair") {
    SampleSet s;
    s.records = {{"x1", "y1"}, {"x1", "y1"}, {"x1", "y1"}};
    Kernel k = empirical_kernel(s, xs, ys);
    CHECK(k.row("x1").weight_of("y1") == 1.0);
    CHECK(k.row("x1").weight_of("y2") == 0.0);
    CHECK_FALSE(k.has_row("x2"));  // dropped by default
    CHECK_THROWS_AS(empirical_kernel(s, xs, ys, MissingPromptPolicy::error), ValidationError);
  }

  SUBCASE("50/50 split") {
    SampleSet s;
    s.records = {{"x1", "y1"}, {"x1", "y2"}, {"x1", "y1"}, {"x1", "y2"}};
    Kernel k = empirical_kernel(s, {"x1"}, ys);
    CHECK(k.row("x1").weight_of("y1") == 0.5);
    CHECK(k.row("x1").weight_of("y2") == 0.5);
  }

  SUBCASE("label outside the alphabet is an error") {
    SampleSet s;
    s.records = {{"x9", "y1"}};
    CHECK_THROWS_AS(empirical_kernel(s, xs, ys), ValidationError);
  }

  SUBCASE("large-n reconstruction is row-wise close to the true kernel") {
    oracle::Instance inst = oracle::reference_instance();
    SampleSet s = sample_joint(inst.p, 100000, 21);
    Kernel k = empirical_kernel(s, xs, ys);
    for (const Label& x : xs) {
      const double row_tv = tv_distributions(k.row(x), inst.p.kernel().row(x));
      REQUIRE(row_tv <= 0.02);
    }
  }
}

TEST_CASE("plug_in_tv: empirical half-L1 with a bootstrap interval") {
  oracle::Instance inst = oracle::reference_instance();

  SUBCASE("identical multisets give zero") {
    SampleSet s = sample_joint(inst.p, 200, 3);
    Estimate e = plug_in_tv(s, s, {.resamples = 100, .confidence = 0.9, .seed = 1});
    CHECK(e.value == 0.0);
    CHECK(e.ci_low == 0.0);
  }

  SUBCASE("disjoint observed pairs give one") {
    SampleSet a, b;
    a.records = {{"x1", "y1"}, {"x1", "y1"}};
    b.records = {{"x2", "y2"}, {"x2", "y2"}};
    Estimate e = plug_in_tv(a, b, oracle::no_bootstrap());
    CHECK(e.value == 1.0);
  }

  SUBCASE("estimates the exact TV of the reference instance") {
    SampleSet sp = sample_joint(inst.p, 100000, 31);
    SampleSet sq = sample_joint(inst.q, 100000, 32);
    Estimate e = plug_in_tv(sp, sq, {.resamples = 200, .confidence = 0.95, .seed = 9});
    CHECK(std::abs(e.value - 0.4) < 0.02);
    CHECK(e.ci_low <= e.value);
    CHECK(e.value <= e.ci_high);
  }

  SUBCASE("bit-identical given identical inputs and seed") {
    SampleSet sp = sample_joint(inst.p, 500, 41);
    SampleSet sq = sample_joint(inst.q, 500, 42);
    BootstrapOptions opts{.resamples = 300, .confidence = 0.9, .seed = 77};
    Estimate a = plug_in_tv(sp, sq, opts);
    Estimate b = plug_in_tv(sp, sq, opts);
    CHECK(a.value == b.value);
    CHECK(a.ci_low == b.ci_low);
    CHECK(a.ci_high == b.ci_high);
  }

  SUBCASE("empty input is an error") {
    SampleSet s = sample_joint(inst.p, 10, 1);
    SampleSet empty;
    CHECK_THROWS_AS(plug_in_tv(s, empty), ValidationError);
  }

  SUBCASE("upward bias at small n shrinks with n when P = Q") {
    // Same law on both sides: the exact TV is 0, the plug-in value is
    // positive noise that must decrease in n on average.
    double mean_small = 0.0, mean_large = 0.0;
    const int trials = 30;
    for (int t = 0; t < trials; ++t) {
      SampleSet a_small = sample_joint(inst.p, 100, 1000 + t);
      SampleSet b_small = sample_joint(inst.p, 100, 2000 + t);
      mean_small += plug_in_tv(a_small, b_small, oracle::no_bootstrap()).value;
      SampleSet a_large = sample_joint(inst.p, 10000, 3000 + t);
      SampleSet b_large = sample_joint(inst.p, 10000, 4000 + t);
      mean_large += plug_in_tv(a_large, b_large, oracle::no_bootstrap()).value;
    }
    mean_small /= trials;
    mean_large /= trials;
    CHECK(mean_small >= 0.0);
    CHECK(mean_large < mean_small);
  }
}

TEST_CASE("estimator consistency smoke: n = 1e5 lands within 0.02 of exact values") {
  oracle::Instance inst = oracle::reference_instance();
  BoundedLoss loss = oracle::reference_loss();
  const double exact_risk = risk(inst.p, loss);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SampleSet s = sample_joint(inst.p, 100000, seed);
    REQUIRE(std::abs(mc_risk(s, loss, 0.99).value - exact_risk) < 0.02);
  }
}
