#include <doctest.h>

#include <cmath>

#include "blindspot/estimation.hpp"
#include "blindspot/rng.hpp"
#include "blindspot/scenario.hpp"
#include "oracles.hpp"

using namespace blindspot;
using oracle::dist;

namespace {

ScenarioConfig small_config(double clarify, double answer, double refuse, double alt) {
  ScenarioConfig cfg;
  cfg.prompt_count = 2;
  cfg.ambiguous_modes[BehaviorMode::clarify] = clarify;
  cfg.ambiguous_modes[BehaviorMode::direct_answer] = answer;
  cfg.ambiguous_modes[BehaviorMode::refuse] = refuse;
  cfg.ambiguous_modes[BehaviorMode::constrained_alternative] = alt;
  cfg.unambiguous_modes = cfg.ambiguous_modes;
  cfg.ambiguity_flags = {{"a1", true}, {"u1", false}};
  cfg.seed = 0;
  return cfg;
}

}  // namespace

TEST_CASE("interpretive_policy reproduces configured mode masses exactly") {
  ScenarioConfig cfg = small_config(0.3, 0.5, 0.1, 0.1);
  Kernel k = interpretive_policy(cfg);
  CHECK(k.row("a1").weight_of(label_for(BehaviorMode::clarify)) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(k.row("a1").weight_of(label_for(BehaviorMode::direct_answer)) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(k.row("a1").weight_of(label_for(BehaviorMode::refuse)) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(k.row("a1").weight_of(label_for(BehaviorMode::constrained_alternative)) == doctest::Approx(0.1).epsilon(1e-15));

  SUBCASE("deterministic clarification") {
    ScenarioConfig det = small_config(1.0, 0.0, 0.0, 0.0);
    Kernel dk = interpretive_policy(det);
    CHECK(dk.row("a1").weight_of("clarify") == 1.0);
    CHECK(dk.row("u1").weight_of("clarify") == 1.0);
  }

  SUBCASE("rollouts reproduce the mode frequencies") {
    Distribution rho = dist({"a1", "u1"}, {0.5, 0.5});
    JointLaw j = joint(rho, k, Regime::on_policy);
    SampleSet s = sample_joint(j, 100000, 17);
    Kernel empirical = empirical_kernel(s, {"a1", "u1"}, k.alphabet());
    for (const Label x : {"a1", "u1"})
      REQUIRE(tv_distributions(empirical.row(x), k.row(x)) <= 0.01);
  }

  SUBCASE("invalid probabilities are rejected") {
    ScenarioConfig bad = small_config(0.5, 0.5, 0.5, 0.5);
    CHECK_THROWS_AS(interpretive_policy(bad), ValidationError);
    ScenarioConfig negative = small_config(-0.1, 0.6, 0.3, 0.2);
    CHECK_THROWS_AS(interpretive_policy(negative), ValidationError);
  }
}

TEST_CASE("corpus_kernel_variant scales and renormalizes mode mass") {
  ScenarioConfig cfg = small_config(0.3, 0.5, 0.1, 0.1);
  Kernel k = interpretive_policy(cfg);

  SUBCASE("zero suppression leaves the kernel unchanged") {
    Suppression none{};
    CHECK(corpus_kernel_variant(k, none) == k);
  }

  SUBCASE("full clarify suppression renormalizes the remaining modes") {
    Suppression s{};
    s[static_cast<std::size_t>(BehaviorMode::clarify)] = 1.0;
    Kernel v = corpus_kernel_variant(k, s);
    CHECK(v.row("a1").weight_of("clarify") == 0.0);
    CHECK(v.row("a1").weight_of("direct_answer") == doctest::Approx(0.5 / 0.7).epsilon(1e-12));
    CHECK(v.row("a1").weight_of("refuse") == doctest::Approx(0.1 / 0.7).epsilon(1e-12));
    CHECK(v.row("a1").weight_of("constrained_alternative") ==
          doctest::Approx(0.1 / 0.7).epsilon(1e-12));
  }

  SUBCASE("suppressing a zero-mass mode changes nothing") {
    ScenarioConfig no_refuse = small_config(0.4, 0.6, 0.0, 0.0);
    Kernel base = interpretive_policy(no_refuse);
    Suppression s{};
    s[static_cast<std::size_t>(BehaviorMode::refuse)] = 1.0;
    CHECK(corpus_kernel_variant(base, s) == base);
  }

  SUBCASE("suppressing everything a row contains is an error") {
    Suppression all{};
    all.fill(1.0);
    CHECK_THROWS_AS(corpus_kernel_variant(k, all), ValidationError);
  }

  SUBCASE("factors outside [0, 1] are rejected") {
    Suppression bad{};
    bad[0] = 1.5;
    CHECK_THROWS_AS(corpus_kernel_variant(k, bad), ValidationError);
  }
}

TEST_CASE("blind_spot_demo") {
  SUBCASE("zero suppression gives zero gap") {
    DemoReport demo =
        blind_spot_demo(default_demo_config(0), default_demo_suppression(0.0), default_demo_loss());
    CHECK(demo.report.gap == 0.0);
    CHECK(demo.report.tv == 0.0);
    CHECK_FALSE(demo.headline_met);
  }

  SUBCASE("full clarify suppression: gap equals the clarify mass the loss watches") {
    // Closed form by enumeration: with clarify suppressed from the corpus and
    // every non-clarify response on ambiguous prompts penalized, the gap is
    // l_max times the on-policy joint clarify mass on ambiguous prompts.
    ScenarioConfig cfg = small_config(0.3, 0.5, 0.1, 0.1);
    Suppression sup{};
    sup[static_cast<std::size_t>(BehaviorMode::clarify)] = 1.0;
    DemoLossSpec spec;
    spec.penalized_modes = {BehaviorMode::direct_answer, BehaviorMode::refuse,
                            BehaviorMode::constrained_alternative};
    spec.ambiguous_only = true;
    spec.l_max = 2.0;

    const double rho_per_prompt = 1.0 / 2.0;  // uniform over 2 prompts, 1 ambiguous
    const double clarify_mass_ambiguous = rho_per_prompt * 0.3;
    const double expected_gap = spec.l_max * clarify_mass_ambiguous;

    DemoReport demo = blind_spot_demo(cfg, sup, spec);
    CHECK(demo.report.gap == doctest::Approx(expected_gap).epsilon(1e-12));
    CHECK(demo.report.r_disc > demo.report.r_gen);  // corpus overstates the penalized mass here
    CHECK(demo.report.bound_satisfied);
  }

  SUBCASE("the shipped default meets its headline") {
    DemoReport demo =
        blind_spot_demo(default_demo_config(7), default_demo_suppression(1.0), default_demo_loss());
    CHECK(demo.report.r_gen - demo.report.r_disc >= 0.25 * demo.loss_spec.l_max);
    CHECK(demo.report.r_disc <= 0.1 * demo.loss_spec.l_max);
    CHECK(demo.headline_met);
    CHECK(demo.off_policy_risk_low);
    CHECK(demo.report.bound_satisfied);
    // Exact values for the shipped configuration, by hand enumeration:
    // r_gen = 0.5 * 0.6, r_disc = 0.
    CHECK(demo.report.r_gen == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(demo.report.r_disc == 0.0);
  }

  SUBCASE("suppression monotonicity: more suppression never shrinks the gap") {
    double previous = -1.0;
    for (int step = 0; step <= 10; ++step) {
      const double factor = step / 10.0;
      DemoReport demo = blind_spot_demo(default_demo_config(0),
                                        default_demo_suppression(factor), default_demo_loss());
      REQUIRE(demo.report.gap >= previous - 1e-12);
      previous = demo.report.gap;
    }
  }

  SUBCASE("demo soundness: random configs always satisfy the bound") {
    SplitMix64 rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
      ScenarioConfig cfg;
      cfg.prompt_count = 1 + rng.next_index(4);
      auto simplex = [&](ModeProbabilities& probs) {
        std::vector<double> w = oracle::random_simplex(rng, kBehaviorModeCount);
        for (std::size_t m = 0; m < kBehaviorModeCount; ++m) probs.probs[m] = w[m];
      };
      simplex(cfg.ambiguous_modes);
      simplex(cfg.unambiguous_modes);
      for (std::size_t i = 0; i < cfg.prompt_count; ++i)
        cfg.ambiguity_flags["p" + std::to_string(i)] = rng.next_index(2) == 0;

      Suppression sup{};
      // Keep at least one mode unsuppressed so rows keep mass.
      for (std::size_t m = 1; m < kBehaviorModeCount; ++m) sup[m] = rng.next_double();
      DemoLossSpec spec;
      spec.penalized_modes = {static_cast<BehaviorMode>(rng.next_index(kBehaviorModeCount))};
      spec.ambiguous_only = rng.next_index(2) == 0;
      spec.l_max = 0.5 + rng.next_double();

      DemoReport demo = blind_spot_demo(cfg, sup, spec);
      REQUIRE(demo.report.gap <= demo.report.bound + 1e-12);
    }
  }
}

TEST_CASE("multiturn_rollout") {
  Distribution rho0 = dist({"q0"}, {1.0});
  Kernel k = oracle::kernel(
      {"clarify", "answer"},
      {{"q0", {0.5, 0.5}}, {"q_followup", {0.0, 1.0}}, {"q_plain", {0.2, 0.8}}});
  ContextMap ctx = {{{"q0", "clarify"}, "q_followup"},
                    {{"q0", "answer"}, "q_plain"}};

  SUBCASE("turns = 1 coincides with sample_joint") {
    JointLaw j = joint(dist({"q0"}, {1.0}), oracle::kernel({"clarify", "answer"}, {{"q0", {0.5, 0.5}}}),
                       Regime::on_policy);
    SampleSet direct = sample_joint(j, 200, 55);
    std::vector<Trajectory> rolled = multiturn_rollout(rho0, j.kernel(), 1, {}, 200, 55);
    REQUIRE(rolled.size() == 200);
    for (std::size_t i = 0; i < rolled.size(); ++i) {
      REQUIRE(rolled[i].size() == 1);
      CHECK(rolled[i][0].prompt == direct.records[i].first);
      CHECK(rolled[i][0].response == direct.records[i].second);
    }
  }

  SUBCASE("identical seeds give identical trajectories") {
    auto a = multiturn_rollout(rho0, k, 2, ctx, 100, 9);
    auto b = multiturn_rollout(rho0, k, 2, ctx, 100, 9);
    CHECK(a == b);
  }

  SUBCASE("absorbing context is stationary") {
    ContextMap absorbing = {{{"q0", "clarify"}, "q0"}, {{"q0", "answer"}, "q0"}};
    auto trajectories = multiturn_rollout(rho0, k, 3, absorbing, 5000, 13);
    for (std::size_t turn = 0; turn < 3; ++turn) {
      SampleSet s = turn_samples(trajectories, turn, Regime::on_policy, 13);
      Kernel empirical = empirical_kernel(s, {"q0"}, k.alphabet());
      REQUIRE(tv_distributions(empirical.row("q0"), k.row("q0")) <= 0.03);
    }
  }

  SUBCASE("missing transition is an error") {
    ContextMap partial = {{{"q0", "clarify"}, "q_followup"}};
    CHECK_THROWS_AS(multiturn_rollout(rho0, k, 2, partial, 2000, 3), ValidationError);
  }

  SUBCASE("clarify at turn 1 shifts the turn-2 prompt marginal by a computable TV") {
    // Exact chain enumeration: under k, turn-2 prompts are q_followup with
    // probability 0.5 and q_plain with 0.5; under the corpus variant that
    // rarely clarifies, 0.1 and 0.9. TV between the marginals is 0.4.
    Kernel corpus = oracle::kernel(
        {"clarify", "answer"},
        {{"q0", {0.1, 0.9}}, {"q_followup", {0.0, 1.0}}, {"q_plain", {0.2, 0.8}}});
    const double exact_tv = 0.5 * (std::abs(0.5 - 0.1) + std::abs(0.5 - 0.9));
    REQUIRE(exact_tv == doctest::Approx(0.4).epsilon(1e-15));

    const std::size_t n = 20000;
    auto on_policy = multiturn_rollout(rho0, k, 2, ctx, n, 101);
    auto off_policy = multiturn_rollout(rho0, corpus, 2, ctx, n, 102);

    auto turn2_marginal = [n](const std::vector<Trajectory>& trajectories) {
      double followup = 0.0;
      for (const Trajectory& t : trajectories)
        if (t[1].prompt == "q_followup") followup += 1.0;
      return followup / static_cast<double>(n);
    };
    const double p_followup = turn2_marginal(on_policy);
    const double q_followup = turn2_marginal(off_policy);
    const double empirical_tv =
        0.5 * (std::abs(p_followup - q_followup) +
               std::abs((1.0 - p_followup) - (1.0 - q_followup)));
    CHECK(std::abs(empirical_tv - exact_tv) <= 0.02);
  }
}
