#include <doctest.h>

#include <cmath>

#include "blindspot/measure.hpp"
#include "blindspot/risk.hpp"
#include "blindspot/rng.hpp"
#include "oracles.hpp"

using namespace blindspot;
using oracle::dist;
using oracle::kernel;

TEST_CASE("make_distribution validates and normalizes") {
  Distribution d = make_distribution({"a", "b"}, {0.5, 0.5}, NormalizationPolicy::strict);
  CHECK(d.weight_of("a") == 0.5);
  CHECK(d.weight_of("b") == 0.5);

  Distribution r = make_distribution({"a", "b"}, {2.0, 2.0}, NormalizationPolicy::renormalize);
  CHECK(r.weight_of("a") == 0.5);
  CHECK(r.weight_of("b") == 0.5);

  CHECK_THROWS_AS(make_distribution({"a"}, {0.0}, NormalizationPolicy::strict), ValidationError);
  CHECK_THROWS_AS(make_distribution({"a", "b"}, {-0.1, 1.1}, NormalizationPolicy::strict),
                  ValidationError);
  CHECK_THROWS_AS(make_distribution({"a", "a"}, {0.5, 0.5}, NormalizationPolicy::strict),
                  ValidationError);
  CHECK_THROWS_AS(make_distribution({"a", "b"}, {0.6, 0.6}, NormalizationPolicy::strict),
                  ValidationError);
  CHECK_THROWS_AS(make_distribution({"a"}, {std::nan("")}, NormalizationPolicy::strict),
                  ValidationError);
  CHECK_THROWS_AS(make_distribution({""}, {1.0}, NormalizationPolicy::strict), ValidationError);
  CHECK_THROWS_AS(make_distribution({"a", "b"}, {1.0}, NormalizationPolicy::strict),
                  ValidationError);
  // Deviation inside the tolerance is accepted.
  CHECK_NOTHROW(make_distribution({"a"}, {1.0 + 9e-10}, NormalizationPolicy::strict));
}

TEST_CASE("joint multiplies marginal and kernel rows") {
  SUBCASE("point-mass marginal") {
    JointLaw j = joint(dist({"x1"}, {1.0}), kernel({"y1", "y2"}, {{"x1", {0.9, 0.1}}}),
                       Regime::on_policy);
    CHECK(j.mass("x1", "y1") == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(j.mass("x1", "y2") == doctest::Approx(0.1).epsilon(1e-15));
  }

  SUBCASE("total mass is 1") {
    oracle::Instance inst = oracle::reference_instance();
    double total = 0.0;
    for (const auto& [cell, mass] : oracle::enumerate_joint(inst.p)) total += mass;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("product arithmetic matches the enumeration oracle") {
    oracle::Instance inst = oracle::reference_instance();
    oracle::FlatJoint flat = oracle::enumerate_joint(inst.p);
    CHECK(flat.at({"x2", "y2"}) == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(inst.p.mass("x2", "y2") == doctest::Approx(0.4).epsilon(1e-15));
    for (const auto& [cell, mass] : flat)
      CHECK(inst.p.mass(cell.first, cell.second) == doctest::Approx(mass).epsilon(1e-15));
  }

  SUBCASE("missing kernel row is an error") {
    CHECK_THROWS_AS(joint(dist({"x1", "x2"}, {0.5, 0.5}),
                          kernel({"y1"}, {{"x1", {1.0}}}), Regime::on_policy),
                    ValidationError);
  }
}

TEST_CASE("marginal_prompt returns the constructed marginal exactly") {
  oracle::Instance inst = oracle::reference_instance();
  Distribution m = marginal_prompt(inst.p);
  CHECK(m == inst.rho);

  JointLaw pm = joint(dist({"x1"}, {1.0}), kernel({"y1", "y2"}, {{"x1", {0.3, 0.7}}}),
                      Regime::on_policy);
  CHECK(marginal_prompt(pm).weight_of("x1") == 1.0);

  // Summing joint masses per prompt recovers the same vector.
  oracle::FlatJoint flat = oracle::enumerate_joint(inst.p);
  for (std::size_t i = 0; i < inst.rho.size(); ++i) {
    const Label& x = inst.rho.support()[i];
    double row_mass = 0.0;
    for (const auto& [cell, mass] : flat)
      if (cell.first == x) row_mass += mass;
    CHECK(row_mass == doctest::Approx(inst.rho.weights()[i]).epsilon(1e-12));
  }
}

TEST_CASE("tv_distributions is the half-L1 distance") {
  Distribution u = dist({"y1", "y2"}, {0.5, 0.5});
  CHECK(tv_distributions(u, u) == 0.0);

  CHECK(tv_distributions(dist({"y1"}, {1.0}), dist({"y2"}, {1.0})) == 1.0);

  Distribution p = dist({"y1", "y2"}, {0.9, 0.1});
  Distribution q = dist({"y1", "y2"}, {0.5, 0.5});
  CHECK(oracle::tv_vectors(p, q) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(tv_distributions(p, q) == doctest::Approx(0.4).epsilon(1e-15));

  // Mismatched supports read as implicit zeros over the union.
  Distribution wide = dist({"y1", "y2", "y3"}, {0.5, 0.25, 0.25});
  CHECK(tv_distributions(p, wide) == doctest::Approx(oracle::tv_vectors(p, wide)).epsilon(1e-15));
  CHECK(tv_distributions(p, wide) == tv_distributions(wide, p));
}

TEST_CASE("tv_joint agrees with both oracle routes") {
  oracle::Instance inst = oracle::reference_instance();

  SUBCASE("identical joints") { CHECK(tv_joint(inst.p, inst.p) == 0.0); }

  SUBCASE("reference instance is 0.4 by both routes") {
    const double flat = oracle::tv_flat(oracle::enumerate_joint(inst.p),
                                        oracle::enumerate_joint(inst.q));
    const double conditional = oracle::expected_conditional_tv(inst.p, inst.q);
    CHECK(flat == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(conditional == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(tv_joint(inst.p, inst.q) == doctest::Approx(0.4).epsilon(1e-15));
  }

  SUBCASE("point-mass marginal reduces to row TV") {
    Distribution rho = dist({"x1"}, {1.0});
    Kernel a = kernel({"y1", "y2"}, {{"x1", {0.9, 0.1}}});
    Kernel b = kernel({"y1", "y2"}, {{"x1", {0.5, 0.5}}});
    JointLaw p = joint(rho, a, Regime::on_policy);
    JointLaw q = joint(rho, b, Regime::off_policy);
    CHECK(tv_joint(p, q) == doctest::Approx(tv_distributions(a.row("x1"), b.row("x1")))
                                .epsilon(1e-15));
  }

  SUBCASE("alphabet mismatch is an error") {
    JointLaw other = joint(dist({"x1"}, {1.0}), kernel({"z1"}, {{"x1", {1.0}}}),
                           Regime::off_policy);
    JointLaw p1 = joint(dist({"x1"}, {1.0}), kernel({"y1"}, {{"x1", {1.0}}}),
                        Regime::on_policy);
    CHECK_THROWS_AS(tv_joint(p1, other), ValidationError);

    JointLaw q2 = joint(dist({"x9"}, {1.0}), kernel({"y1"}, {{"x9", {1.0}}}),
                        Regime::off_policy);
    CHECK_THROWS_AS(tv_joint(p1, q2), ValidationError);
  }
}

TEST_CASE("tv metric axioms hold on random instances") {
  SplitMix64 rng(20260811);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t ny = 1 + rng.next_index(8);
    std::vector<Label> ys;
    for (std::size_t i = 0; i < ny; ++i) ys.push_back("y" + std::to_string(i));
    auto draw = [&] {
      return Distribution::make(ys, oracle::random_simplex(rng, ny),
                                NormalizationPolicy::renormalize);
    };
    Distribution a = draw(), b = draw(), c = draw();

    const double ab = tv_distributions(a, b);
    const double ba = tv_distributions(b, a);
    const double ac = tv_distributions(a, c);
    const double cb = tv_distributions(c, b);

    REQUIRE(ab == ba);  // symmetry is exact
    REQUIRE(ab >= 0.0);
    REQUIRE(ab <= 1.0);
    REQUIRE(ab <= ac + cb + 1e-12);  // triangle inequality
    REQUIRE(tv_distributions(a, a) == 0.0);
  }

  // Identity of indiscernibles, both directions at the 1e-12 scale: equal
  // weights give TV = 0 exactly, and TV <= 5e-13 forces every weight pair
  // within 1e-12 (max cell gap <= 2 TV).
  for (int trial = 0; trial < 200; ++trial) {
    oracle::Instance inst = oracle::random_instance(rng);
    const Distribution& row = inst.p.kernel().row(inst.p.prompt_support()[0]);
    Distribution copy = Distribution::make(row.support(), row.weights(),
                                           NormalizationPolicy::strict);
    REQUIRE(tv_distributions(row, copy) == 0.0);

    if (row.size() < 2) continue;
    std::vector<double> nudged = row.weights();
    nudged[0] += 4e-13;
    nudged[1] -= std::min(nudged[1], 4e-13);
    Distribution near = Distribution::make(row.support(), nudged,
                                           NormalizationPolicy::renormalize);
    const double tv = tv_distributions(row, near);
    REQUIRE(tv <= 5e-13);
    for (std::size_t i = 0; i < row.size(); ++i)
      REQUIRE(std::abs(row.weights()[i] - near.weight_of(row.support()[i])) <= 1e-12);
  }
}

TEST_CASE("conditional decomposition equals flat TV on equal-marginal instances") {
  SplitMix64 rng(7151);
  for (int trial = 0; trial < 1000; ++trial) {
    oracle::Instance inst = oracle::random_instance(rng);
    const double flat = tv_joint(inst.p, inst.q);
    const double conditional = oracle::expected_conditional_tv(inst.p, inst.q);
    REQUIRE(std::abs(flat - conditional) <= 1e-12);
  }
}

TEST_CASE("variational characterization: |E_P f - E_Q f| <= 2 TV with a tight sign witness") {
  SplitMix64 rng(40903);
  for (int trial = 0; trial < 1000; ++trial) {
    oracle::Instance inst = oracle::random_instance(rng);
    const double tv = tv_joint(inst.p, inst.q);
    BoundedLoss f = oracle::random_loss(rng, inst.p, -1.0, 1.0);
    const double gap = tv_variational_gap(inst.p, inst.q, f);
    REQUIRE(std::abs(gap) <= 2.0 * tv + 1e-12);
  }

  for (int trial = 0; trial < 100; ++trial) {
    oracle::Instance inst = oracle::random_instance(rng);
    const double tv = tv_joint(inst.p, inst.q);
    BoundedLoss sign = witness_loss(inst.p, inst.q, 1.0, LossClass::signed_sup_norm);
    REQUIRE(std::abs(tv_variational_gap(inst.p, inst.q, sign) - 2.0 * tv) <= 1e-12);
  }
}

TEST_CASE("tv_variational_gap examples") {
  oracle::Instance inst = oracle::reference_instance();
  const std::vector<Label> xs = {"x1", "x2"};
  const std::vector<Label> ys = {"y1", "y2"};

  BoundedLoss one = BoundedLoss::make(xs, ys, {1.0, 1.0, 1.0, 1.0}, -1.0, 1.0);
  CHECK(tv_variational_gap(inst.p, inst.q, one) == doctest::Approx(0.0).epsilon(1e-15));

  BoundedLoss zero = BoundedLoss::make(xs, ys, {0.0, 0.0, 0.0, 0.0}, -1.0, 1.0);
  CHECK(tv_variational_gap(inst.p, inst.q, zero) == 0.0);

  BoundedLoss sign = witness_loss(inst.p, inst.q, 1.0, LossClass::signed_sup_norm);
  CHECK(tv_variational_gap(inst.p, inst.q, sign) ==
        doctest::Approx(2.0 * tv_joint(inst.p, inst.q)).epsilon(1e-12));

  BoundedLoss big = BoundedLoss::make(xs, ys, {2.0, 0.0, 0.0, 0.0}, -2.0, 2.0);
  CHECK_THROWS_AS(tv_variational_gap(inst.p, inst.q, big), ValidationError);
}
