#include <doctest.h>

#include <cmath>
#include <random>

#include "ctab/inference.hpp"
#include "support/checks.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/random_tables.hpp"

using namespace ctab;
using testfix::fig1;
using testsup::code_of;

namespace {

Evidence headline_evidence() {
  Evidence ev;
  ev.soft("e1", {0.3, 0.7});
  ev.soft("e2", {0.2, 0.8});
  return ev;
}

// Eq-style four-term mixture with the exact fitted evidence joint.
double headline_expected_true() {
  const double x = testfix::fig2b_exact_x();
  return 0.8 * x + 0.5 * (0.3 - x) + (5.0 / 7.0) * (0.2 - x) + 0.25 * (0.5 + x);
}

}  // namespace

TEST_CASE("soft-evidence query reproduces the mixture") {
  const auto t = fig1();
  const auto result = posterior(t, headline_evidence(), "c");
  REQUIRE(result.posterior.size() == 2);
  REQUIRE(result.ipf.has_value());
  CHECK(result.ipf->converged);
  CHECK(result.method == QueryMethod::odds_ratio);

  CHECK_NEAR(result.posterior[1], headline_expected_true(), 1e-9);
  CHECK_NEAR(result.posterior[0], 1.0 - headline_expected_true(), 1e-9);
  CHECK_NEAR(result.posterior[1], 0.409775, 1e-6);

  const auto oracle = verify::brute_posterior(t, headline_evidence(), "c");
  CHECK_NEAR(result.posterior[1], oracle[1], 1e-8);
}

TEST_CASE("no evidence returns the prior") {
  const auto result = posterior(fig1(), {}, "c");
  CHECK(result.method == QueryMethod::prior);
  CHECK_FALSE(result.ipf.has_value());
  CHECK_NEAR(result.posterior[0], 0.40, 1e-12);
  CHECK_NEAR(result.posterior[1], 0.60, 1e-12);
}

TEST_CASE("hard evidence matches exact conditioning") {
  const auto t = fig1();
  Evidence ev;
  ev.hard("e1", "true").hard("e2", "true");
  const auto result = posterior(t, ev, "c");
  CHECK(result.method == QueryMethod::hard_only);
  CHECK_NEAR(result.posterior[1], 0.25, 1e-12);
  CHECK_NEAR(result.posterior[0], 0.75, 1e-12);

  // identical to the ratio computed on the raw cells
  const double joint_true = t.at({{"e1", "true"}, {"e2", "true"}, {"c", "true"}});
  const double joint_any = joint_true + t.at({{"e1", "true"}, {"e2", "true"}, {"c", "false"}});
  CHECK_NEAR(result.posterior[1], joint_true / joint_any, 1e-12);
}

TEST_CASE("soft targets equal to the table marginals collapse to the prior") {
  const auto t = fig1();
  Evidence ev;
  ev.soft("e1", marginal_dist(t, "e1"));
  ev.soft("e2", marginal_dist(t, "e2"));
  const auto result = posterior(t, ev, "c");
  const auto prior = posterior(t, {}, "c");
  CHECK_NEAR(result.posterior[0], prior.posterior[0], 1e-10);
  CHECK_NEAR(result.posterior[1], prior.posterior[1], 1e-10);
}

TEST_CASE("independence baseline") {
  const auto t = fig1();
  SUBCASE("product weights reproduce the worked value") {
    Evidence ev;
    ev.soft("e1", {0.2, 0.8}).soft("e2", {0.1, 0.9});
    const auto result = posterior_independent(t, ev, "c");
    CHECK(result.method == QueryMethod::independence);
    CHECK_FALSE(result.ipf.has_value());
    const double expected =
        0.25 * 0.72 + (5.0 / 7.0) * 0.08 + 0.5 * 0.18 + 0.8 * 0.02;
    CHECK_NEAR(result.posterior[1], expected, 1e-12);
    CHECK_NEAR(result.posterior[1], 0.34314, 5e-6);
  }
  SUBCASE("disagrees with the fitted posterior when evidence is associated") {
    const auto fitted = posterior(t, headline_evidence(), "c");
    const auto product = posterior_independent(t, headline_evidence(), "c");
    CHECK(std::abs(fitted.posterior[1] - product.posterior[1]) > 1e-3);
  }
  SUBCASE("agrees when the evidence subtable is an outer product") {
    std::vector<double> cells;
    const double pe1[] = {0.4, 0.6};
    const double pe2[] = {0.3, 0.7};
    const double pc_true[] = {0.2, 0.5, 0.7, 0.9};
    for (std::size_t i = 0; i < 2; ++i) {
      for (std::size_t j = 0; j < 2; ++j) {
        const double joint = pe1[i] * pe2[j];
        cells.push_back(joint * (1.0 - pc_true[i * 2 + j]));
        cells.push_back(joint * pc_true[i * 2 + j]);
      }
    }
    const JointTable ind({{"e1", {"f", "t"}}, {"e2", {"f", "t"}}, {"c", {"f", "t"}}},
                         cells);
    Evidence ev;
    ev.soft("e1", {0.3, 0.7}).soft("e2", {0.2, 0.8});
    const auto fitted = posterior(ind, ev, "c");
    const auto product = posterior_independent(ind, ev, "c");
    CHECK_NEAR(fitted.posterior[1], product.posterior[1], 1e-8);
  }
}

TEST_CASE("evidence subtable extraction") {
  const auto t = fig1();
  SUBCASE("soft on both evidence variables gives the figure subtable") {
    const auto sub = evidence_subtable(t, headline_evidence());
    REQUIRE(sub.cell_count() == 4);
    const std::vector<double> expected = {0.25, 0.20, 0.35, 0.20};
    for (std::size_t i = 0; i < 4; ++i) CHECK_NEAR(sub.cells()[i], expected[i], 1e-12);
  }
  SUBCASE("hard on e2, soft on e1") {
    Evidence ev;
    ev.hard("e2", "true").soft("e1", {0.4, 0.6});
    const auto sub = evidence_subtable(t, ev);
    REQUIRE(sub.rank() == 1);
    CHECK(sub.variables()[0].name == "e1");
    CHECK_NEAR(sub.cells()[0], 0.5, 1e-12);
    CHECK_NEAR(sub.cells()[1], 0.5, 1e-12);
  }
  SUBCASE("no soft evidence") {
    Evidence ev;
    ev.hard("e1", "true");
    CHECK(code_of([&] { evidence_subtable(t, ev); }) == errc::no_soft_evidence);
  }
}

TEST_CASE("degenerate soft evidence is exact hard evidence") {
  const auto t = fig1();
  Evidence hard_ev;
  hard_ev.hard("e1", "true");
  Evidence soft_ev;
  soft_ev.soft("e1", {0.0, 1.0});
  const auto a = posterior(t, hard_ev, "c");
  const auto b = posterior(t, soft_ev, "c");
  CHECK(b.method == QueryMethod::hard_only);
  CHECK(a.posterior == b.posterior);

  // degenerate soft on a zero-probability state behaves like hard evidence
  const JointTable z({{"e1", {"f", "t"}}, {"c", {"f", "t"}}}, {0.5, 0.5, 0.0, 0.0});
  Evidence impossible;
  impossible.soft("e1", {0.0, 1.0});
  CHECK(code_of([&] { posterior(z, impossible, "c"); }) ==
        errc::zero_probability_evidence);
}

TEST_CASE("evidence validation") {
  const auto t = fig1();
  SUBCASE("target may not carry evidence") {
    Evidence ev;
    ev.hard("c", "true");
    CHECK(code_of([&] { posterior(t, ev, "c"); }) == errc::target_in_evidence);
  }
  SUBCASE("unknown target") {
    CHECK(code_of([&] { posterior(t, {}, "zz"); }) == errc::unknown_variable);
  }
  SUBCASE("unknown state in hard evidence") {
    Evidence ev;
    ev.hard("e1", "zz");
    CHECK(code_of([&] { posterior(t, ev, "c"); }) == errc::unknown_state);
  }
  SUBCASE("soft distribution must be a distribution") {
    Evidence ev;
    ev.soft("e1", {0.5, 0.6});
    CHECK(code_of([&] { posterior(t, ev, "c"); }) == errc::invalid_targets);
  }
  SUBCASE("evidence on the conclusion dimension is allowed when querying evidence") {
    Evidence ev;
    ev.soft("c", {0.3, 0.7});
    const auto result = posterior(t, ev, "e1");
    CHECK(result.method == QueryMethod::odds_ratio);
    double sum = result.posterior[0] + result.posterior[1];
    CHECK_NEAR(sum, 1.0, 1e-9);
  }
}

TEST_CASE("query symmetry: evidence and conclusion are not schema roles") {
  const auto t = fig1();
  Evidence on_e1;
  on_e1.soft("e1", {0.3, 0.7});
  const auto q1 = posterior(t, on_e1, "e2");

  Evidence on_e2;
  on_e2.soft("e2", marginal_dist(t, "e2"));
  const auto q2 = posterior(t, on_e2, "e1");

  // both directions run the same pipeline and return valid posteriors
  CHECK(q1.method == QueryMethod::odds_ratio);
  CHECK(q2.method == QueryMethod::odds_ratio);
  CHECK_NEAR(q1.posterior[0] + q1.posterior[1], 1.0, 1e-9);
  // a fixed-point target on e2 leaves the e1 prior untouched
  CHECK_NEAR(q2.posterior[0], 0.45, 1e-10);
}

TEST_CASE("non-convergence propagates through the query") {
  const auto t = fig1();
  const auto result = posterior(t, headline_evidence(), "c", {1e-10, 1});
  REQUIRE(result.ipf.has_value());
  CHECK_FALSE(result.ipf->converged);
  CHECK(result.ipf->cycles_used == 1);
  CHECK_NEAR(result.posterior[0] + result.posterior[1], 1.0, 1e-9);
}

TEST_CASE("zero-probability evidence configurations contribute nothing") {
  // (e1=t, e2=t) is impossible in this table; marginals stay positive.
  const JointTable t({{"e1", {"f", "t"}}, {"e2", {"f", "t"}}, {"c", {"f", "t"}}},
                     {0.15, 0.15, 0.20, 0.20, 0.15, 0.15, 0.0, 0.0});
  Evidence ev;
  ev.soft("e1", {0.6, 0.4}).soft("e2", {0.7, 0.3});
  const auto result = posterior(t, ev, "c");
  REQUIRE(result.ipf.has_value());
  CHECK(result.ipf->converged);
  CHECK_NEAR(result.posterior[0] + result.posterior[1], 1.0, 1e-9);

  // the independence product insists on weight for the impossible cell
  CHECK(code_of([&] { posterior_independent(t, ev, "c"); }) ==
        errc::target_unreachable);
}

TEST_CASE("posteriors are valid distributions across evidence regimes") {
  std::mt19937_64 rng(51);
  for (int rep = 0; rep < 30; ++rep) {
    const auto t = testgen::random_table(rng, {2, 3, 2});
    Evidence ev;
    ev.hard("v0", "s1");
    ev.soft("v1", testgen::random_dist(rng, 3));
    const auto result = posterior(t, ev, "v2");
    double sum = 0.0;
    for (double p : result.posterior) {
      CHECK(p >= 0.0);
      CHECK(p <= 1.0 + 1e-12);
      sum += p;
    }
    CHECK_NEAR(sum, 1.0, 1e-9);
  }
}
