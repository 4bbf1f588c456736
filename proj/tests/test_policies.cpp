#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "pmd/policies.hpp"
#include "support.hpp"

using namespace pmd;

TEST_CASE("classic step size on frozen points", "[policies]") {
  const ClassicPolyakState st = make_classic(0.0, 1.0);
  CHECK(classic_eta(st, 2.0, 2.0) == 0.5);
  CHECK(classic_eta(st, 0.0, 2.0) == 0.0);   // already at the optimal value
  CHECK(classic_eta(st, -1.0, 1.0) == -1.0);  // below it: the caller must not step
  const ClassicPolyakState half = make_classic(1.0, 2.0);
  CHECK(classic_eta(half, 3.0, 1.0) == 1.0);
}

TEST_CASE("classic constructor and input validation", "[policies]") {
  CHECK_THROWS_AS(make_classic(std::numeric_limits<double>::quiet_NaN()), InvalidInput);
  CHECK_THROWS_AS(make_classic(kInf), InvalidInput);
  CHECK_THROWS_AS(make_classic(0.0, 0.5), InvalidInput);
  CHECK_THROWS_WITH(make_classic(0.0, 0.5),
                    Catch::Matchers::ContainsSubstring("c > 1/2"));
  CHECK_THROWS_AS(classic_eta(make_classic(0.0), 1.0, 0.0), InvalidInput);
}

TEST_CASE("adaptive estimate walks through a two-step trace", "[policies]") {
  AdaptiveEstimateState st = make_adaptive(0.1, 1e-4, 0.5, 1.5, 1.0);
  adaptive_observe(st, 1.0);
  auto [eta1, target1] = adaptive_propose(st, 1.0, 2.0);
  CHECK(target1 == 1.0 - 0.1);
  CHECK(eta1 == (1.0 - target1) / 4.0);
  adaptive_feedback(st, 0.85);  // 0.85 <= 0.9: the level held, delta grows
  CHECK(st.delta_k == 0.1 * 1.5);
  CHECK(st.best_f == 0.85);

  adaptive_observe(st, 0.85);
  auto [eta2, target2] = adaptive_propose(st, 0.85, 1.0);
  CHECK(target2 == 0.85 - 0.1 * 1.5);
  CHECK(eta2 == (0.85 - target2));
  adaptive_feedback(st, 0.8);  // 0.8 > 0.7: missed, delta shrinks
  CHECK(st.delta_k == 0.5 * (0.1 * 1.5));
  CHECK(st.best_f == 0.8);
}

TEST_CASE("adaptive estimate clamps at the floor", "[policies]") {
  AdaptiveEstimateState st = make_adaptive(0.1, 0.09, 0.5, 1.5, 1.0);
  adaptive_observe(st, 1.0);
  (void)adaptive_propose(st, 1.0, 1.0);
  adaptive_feedback(st, 0.99);  // missed the target 0.9
  CHECK(st.delta_k == 0.09);
}

TEST_CASE("adaptive estimate constructor validation", "[policies]") {
  CHECK_THROWS_WITH(make_adaptive(0.1, 0.0, 0.5, 1.5, 1.0),
                    Catch::Matchers::ContainsSubstring("delta_floor > 0"));
  CHECK_THROWS_WITH(make_adaptive(1e-5, 1e-4, 0.5, 1.5, 1.0),
                    Catch::Matchers::ContainsSubstring("delta_1 >= delta_floor"));
  CHECK_THROWS_WITH(make_adaptive(0.1, 1e-4, 1.0, 1.5, 1.0),
                    Catch::Matchers::ContainsSubstring("beta < 1"));
  CHECK_THROWS_WITH(make_adaptive(0.1, 1e-4, 0.5, 0.9, 1.0),
                    Catch::Matchers::ContainsSubstring("gamma >= 1"));
  CHECK_THROWS_WITH(make_adaptive(0.1, 1e-4, 0.5, 1.5, 0.5),
                    Catch::Matchers::ContainsSubstring("c > 1/2"));
  AdaptiveEstimateState st = make_adaptive(0.1, 1e-4, 0.5, 1.5, 1.0);
  CHECK_THROWS_AS(adaptive_feedback(st, 0.5), InvalidInput);  // no proposal pending
  CHECK_THROWS_AS(adaptive_propose(st, 1.0, 0.0), InvalidInput);
}

TEST_CASE("level policy transitions on frozen states", "[policies]") {
  SECTION("improvement ends the group and keeps delta") {
    SubgradientLevelState st;
    st.delta_l = 1.0;
    st.budget = 4.0;
    st.c = 1.0;
    st.level = 5;
    st.group_start_k = 10;
    st.group_record = 2.0;
    st.best_f = 2.0;
    st.sigma = 3.0;
    level_observe(st, 1.4);
    auto [eta, target] = level_propose(st, 1.4, 1.0, 42);
    CHECK(st.level == 6);
    CHECK(st.group_start_k == 42);
    CHECK(st.group_record == 1.4);
    CHECK(st.sigma == 0.0);
    CHECK(st.delta_l == 1.0);
    CHECK(target == 1.4 - 1.0);
    CHECK(eta == (1.4 - target));
  }
  SECTION("budget exhaustion ends the group and halves delta") {
    SubgradientLevelState st;
    st.delta_l = 1.0;
    st.budget = 4.0;
    st.c = 1.0;
    st.group_record = 2.0;
    st.best_f = 2.0;
    st.sigma = 5.0;
    level_observe(st, 1.8);
    auto [eta, target] = level_propose(st, 1.8, 1.0, 7);
    CHECK(st.delta_l == 0.5);
    CHECK(st.sigma == 0.0);
    CHECK(st.group_record == 1.8);
    CHECK(target == 1.8 - 0.5);
    CHECK(eta == (1.8 - target));
  }
  SECTION("no transition inside a group") {
    SubgradientLevelState st;
    st.delta_l = 1.0;
    st.budget = 4.0;
    st.c = 1.0;
    st.group_record = 2.0;
    st.best_f = 2.0;
    st.sigma = 0.0;
    level_observe(st, 2.0);
    auto [eta, target] = level_propose(st, 2.0, 1.0, 3);
    CHECK(st.level == 1);
    CHECK(target == 1.0);
    CHECK(eta == 1.0);
  }
  SECTION("the improvement branch wins when both fire") {
    SubgradientLevelState st;
    st.delta_l = 1.0;
    st.budget = 4.0;
    st.c = 1.0;
    st.group_record = 2.0;
    st.best_f = 2.0;
    st.sigma = 9.0;
    level_observe(st, 1.0);
    (void)level_propose(st, 1.0, 1.0, 9);
    CHECK(st.delta_l == 1.0);  // kept: improvement, not budget
    CHECK(st.sigma == 0.0);
  }
}

TEST_CASE("level policy path-length accumulation", "[policies]") {
  SubgradientLevelState st = make_level(0.1, 20.0, 2.0);
  level_accumulate(st, 0.25, 3.0);
  CHECK(st.sigma == 2.0 * 0.25 * 3.0);
  level_accumulate(st, 0.5, 1.0);
  CHECK(st.sigma == 1.5 + 1.0);
}

TEST_CASE("level constructor validation", "[policies]") {
  CHECK_THROWS_WITH(make_level(0.0, 20.0, 1.0), Catch::Matchers::ContainsSubstring("delta_1 > 0"));
  CHECK_THROWS_WITH(make_level(0.1, 0.0, 1.0), Catch::Matchers::ContainsSubstring("B > 0"));
  CHECK_THROWS_WITH(make_level(0.1, 20.0, 0.5), Catch::Matchers::ContainsSubstring("c > 1/2"));
  SubgradientLevelState st = make_level(0.1, 20.0, 1.0);
  level_observe(st, 1.0);
  CHECK_THROWS_AS(level_propose(st, 1.0, 0.0, 1), InvalidInput);
}

// The polymorphic wrappers must forward without reordering state updates.
TEST_CASE("policy wrappers match the direct calls", "[policies]") {
  PolicyState wrapped = make_adaptive(0.2, 1e-3, 0.4, 1.2, 0.8);
  AdaptiveEstimateState direct = make_adaptive(0.2, 1e-3, 0.4, 1.2, 0.8);
  policy_observe(wrapped, 3.0);
  adaptive_observe(direct, 3.0);
  auto [we, wt] = policy_propose(wrapped, 3.0, 1.5, 1);
  auto [de, dt] = adaptive_propose(direct, 3.0, 1.5);
  CHECK(we == de);
  CHECK(wt == dt);
  policy_feedback(wrapped, 2.5, we, 1.5);
  adaptive_feedback(direct, 2.5);
  const PolicySnapshot snap = policy_snapshot(wrapped);
  REQUIRE(snap.delta.has_value());
  CHECK(*snap.delta == direct.delta_k);
  CHECK_FALSE(snap.sigma.has_value());
  CHECK_FALSE(snap.level.has_value());

  const PolicySnapshot classic_snap = policy_snapshot(PolicyState{make_classic(0.0)});
  CHECK_FALSE(classic_snap.delta.has_value());
  CHECK_FALSE(classic_snap.sigma.has_value());
  CHECK_FALSE(classic_snap.level.has_value());
}

TEST_CASE("adaptive estimate replays against the transcription", "[policies]") {
  auto gen = pmdtest::seeded(31);
  std::uniform_real_distribution<double> f0(0.0, 10.0);
  std::normal_distribution<double> drift(-0.05, 0.3);
  std::uniform_real_distribution<double> gndist(0.1, 5.0);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double delta1 = 0.05 + 0.45 * p(gen);
    const double floor_ = delta1 * 1e-3;
    const double beta = 0.3 + 0.6 * p(gen);
    const double gamma = 1.1 + 0.9 * p(gen);
    const double c = 0.6 + 0.9 * p(gen);
    AdaptiveEstimateState st = make_adaptive(delta1, floor_, beta, gamma, c);
    pmdtest::AdaptiveRef ref(delta1, floor_, beta, gamma, c);
    double f = f0(gen);
    for (int k = 1; k <= 50; ++k) {
      const double gn = gndist(gen);
      adaptive_observe(st, f);
      ref.observe(f);
      auto [eta, target] = adaptive_propose(st, f, gn);
      auto [reta, rtarget] = ref.propose(f, gn);
      REQUIRE(eta == reta);
      REQUIRE(target == rtarget);
      REQUIRE(st.delta_k == ref.delta);
      REQUIRE(st.best_f == ref.best);
      const double f_next = f + drift(gen);
      adaptive_feedback(st, f_next);
      ref.feedback(f_next);
      REQUIRE(st.delta_k == ref.delta);
      REQUIRE(st.delta_k >= floor_);
      f = f_next;
    }
  }
}

TEST_CASE("level policy replays against the transcription", "[policies]") {
  auto gen = pmdtest::seeded(32);
  std::uniform_real_distribution<double> f0(0.0, 10.0);
  std::normal_distribution<double> drift(-0.05, 0.3);
  std::uniform_real_distribution<double> gndist(0.1, 5.0);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double delta1 = 0.05 + 0.45 * p(gen);
    const double budget = 5.0 + 35.0 * p(gen);
    const double c = 0.6 + 0.9 * p(gen);
    SubgradientLevelState st = make_level(delta1, budget, c);
    pmdtest::LevelRef ref(delta1, budget, c);
    double f = f0(gen);
    for (int k = 1; k <= 50; ++k) {
      const double gn = gndist(gen);
      level_observe(st, f);
      ref.observe(f);
      auto [eta, target] = level_propose(st, f, gn, k);
      auto [reta, rtarget] = ref.propose(f, gn, k);
      REQUIRE(eta == reta);
      REQUIRE(target == rtarget);
      REQUIRE(st.delta_l == ref.delta);
      REQUIRE(st.sigma == ref.sigma);
      REQUIRE(st.level == ref.level);
      REQUIRE(st.group_start_k == ref.group_start_k);
      level_accumulate(st, eta, gn);
      ref.accumulate(eta, gn);
      REQUIRE(st.sigma == ref.sigma);
      f = f + drift(gen);
    }
  }
}
