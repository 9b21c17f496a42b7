// Copyright 2026 The hpbvi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <map>
#include <random>

#include "hpbvi/benchgen.hpp"
#include "hpbvi/subgame.hpp"
#include "test_util.hpp"

namespace hpbvi {
namespace {

using testing::Joint;
using testing::Make;
using testing::RandomBeta;
using testing::RandomOccupancy;
using testing::RandomRule;
using testing::RewardBeta;
using testing::Tiger;

TEST(Subgame, TigerStageZeroListens) {
  auto m = Tiger(2, 1);
  auto s = initial_occupancy(m);
  const BetaTable beta = RewardBeta(m, s);
  for (const auto& sol : {solve_enum(m, s, beta), solve_hierarchical(m, s, beta)}) {
    EXPECT_DOUBLE_EQ(sol.value, -2.0);
    EXPECT_EQ(joint_action(m, s.histories(), sol.rule, kRootHistory), Joint(m, {0, 0}));
  }
}

TEST(Subgame, SingletonSupportIsJointArgmax) {
  auto m = Make(Family::kRecycling, 3);
  auto s0 = initial_occupancy(m);
  std::mt19937_64 rng(5);
  OccupancyState s(0, {{s0.entries()[0].state, kRootHistory, 1.0}}, s0.shared_histories());
  const BetaTable beta = RandomBeta(m, s, rng);
  double best = beta.at(0, 0);
  for (JointAction u = 1; u < m.actions().size(); ++u) best = std::max(best, beta.at(0, u));
  EXPECT_NEAR(solve_enum(m, s, beta).value, best, 1e-12);
  EXPECT_NEAR(solve_hierarchical(m, s, beta).value, best, 1e-12);
}

TEST(Subgame, BottomOnlyBetaGivesConstantRule) {
  auto m = Tiger(2, 3);
  std::mt19937_64 rng(9);
  auto s = RandomOccupancy(m, 2, rng, 20, false);
  BetaTable beta;
  beta.num_actions = m.actions().size();
  for (std::size_t k = 0; k < s.size(); ++k)
    for (JointAction u = 0; u < beta.num_actions; ++u)
      beta.values.push_back(m.actions().component(u, 0) == 1 ? 3.0 : 0.0);
  for (const auto& sol : {solve_enum(m, s, beta), solve_hierarchical(m, s, beta)}) {
    EXPECT_NEAR(sol.value, 3.0, 1e-12);
    for (const auto& [h, u] : sol.rule[0].actions) EXPECT_EQ(u, 1);
  }
}

TEST(Subgame, EnumGuard) {
  auto m = Tiger(2, 4);
  std::mt19937_64 rng(1);
  auto s = RandomOccupancy(m, 3, rng, 64, false);
  EnumOptions tight;
  tight.max_candidates = 2;
  EXPECT_THROW(solve_enum(m, s, RandomBeta(m, s, rng), tight), GuardError);
}

TEST(Subgame, EnumDeadline) {
  auto m = Tiger(4, 4);
  std::mt19937_64 rng(2);
  auto s = initial_occupancy(m);
  for (int t = 0; t < 3; ++t) s = next_occupancy(m, s, constant_rule(m, s, 0), 0).first;
  ASSERT_GT(enum_candidates(m, s), 1e6);
  EnumOptions opt;
  opt.max_candidates = 0;
  opt.deadline = Clock::now();
  EXPECT_THROW(solve_enum(m, s, RandomBeta(m, s, rng), opt), DeadlineExceeded);
}

// Backward induction against enumeration, with and without B1 sharing.
TEST(Subgame, HierarchicalMatchesEnumeration) {
  std::mt19937_64 rng(42);
  int checked = 0;
  for (Family f : {Family::kTiger, Family::kRecycling, Family::kMabc}) {
    for (int n : {2, 3}) {
      auto m = Make(f, n, 4);
      for (int trial = 0; trial < 8; ++trial) {
        auto s = RandomOccupancy(m, 1 + trial % 2, rng, 12);
        if (enum_candidates(m, s) > 2e5) continue;
        const BetaTable beta = RandomBeta(m, s, rng);
        const auto e = solve_enum(m, s, beta);
        const auto h = solve_hierarchical(m, s, beta);
        HierarchicalOptions share;
        share.share = true;
        const auto b1 = solve_hierarchical(m, s, beta, share);
        EXPECT_NEAR(h.value, e.value, 1e-9);
        EXPECT_NEAR(b1.value, e.value, 1e-9);
        BetaTable copy = beta;
        EXPECT_NEAR(q_value(m, s, h.rule, copy), h.value, 1e-9);
        EXPECT_NEAR(q_value(m, s, b1.rule, copy), h.value, 1e-9);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Subgame, SharingCollapsesEqualBeliefs) {
  auto m = Tiger(2, 3);
  auto s = initial_occupancy(m);
  for (int t = 0; t < 2; ++t)
    s = next_occupancy(m, s, constant_rule(m, s, Joint(m, {0, 0})), 0).first;
  const BetaTable beta = RewardBeta(m, s);
  HierarchicalOptions share;
  share.share = true;
  const auto plain = solve_hierarchical(m, s, beta);
  const auto b1 = solve_hierarchical(m, s, beta, share);
  EXPECT_NEAR(plain.value, b1.value, 1e-9);
  EXPECT_LT(b1.nodes, plain.nodes);
}

TEST(NestedBelief, StageZeroIsInitialBelief) {
  auto m = Tiger(3);
  auto s = initial_occupancy(m);
  auto b = compute_nested_belief(m, s, 0, kRootHistory);
  ASSERT_EQ(b.superiors.size(), 1u);
  ASSERT_EQ(b.superiors[0].superiors.size(), 1u);
  const auto& top = b.superiors[0].superiors[0];
  ASSERT_EQ(top.states.size(), 2u);
  EXPECT_DOUBLE_EQ(top.states[0].second, 0.5);
  EXPECT_THROW(compute_nested_belief(m, s, 0, 5), ModelError);
}

TEST(NestedBelief, TigerAfterListen) {
  auto m = Tiger(2);
  auto s0 = initial_occupancy(m);
  auto [s, p] = next_occupancy(m, s0, constant_rule(m, s0, Joint(m, {0, 0})), 0);
  const HistoryId heard_left = s.histories().Find(0, kRootHistory, 0, 0, kNoHistory);
  auto b = compute_nested_belief(m, s, 0, heard_left);
  ASSERT_EQ(b.superiors.size(), 2u);
  for (const auto& c : b.superiors) {
    const bool agree = s.histories().node(1, c.history).obs == 0;
    EXPECT_NEAR(c.prob, agree ? 0.745 : 0.255, 1e-12);
    const double left = agree ? 0.7225 / 0.745 : 0.1275 / 0.255;
    EXPECT_NEAR(c.states[0].second, left, 1e-12);
  }
  const std::vector<ActionId> own{0};
  auto omega = predict_observation(m, s.histories(), b, own, constant_rule(m, s, 0));
  ASSERT_EQ(omega.size(), 2u);
  // Tiger stays put under listening, so the next signal repeats the first
  // with 0.85^2 + 0.15^2.
  EXPECT_NEAR(omega[0], 0.85 * 0.85 + 0.15 * 0.15, 1e-12);
  EXPECT_NEAR(omega[0] + omega[1], 1.0, 1e-12);
}

TEST(NestedBelief, DeterministicModelIsPointMass) {
  auto m = Make(Family::kRecycling, 2);
  auto s0 = initial_occupancy(m);
  auto b = compute_nested_belief(m, s0, 0, kRootHistory);
  ASSERT_EQ(b.superiors.size(), 1u);
  EXPECT_EQ(b.superiors[0].states.size(), 1u);
  // Recharging keeps every battery high: the next signal is certain.
  auto omega = predict_observation(m, s0.histories(), b, std::vector<ActionId>{2},
                                   constant_rule(m, s0, Joint(m, {2, 2})));
  EXPECT_DOUBLE_EQ(omega[0], 1.0);
}

// Recursion against direct conditioning of the successor occupancy.
void CheckRecursion(const DecPomdpModel& m, const OccupancyState& s, const JointDecisionRule& a) {
  const int n = m.num_players();
  const HistoryLevels levels = build_levels(s);
  const JointSpace& uz = m.observations();
  std::vector<OccupancyState> next;
  std::vector<double> pz;
  for (ObsId z = 0; z < uz.radix(0); ++z) {
    auto [succ, p] = next_occupancy(m, s, a, z);
    next.push_back(std::move(succ));
    pz.push_back(p);
  }
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < levels.ids[i].size(); ++k) {
      const HistoryId h = levels.ids[i][k];
      auto b = compute_nested_belief(m, s, i, h);
      std::vector<ActionId> own(i + 1);
      for (int j = 0; j <= i; ++j) own[j] = a[j].at(s.histories().Project(i, h, j));
      auto omega = predict_observation(m, s.histories(), b, own, a);
      double total = 0.0;
      for (double w : omega) total += w;
      EXPECT_NEAR(total, 1.0, 1e-9);
      for (int z = 0; z < uz.stride(i + 1); ++z) {
        // Direct: mass of the extended history in the successor.
        HistoryId ext = kNoHistory;
        for (int j = 0; j <= i; ++j)
          ext = s.histories().Find(j, s.histories().Project(i, h, j), own[j], uz.component(z, j),
                                   ext);
        double direct = 0.0;
        const int z0 = uz.component(z, 0);
        if (ext != kNoHistory && pz[z0] > 0) {
          for (const auto& e : next[z0].entries())
            if (next[z0].histories().Project(n - 1, e.history, i) == ext) direct += e.prob;
          direct *= pz[z0] / levels.mass[i][k];
        }
        EXPECT_NEAR(omega[z], direct, 1e-9);
        if (direct <= 0) continue;
        auto updated = update_nested_belief(m, s.mutable_histories(), b, own, a, z);
        auto conditioned = compute_nested_belief(m, next[z0], i, ext);
        EXPECT_LE(nested_belief_gap(updated, conditioned), 1e-9);
      }
    }
  }
}

TEST(NestedBelief, RecursionMatchesConditioning) {
  std::mt19937_64 rng(17);
  for (Family f : {Family::kTiger, Family::kRecycling}) {
    auto m = Make(f, 2, 3);
    for (int trial = 0; trial < 6; ++trial) {
      auto s = RandomOccupancy(m, trial % 3, rng, 20, false);
      CheckRecursion(m, s, RandomRule(m, s, rng));
    }
  }
}

TEST(NestedBelief, LookupKeys) {
  auto m = Tiger(2, 3);
  auto s = initial_occupancy(m);
  auto b = compute_nested_belief(m, s, 0, kRootHistory);
  const std::vector<ActionId> none;
  EXPECT_EQ(b1_lookup_key(b, none), b1_lookup_key(b, none));
  auto nudged = b;
  nudged.superiors[0].states[0].second += 1e-12;
  nudged.superiors[0].states[1].second -= 1e-12;
  EXPECT_EQ(b1_lookup_key(b, none), b1_lookup_key(nudged, none));
  EXPECT_NE(b1_lookup_key(b, none), b1_lookup_key(b, std::vector<ActionId>{1}));

  // Player 1 heard (left, right) or (right, left) after two listens.
  for (int t = 0; t < 2; ++t)
    s = next_occupancy(m, s, constant_rule(m, s, Joint(m, {0, 0})), 0).first;
  const auto levels = build_levels(s);
  std::map<std::vector<std::int64_t>, std::vector<HistoryId>> groups;
  for (HistoryId h : levels.ids[1])
    groups[b1_lookup_key(compute_nested_belief(m, s, 1, h), std::vector<ActionId>{0})].push_back(h);
  EXPECT_EQ(groups.size(), 3u);
}

}  // namespace
}  // namespace hpbvi
