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

#ifndef HPBVI_SUBGAME_HPP_
#define HPBVI_SUBGAME_HPP_

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hpbvi/occupancy.hpp"
#include "hpbvi/valuefn.hpp"

namespace hpbvi {

// The rule space is too large for enumeration.
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A solve ran past its deadline.
class DeadlineExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::steady_clock;

struct SubgameSolution {
  JointDecisionRule rule;
  double value = 0.0;
  // Backward-pass (node, prefix action) pairs evaluated, or candidate rules
  // scored for enumeration.
  std::uint64_t nodes = 0;
};

struct EnumOptions {
  // Cap on the number of candidate rules of the subordinate players; <= 0
  // disables the guard.
  double max_candidates = 1e7;
  std::optional<Clock::time_point> deadline;
};

// Number of candidate rules solve_enum scores on s.
double enum_candidates(const DecPomdpModel& model, const OccupancyState& s);

// Exact argmax of q_value(s, ., beta). Rules of players 0..n-2 are enumerated
// in odometer order; the top player, who sees every other history, answers
// each candidate with its pointwise best response. Ties go to the first rule
// in that order.
SubgameSolution solve_enum(const DecPomdpModel& model, const OccupancyState& s,
                           const BetaTable& beta, const EnumOptions& options = {});

struct HierarchicalOptions {
  // Share backward-pass rows between nodes with equal type (B1).
  bool share = false;
  double key_tolerance = 1e-8;
};

// Backward induction over player levels, top player first, then a forward
// greedy pass from player 0. Ties go to the lowest action.
SubgameSolution solve_hierarchical(const DecPomdpModel& model, const OccupancyState& s,
                                   const BetaTable& beta,
                                   const HierarchicalOptions& options = {});

// Conditional distribution seen from a player-i history: over the superior
// player's histories, each with its own nested belief, and over hidden
// states at the top player.
struct NestedBelief {
  int player = 0;
  HistoryId history = kNoHistory;
  double prob = 1.0;                                // weight under the parent level
  std::vector<NestedBelief> superiors;              // player < n-1, sorted by history
  std::vector<std::pair<StateId, double>> states;   // player == n-1, sorted by state
};

// Throws ModelError when h has no mass in s.
NestedBelief compute_nested_belief(const DecPomdpModel& model, const OccupancyState& s,
                                   int player, HistoryId h);

// Distribution of the next signals of players 0..i (mixed-radix code, player
// 0 least significant) given b and the stage actions. own_actions holds the
// actions of players 0..i; superiors act by their rules.
std::vector<double> predict_observation(const DecPomdpModel& model, const HistoryTable& table,
                                        const NestedBelief& b,
                                        std::span<const ActionId> own_actions,
                                        const JointDecisionRule& rules);

// Next-stage nested belief after players 0..i receive the signals encoded by
// z. Successor histories are interned in table. Throws ModelError when z has
// zero probability.
NestedBelief update_nested_belief(const DecPomdpModel& model, HistoryTable& table,
                                  const NestedBelief& b, std::span<const ActionId> own_actions,
                                  const JointDecisionRule& rules, int z);

// Largest probability gap between two nested beliefs, matching histories by
// id; infinity when their supports differ.
double nested_belief_gap(const NestedBelief& a, const NestedBelief& b);

// Canonical key of (b, subordinate actions) with probabilities rounded to the
// tolerance. History ids are left out so that equal beliefs reached along
// different histories collide.
std::vector<std::int64_t> b1_lookup_key(const NestedBelief& b,
                                        std::span<const ActionId> subordinate_actions,
                                        double tolerance = 1e-8);

}  // namespace hpbvi

#endif  // HPBVI_SUBGAME_HPP_
