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

#ifndef HPBVI_OCCUPANCY_HPP_
#define HPBVI_OCCUPANCY_HPP_

#include <memory>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hpbvi/history.hpp"
#include "hpbvi/model.hpp"

namespace hpbvi {

// Private decision rule of one player: history id -> action.
struct DecisionRule {
  int player = 0;
  std::unordered_map<HistoryId, ActionId> actions;

  // Throws ModelError when h is outside the rule's domain.
  ActionId at(HistoryId h) const;
  bool defines(HistoryId h) const { return actions.count(h) > 0; }
  bool operator==(const DecisionRule&) const = default;
};

using JointDecisionRule = std::vector<DecisionRule>;

// A support entry. The joint history is identified by the top player's
// private history, which contains every subordinate history.
struct OccupancyEntry {
  StateId state;
  HistoryId history;
  double prob;
};

class OccupancyState {
 public:
  OccupancyState() = default;
  // Sorts by (history, state) and merges duplicate entries.
  OccupancyState(int stage, std::vector<OccupancyEntry> entries,
                 std::shared_ptr<HistoryTable> histories);

  int stage() const { return stage_; }
  bool empty() const { return entries_.empty(); }
  std::span<const OccupancyEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  double mass() const;
  int players() const { return histories_->players(); }
  const HistoryTable& histories() const { return *histories_; }
  HistoryTable& mutable_histories() const { return *histories_; }
  const std::shared_ptr<HistoryTable>& shared_histories() const { return histories_; }

 private:
  int stage_ = 0;
  std::vector<OccupancyEntry> entries_;
  std::shared_ptr<HistoryTable> histories_;
};

// Distinct private histories of every player in a support, with the
// subordinate links and marginal masses that backups and clustering need.
struct HistoryLevels {
  // ids[i]: sorted distinct histories of player i.
  std::vector<std::vector<HistoryId>> ids;
  // sub[i][k]: index in ids[i-1] of the subordinate of ids[i][k].
  std::vector<std::vector<int>> sub;
  std::vector<std::vector<double>> mass;
  // entry_top[k]: index in ids[n-1] of entry k.
  std::vector<int> entry_top;

  int index_of(int player, HistoryId h) const;
};

HistoryLevels build_levels(const OccupancyState& s);

OccupancyState initial_occupancy(const DecPomdpModel& model);

// Successor conditioned on player 0's signal, with that signal's
// probability. A zero-probability signal yields an empty state and 0.
std::pair<OccupancyState, double> next_occupancy(const DecPomdpModel& model,
                                                 const OccupancyState& s,
                                                 const JointDecisionRule& a,
                                                 ObsId z0);

double expected_reward(const DecPomdpModel& model, const OccupancyState& s,
                       const JointDecisionRule& a);

// L1 distance; histories are matched by interned id. Throws on stage mismatch.
double occupancy_distance(const OccupancyState& s1, const OccupancyState& s2);

struct ClusterResult {
  OccupancyState compressed;
  // label[i]: original player-i history -> representative history.
  std::vector<std::unordered_map<HistoryId, HistoryId>> label;
};

// Merges private histories that share their (clustered) subordinate history
// and induce the same nested belief, top player first.
ClusterResult cluster_histories(const DecPomdpModel& model, const OccupancyState& s,
                                double tolerance = 1e-8);

// Joint action of the rule at a support entry.
JointAction joint_action(const DecPomdpModel& model, const HistoryTable& histories,
                         const JointDecisionRule& a, HistoryId top);

// Joint rule that plays the same joint action at every history of s.
JointDecisionRule constant_rule(const DecPomdpModel& model, const OccupancyState& s,
                                JointAction u);

}  // namespace hpbvi

#endif  // HPBVI_OCCUPANCY_HPP_
