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

#ifndef HPBVI_VALUEFN_HPP_
#define HPBVI_VALUEFN_HPP_

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hpbvi/model.hpp"
#include "hpbvi/occupancy.hpp"

namespace hpbvi {

inline constexpr int kMaxPlayers = 16;

class AlphaVector;
using AlphaPtr = std::shared_ptr<const AlphaVector>;

// Value of a fixed joint policy from stage t on, as a function of
// (state, joint history). The policy is a decision rule over this vector's
// domain histories plus one continuation vector per player-0 signal. A
// history outside the domain is first mapped to a domain node; the mapping
// of player i only uses what player i knows, so every vector is the exact
// value of a decentralized policy.
//
// The model and history table must outlive the vector. Evaluation memoizes;
// the memo is guarded, so concurrent reads are safe.
class AlphaVector {
 public:
  struct Build {
    int stage = 0;
    JointDecisionRule rule;
    std::vector<AlphaPtr> next;  // empty at the last stage
    // Clustered-history labels: original history -> domain node. Checked
    // before the domain.
    std::vector<std::unordered_map<HistoryId, HistoryId>> labels;
    // Marginal mass of each domain node at its creation point, used to rank
    // fallback targets.
    std::vector<std::unordered_map<HistoryId, double>> weights;
  };

  // The boundary vector at stage == horizon.
  static AlphaPtr Zero(const DecPomdpModel& model, std::shared_ptr<HistoryTable> histories);

  AlphaVector(const DecPomdpModel& model, std::shared_ptr<HistoryTable> histories,
              Build build);

  // Same policy with extra history -> domain node labels, which take
  // precedence over the domain itself.
  static AlphaPtr Relabeled(const AlphaVector& base,
                            const std::vector<std::unordered_map<HistoryId, HistoryId>>& extra);

  bool is_zero() const { return zero_; }
  int stage() const { return stage_; }
  const JointDecisionRule& rule() const { return rule_; }
  const std::vector<AlphaPtr>& next() const { return next_; }
  const DecPomdpModel& model() const { return *model_; }
  const HistoryTable& histories() const { return *histories_; }

  // alpha(x, nodes); nodes[i] must be a domain node of player i.
  double Value(StateId x, std::span<const HistoryId> nodes) const;
  // alpha(x, o) for a joint history o at this stage, given by its top id.
  double Evaluate(StateId x, HistoryId top) const;

  // Domain node for a player-i history h (kNoHistory when h was never
  // interned), whose last step was (u, z), given the mapped subordinate node.
  HistoryId Entry(int player, HistoryId h, ActionId u, ObsId z, HistoryId mapped_sub) const;
  // Nodes for every player of a stage history.
  void MapHistory(HistoryId top, std::span<HistoryId> nodes) const;
  // Nodes of this vector reached from positions at the previous stage.
  void Advance(std::span<const HistoryId> positions, std::span<const ActionId> actions,
               JointObs z, std::span<HistoryId> nodes) const;

  void ClearMemo() const;
  std::size_t memo_size() const;

 private:
  struct NodeKey {
    std::array<HistoryId, kMaxPlayers + 1> v{};
    bool operator==(const NodeKey&) const = default;
  };
  struct NodeKeyHash {
    std::size_t operator()(const NodeKey& k) const;
  };
  struct EntryKey {
    int player;
    HistoryId h;
    ActionId u;
    ObsId z;
    HistoryId sub;
    bool operator==(const EntryKey&) const = default;
  };
  struct EntryKeyHash {
    std::size_t operator()(const EntryKey& k) const;
  };
  HistoryId Fallback(int player, ActionId u, ObsId z, HistoryId mapped_sub) const;

  AlphaVector() = default;

  const DecPomdpModel* model_ = nullptr;
  std::shared_ptr<HistoryTable> histories_;
  bool zero_ = false;
  int stage_ = 0;
  JointDecisionRule rule_;
  std::vector<AlphaPtr> next_;
  std::vector<std::unordered_map<HistoryId, HistoryId>> labels_;

  // Fallback targets per player, most probable first on ties by id.
  struct Tiers {
    std::map<std::tuple<ActionId, ObsId, HistoryId>, HistoryId> step_and_sub;
    std::map<HistoryId, HistoryId> sub;
    std::map<std::pair<ActionId, ObsId>, HistoryId> step;
    HistoryId any = kNoHistory;
  };
  std::vector<Tiers> tiers_;

  mutable std::mutex mutex_;
  mutable std::unordered_map<NodeKey, double, NodeKeyHash> memo_;
  mutable std::unordered_map<EntryKey, HistoryId, EntryKeyHash> entry_memo_;
};

// beta(x, o, u) under a continuation chosen per player-0 signal.
class BetaVector {
 public:
  BetaVector(const DecPomdpModel& model, int stage, std::vector<AlphaPtr> continuation);
  // Same continuation for every signal.
  static BetaVector Uniform(const DecPomdpModel& model, int stage, AlphaPtr continuation);

  int stage() const { return stage_; }
  const std::vector<AlphaPtr>& continuation() const { return continuation_; }
  bool is_boundary() const;

  double Eval(const HistoryTable& histories, StateId x, HistoryId top, JointAction u) const;

 private:
  const DecPomdpModel* model_;
  int stage_;
  std::vector<AlphaPtr> continuation_;
};

// beta tabulated on the support of an occupancy state: row k holds
// beta(x_k, o_k, u) for every joint action u.
struct BetaTable {
  int num_actions = 0;
  std::vector<double> values;

  double at(std::size_t entry, JointAction u) const {
    return values[entry * static_cast<std::size_t>(num_actions) + u];
  }
  std::span<const double> row(std::size_t entry) const {
    return {values.data() + entry * static_cast<std::size_t>(num_actions),
            static_cast<std::size_t>(num_actions)};
  }
};

BetaTable tabulate(const DecPomdpModel& model, const BetaVector& beta,
                   const OccupancyState& s);

double eval_beta(const DecPomdpModel& model, const BetaVector& beta,
                 const HistoryTable& histories, StateId x, HistoryId o, JointAction u);
double eval_alpha(const AlphaVector& alpha, StateId x, HistoryId o);

// <alpha, s>.
double inner(const AlphaVector& alpha, const OccupancyState& s);

// Max over V of <alpha, s> and the index of the first maximizer.
std::pair<double, std::size_t> value_at(const DecPomdpModel& model, const OccupancyState& s,
                                        std::span<const AlphaPtr> V);

double q_value(const DecPomdpModel& model, const OccupancyState& s,
               const JointDecisionRule& a, const BetaTable& beta);
double q_value(const DecPomdpModel& model, const OccupancyState& s,
               const JointDecisionRule& a, const BetaVector& beta);

}  // namespace hpbvi

#endif  // HPBVI_VALUEFN_HPP_
