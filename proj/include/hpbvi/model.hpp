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

#ifndef HPBVI_MODEL_HPP_
#define HPBVI_MODEL_HPP_

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hpbvi {

using StateId = std::int32_t;
using ActionId = std::int32_t;
using ObsId = std::int32_t;
// Joint actions and joint observations are mixed-radix codes; player 0 is the
// least significant digit.
using JointAction = std::int32_t;
using JointObs = std::int32_t;

inline constexpr double kProbTolerance = 1e-9;

class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mixed-radix product of per-player label sets.
class JointSpace {
 public:
  JointSpace() = default;
  explicit JointSpace(std::vector<int> radices);

  int players() const { return static_cast<int>(radix_.size()); }
  int size() const { return size_; }
  int radix(int player) const { return radix_[player]; }
  // Number of codes formed by players [0, player).
  int stride(int player) const { return stride_[player]; }
  int component(int code, int player) const {
    return code / stride_[player] % radix_[player];
  }
  // Code restricted to players [0, player).
  int prefix(int code, int player) const { return code % stride_[player]; }
  int encode(std::span<const int> parts) const;
  std::vector<int> decode(int code) const;

 private:
  std::vector<int> radix_;
  std::vector<int> stride_;
  int size_ = 1;
};

struct Outcome {
  StateId next;
  JointObs obs;
  double prob;
};

// Source of the model's tables. Rows are produced on request so that large
// generated instances need not be tabulated.
class Dynamics {
 public:
  virtual ~Dynamics() = default;
  // Appends (y, T(y|x,u)) pairs.
  virtual void Transition(StateId x, JointAction u,
                          std::vector<std::pair<StateId, double>>& out) const = 0;
  // Appends (z, O(z|u,y)) pairs over joint base observations.
  virtual void Observation(JointAction u, StateId y,
                           std::vector<std::pair<JointObs, double>>& out) const = 0;
  virtual double Reward(StateId x, JointAction u) const = 0;
  // Out-of-range references, used by validate(). Generated dynamics have none.
  virtual std::vector<std::string> DanglingReferences() const { return {}; }
};

struct ModelLabels {
  std::vector<std::string> players;
  std::vector<std::string> states;
  std::vector<std::vector<std::string>> actions;       // per player
  std::vector<std::vector<std::string>> observations;  // per player, base signal
};

class DecPomdpModel {
 public:
  DecPomdpModel(ModelLabels labels, std::shared_ptr<const Dynamics> dynamics,
                std::vector<double> initial_belief, double discount,
                int horizon);

  int num_players() const { return static_cast<int>(labels_.actions.size()); }
  int num_states() const { return static_cast<int>(labels_.states.size()); }
  const JointSpace& actions() const { return actions_; }
  const JointSpace& observations() const { return observations_; }
  const ModelLabels& labels() const { return labels_; }
  std::span<const double> initial_belief() const { return initial_; }
  double discount() const { return discount_; }
  int horizon() const { return horizon_; }
  const Dynamics& dynamics() const { return *dynamics_; }
  std::shared_ptr<const Dynamics> shared_dynamics() const { return dynamics_; }

  // Copies with a new horizon or discount; throw ModelError when out of range.
  DecPomdpModel WithHorizon(int horizon) const;
  DecPomdpModel WithDiscount(double discount) const;

  double reward(StateId x, JointAction u) const;
  // r(x,u) looked up by labels; throws ModelError naming an unknown label.
  double joint_reward(std::string_view state,
                      std::span<const std::string> joint_action) const;

  // Joint outcome list p(y,z|x,u). Rows are tabulated on first use when the
  // model is small enough, otherwise recomputed per call.
  template <typename F>
  void ForEachOutcome(StateId x, JointAction u, F&& f) const {
    const OutcomeTable* table = Table();
    if (table != nullptr) {
      const std::size_t row = static_cast<std::size_t>(x) * actions_.size() + u;
      for (std::size_t k = table->offsets[row]; k < table->offsets[row + 1]; ++k)
        f(table->outcomes[k]);
      return;
    }
    std::vector<Outcome> buffer;
    ComputeOutcomes(x, u, buffer);
    for (const Outcome& o : buffer) f(o);
  }
  void ComputeOutcomes(StateId x, JointAction u, std::vector<Outcome>& out) const;

  // Largest |r(x,u)|.
  double reward_bound() const;

  StateId state_index(std::string_view label) const;
  ActionId action_index(int player, std::string_view label) const;
  ObsId observation_index(int player, std::string_view label) const;

 private:
  struct OutcomeTable {
    std::vector<std::size_t> offsets;
    std::vector<Outcome> outcomes;
  };
  const OutcomeTable* Table() const;

  ModelLabels labels_;
  std::shared_ptr<const Dynamics> dynamics_;
  std::vector<double> initial_;
  double discount_;
  int horizon_;
  JointSpace actions_;
  JointSpace observations_;

  // r(x, u) for every pair, or null when the model is too large to tabulate.
  const std::vector<double>* Rewards() const;

  struct Lazy {
    std::once_flag once;
    std::unique_ptr<OutcomeTable> table;
    std::once_flag reward_once;
    std::unique_ptr<std::vector<double>> rewards;
  };
  std::shared_ptr<Lazy> lazy_;
};

struct Violation {
  std::string where;
  std::string what;
};

// All invariant violations; empty on success.
std::vector<Violation> validate(const DecPomdpModel& model);

// Throws ModelError carrying the first violation.
void require_valid(const DecPomdpModel& model);

// Explicit sparse tables, the representation produced by the file parser.
class TabularDynamics : public Dynamics {
 public:
  struct TEntry {
    StateId x;
    JointAction u;
    StateId y;
    double p;
  };
  struct OEntry {
    JointAction u;
    StateId y;
    JointObs z;
    double p;
  };
  struct REntry {
    StateId x;
    JointAction u;
    double r;
  };

  TabularDynamics(int num_states, int num_joint_actions, int num_joint_obs,
                  std::vector<TEntry> t, std::vector<OEntry> o,
                  std::vector<REntry> r);

  void Transition(StateId x, JointAction u,
                  std::vector<std::pair<StateId, double>>& out) const override;
  void Observation(JointAction u, StateId y,
                   std::vector<std::pair<JointObs, double>>& out) const override;
  double Reward(StateId x, JointAction u) const override;
  std::vector<std::string> DanglingReferences() const override;

 private:
  int num_states_;
  int num_actions_;
  int num_obs_;
  std::vector<std::vector<std::pair<StateId, double>>> t_rows_;
  std::vector<std::vector<std::pair<JointObs, double>>> o_rows_;
  std::vector<double> r_;
  std::vector<std::string> dangling_;
};

}  // namespace hpbvi

#endif  // HPBVI_MODEL_HPP_
