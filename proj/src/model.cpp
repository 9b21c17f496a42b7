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

#include "hpbvi/model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace hpbvi {

namespace {

constexpr std::size_t kMaxTabulatedRows = 2'000'000;
constexpr std::size_t kMaxTabulatedOutcomes = 30'000'000;

std::string JointLabel(const std::vector<std::vector<std::string>>& sets,
                       const JointSpace& space, int code) {
  std::string out;
  for (int i = 0; i < space.players(); ++i) {
    if (i > 0) out += ' ';
    out += sets[i][space.component(code, i)];
  }
  return out;
}

}  // namespace

JointSpace::JointSpace(std::vector<int> radices) : radix_(std::move(radices)) {
  stride_.resize(radix_.size() + 1);
  stride_[0] = 1;
  for (std::size_t i = 0; i < radix_.size(); ++i) {
    if (radix_[i] <= 0) throw ModelError("empty label set");
    if (stride_[i] > (1 << 30) / radix_[i])
      throw ModelError("joint space too large");
    stride_[i + 1] = stride_[i] * radix_[i];
  }
  size_ = stride_.back();
}

int JointSpace::encode(std::span<const int> parts) const {
  int code = 0;
  for (int i = 0; i < players(); ++i) code += parts[i] * stride_[i];
  return code;
}

std::vector<int> JointSpace::decode(int code) const {
  std::vector<int> parts(radix_.size());
  for (int i = 0; i < players(); ++i) parts[i] = component(code, i);
  return parts;
}

DecPomdpModel::DecPomdpModel(ModelLabels labels,
                             std::shared_ptr<const Dynamics> dynamics,
                             std::vector<double> initial_belief,
                             double discount, int horizon)
    : labels_(std::move(labels)),
      dynamics_(std::move(dynamics)),
      initial_(std::move(initial_belief)),
      discount_(discount),
      horizon_(horizon),
      lazy_(std::make_shared<Lazy>()) {
  if (labels_.actions.empty()) throw ModelError("model has no players");
  if (labels_.observations.size() != labels_.actions.size())
    throw ModelError("action and observation sets disagree on player count");
  if (labels_.players.empty()) {
    for (int i = 0; i < num_players(); ++i)
      labels_.players.push_back(fmt::format("p{}", i + 1));
  }
  std::vector<int> ua, uz;
  for (const auto& a : labels_.actions) ua.push_back(static_cast<int>(a.size()));
  for (const auto& z : labels_.observations)
    uz.push_back(static_cast<int>(z.size()));
  actions_ = JointSpace(std::move(ua));
  observations_ = JointSpace(std::move(uz));
  if (!dynamics_) throw ModelError("model has no dynamics");
}

DecPomdpModel DecPomdpModel::WithHorizon(int horizon) const {
  if (horizon <= 0) throw ModelError(fmt::format("horizon {} must be positive", horizon));
  DecPomdpModel copy = *this;
  copy.horizon_ = horizon;
  return copy;
}

DecPomdpModel DecPomdpModel::WithDiscount(double discount) const {
  if (!(discount > 0.0 && discount <= 1.0))
    throw ModelError(fmt::format("discount {} must lie in (0,1]", discount));
  DecPomdpModel copy = *this;
  copy.discount_ = discount;
  return copy;
}

double DecPomdpModel::reward(StateId x, JointAction u) const {
  if (const std::vector<double>* table = Rewards())
    return (*table)[static_cast<std::size_t>(x) * actions_.size() + u];
  return dynamics_->Reward(x, u);
}

const std::vector<double>* DecPomdpModel::Rewards() const {
  std::call_once(lazy_->reward_once, [this] {
    const std::size_t rows = static_cast<std::size_t>(num_states()) * actions_.size();
    if (rows > kMaxTabulatedRows) return;
    auto table = std::make_unique<std::vector<double>>();
    table->reserve(rows);
    for (StateId x = 0; x < num_states(); ++x)
      for (JointAction u = 0; u < actions_.size(); ++u) table->push_back(dynamics_->Reward(x, u));
    lazy_->rewards = std::move(table);
  });
  return lazy_->rewards.get();
}

double DecPomdpModel::joint_reward(std::string_view state,
                                   std::span<const std::string> joint_action) const {
  if (static_cast<int>(joint_action.size()) != num_players())
    throw ModelError(fmt::format("joint action has {} components, expected {}",
                                 joint_action.size(), num_players()));
  std::vector<int> parts;
  for (int i = 0; i < num_players(); ++i)
    parts.push_back(action_index(i, joint_action[i]));
  return reward(state_index(state), actions_.encode(parts));
}

StateId DecPomdpModel::state_index(std::string_view label) const {
  auto it = std::find(labels_.states.begin(), labels_.states.end(), label);
  if (it == labels_.states.end())
    throw ModelError(fmt::format("unknown state '{}'", label));
  return static_cast<StateId>(it - labels_.states.begin());
}

ActionId DecPomdpModel::action_index(int player, std::string_view label) const {
  const auto& set = labels_.actions.at(player);
  auto it = std::find(set.begin(), set.end(), label);
  if (it == set.end())
    throw ModelError(
        fmt::format("unknown action '{}' for player {}", label, player + 1));
  return static_cast<ActionId>(it - set.begin());
}

ObsId DecPomdpModel::observation_index(int player, std::string_view label) const {
  const auto& set = labels_.observations.at(player);
  auto it = std::find(set.begin(), set.end(), label);
  if (it == set.end())
    throw ModelError(
        fmt::format("unknown observation '{}' for player {}", label, player + 1));
  return static_cast<ObsId>(it - set.begin());
}

void DecPomdpModel::ComputeOutcomes(StateId x, JointAction u,
                                    std::vector<Outcome>& out) const {
  out.clear();
  std::vector<std::pair<StateId, double>> next;
  std::vector<std::pair<JointObs, double>> obs;
  dynamics_->Transition(x, u, next);
  for (const auto& [y, py] : next) {
    if (py == 0.0) continue;
    obs.clear();
    dynamics_->Observation(u, y, obs);
    for (const auto& [z, pz] : obs) {
      if (pz == 0.0) continue;
      out.push_back({y, z, py * pz});
    }
  }
}

const DecPomdpModel::OutcomeTable* DecPomdpModel::Table() const {
  std::call_once(lazy_->once, [this] {
    const std::size_t rows =
        static_cast<std::size_t>(num_states()) * actions_.size();
    if (rows > kMaxTabulatedRows) return;
    auto table = std::make_unique<OutcomeTable>();
    table->offsets.reserve(rows + 1);
    table->offsets.push_back(0);
    std::vector<Outcome> buffer;
    for (StateId x = 0; x < num_states(); ++x) {
      for (JointAction u = 0; u < actions_.size(); ++u) {
        ComputeOutcomes(x, u, buffer);
        table->outcomes.insert(table->outcomes.end(), buffer.begin(),
                               buffer.end());
        if (table->outcomes.size() > kMaxTabulatedOutcomes) return;
        table->offsets.push_back(table->outcomes.size());
      }
    }
    lazy_->table = std::move(table);
  });
  return lazy_->table.get();
}

double DecPomdpModel::reward_bound() const {
  double bound = 0.0;
  for (StateId x = 0; x < num_states(); ++x)
    for (JointAction u = 0; u < actions_.size(); ++u)
      bound = std::max(bound, std::abs(reward(x, u)));
  return bound;
}

std::vector<Violation> validate(const DecPomdpModel& model) {
  std::vector<Violation> out;
  const auto& labels = model.labels();
  for (const std::string& ref : model.dynamics().DanglingReferences())
    out.push_back({ref, "references an unknown label"});

  if (static_cast<int>(model.initial_belief().size()) != model.num_states()) {
    out.push_back({"start", "initial belief has wrong length"});
  } else {
    double total = 0.0;
    for (double p : model.initial_belief()) {
      if (!(p >= 0.0)) out.push_back({"start", "negative probability"});
      total += p;
    }
    if (std::abs(total - 1.0) > kProbTolerance)
      out.push_back({"start", fmt::format("sums to {:.12g}", total)});
  }
  if (!(model.discount() > 0.0 && model.discount() <= 1.0))
    out.push_back({"discount", "must lie in (0,1]"});
  if (model.horizon() <= 0) out.push_back({"horizon", "must be positive"});

  std::vector<std::pair<StateId, double>> next;
  std::vector<std::pair<JointObs, double>> obs;
  const auto& ua = model.actions();
  for (StateId x = 0; x < model.num_states(); ++x) {
    for (JointAction u = 0; u < ua.size(); ++u) {
      next.clear();
      model.dynamics().Transition(x, u, next);
      double total = 0.0;
      bool bad = false;
      for (const auto& [y, p] : next) {
        if (y < 0 || y >= model.num_states() || !(p >= 0.0)) bad = true;
        total += p;
      }
      if (bad || std::abs(total - 1.0) > kProbTolerance) {
        out.push_back({fmt::format("T({} | {})", labels.states[x],
                                   JointLabel(labels.actions, ua, u)),
                       fmt::format("transition row sums to {:.12g}", total)});
      }
      if (!std::isfinite(model.reward(x, u))) {
        out.push_back({fmt::format("R({}, {})", labels.states[x],
                                   JointLabel(labels.actions, ua, u)),
                       "reward is not finite"});
      }
    }
  }
  const auto& zs = model.observations();
  for (JointAction u = 0; u < ua.size(); ++u) {
    for (StateId y = 0; y < model.num_states(); ++y) {
      obs.clear();
      model.dynamics().Observation(u, y, obs);
      double total = 0.0;
      bool bad = false;
      for (const auto& [z, p] : obs) {
        if (z < 0 || z >= zs.size() || !(p >= 0.0)) bad = true;
        total += p;
      }
      if (bad || std::abs(total - 1.0) > kProbTolerance) {
        out.push_back({fmt::format("O(. | {}, {})",
                                   JointLabel(labels.actions, ua, u),
                                   labels.states[y]),
                       fmt::format("observation row sums to {:.12g}", total)});
      }
    }
  }
  return out;
}

void require_valid(const DecPomdpModel& model) {
  auto violations = validate(model);
  if (!violations.empty()) {
    throw ModelError(fmt::format("invalid model: {}: {}", violations[0].where,
                                 violations[0].what));
  }
}

TabularDynamics::TabularDynamics(int num_states, int num_joint_actions,
                                 int num_joint_obs, std::vector<TEntry> t,
                                 std::vector<OEntry> o, std::vector<REntry> r)
    : num_states_(num_states),
      num_actions_(num_joint_actions),
      num_obs_(num_joint_obs),
      t_rows_(static_cast<std::size_t>(num_states) * num_joint_actions),
      o_rows_(static_cast<std::size_t>(num_joint_actions) * num_states),
      r_(static_cast<std::size_t>(num_states) * num_joint_actions, 0.0) {
  auto state_ok = [&](StateId s) { return s >= 0 && s < num_states_; };
  auto action_ok = [&](JointAction u) { return u >= 0 && u < num_actions_; };
  for (const TEntry& e : t) {
    if (!state_ok(e.x) || !action_ok(e.u) || !state_ok(e.y)) {
      dangling_.push_back(fmt::format("T entry ({}, {}, {})", e.x, e.u, e.y));
      continue;
    }
    t_rows_[static_cast<std::size_t>(e.x) * num_actions_ + e.u].push_back(
        {e.y, e.p});
  }
  for (const OEntry& e : o) {
    if (!action_ok(e.u) || !state_ok(e.y) || e.z < 0 || e.z >= num_obs_) {
      dangling_.push_back(fmt::format("O entry ({}, {}, {})", e.u, e.y, e.z));
      continue;
    }
    o_rows_[static_cast<std::size_t>(e.u) * num_states_ + e.y].push_back(
        {e.z, e.p});
  }
  for (const REntry& e : r) {
    if (!state_ok(e.x) || !action_ok(e.u)) {
      dangling_.push_back(fmt::format("R entry ({}, {})", e.x, e.u));
      continue;
    }
    r_[static_cast<std::size_t>(e.x) * num_actions_ + e.u] = e.r;
  }
  for (auto& row : t_rows_) std::sort(row.begin(), row.end());
  for (auto& row : o_rows_) std::sort(row.begin(), row.end());
}

void TabularDynamics::Transition(StateId x, JointAction u,
                                 std::vector<std::pair<StateId, double>>& out) const {
  const auto& row = t_rows_[static_cast<std::size_t>(x) * num_actions_ + u];
  out.insert(out.end(), row.begin(), row.end());
}

void TabularDynamics::Observation(
    JointAction u, StateId y, std::vector<std::pair<JointObs, double>>& out) const {
  const auto& row = o_rows_[static_cast<std::size_t>(u) * num_states_ + y];
  out.insert(out.end(), row.begin(), row.end());
}

double TabularDynamics::Reward(StateId x, JointAction u) const {
  return r_[static_cast<std::size_t>(x) * num_actions_ + u];
}

std::vector<std::string> TabularDynamics::DanglingReferences() const {
  return dangling_;
}

}  // namespace hpbvi
