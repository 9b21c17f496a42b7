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

#include "hpbvi/valuefn.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace hpbvi {

namespace {

constexpr std::uint64_t kMix = 0x9E3779B97F4A7C15ULL;

}  // namespace

std::size_t AlphaVector::NodeKeyHash::operator()(const NodeKey& k) const {
  std::uint64_t h = 0;
  for (HistoryId v : k.v) h = (h ^ static_cast<std::uint32_t>(v)) * kMix;
  return static_cast<std::size_t>(h ^ (h >> 31));
}

std::size_t AlphaVector::EntryKeyHash::operator()(const EntryKey& k) const {
  std::uint64_t h = static_cast<std::uint32_t>(k.player);
  h = (h ^ static_cast<std::uint32_t>(k.h)) * kMix;
  h = (h ^ static_cast<std::uint32_t>(k.u)) * kMix;
  h = (h ^ static_cast<std::uint32_t>(k.z)) * kMix;
  h = (h ^ static_cast<std::uint32_t>(k.sub)) * kMix;
  return static_cast<std::size_t>(h ^ (h >> 31));
}

AlphaPtr AlphaVector::Zero(const DecPomdpModel& model,
                           std::shared_ptr<HistoryTable> histories) {
  auto alpha = std::shared_ptr<AlphaVector>(new AlphaVector());
  alpha->model_ = &model;
  alpha->histories_ = std::move(histories);
  alpha->zero_ = true;
  alpha->stage_ = model.horizon();
  return alpha;
}

AlphaPtr AlphaVector::Relabeled(
    const AlphaVector& base, const std::vector<std::unordered_map<HistoryId, HistoryId>>& extra) {
  auto alpha = std::shared_ptr<AlphaVector>(new AlphaVector());
  alpha->model_ = base.model_;
  alpha->histories_ = base.histories_;
  alpha->zero_ = base.zero_;
  alpha->stage_ = base.stage_;
  alpha->rule_ = base.rule_;
  alpha->next_ = base.next_;
  alpha->labels_ = base.labels_;
  alpha->tiers_ = base.tiers_;
  for (std::size_t i = 0; i < extra.size() && i < alpha->labels_.size(); ++i)
    for (const auto& [h, node] : extra[i]) alpha->labels_[i][h] = node;
  return alpha;
}

AlphaVector::AlphaVector(const DecPomdpModel& model, std::shared_ptr<HistoryTable> histories,
                         Build build)
    : model_(&model),
      histories_(std::move(histories)),
      stage_(build.stage),
      rule_(std::move(build.rule)),
      next_(std::move(build.next)),
      labels_(std::move(build.labels)) {
  const int n = model.num_players();
  if (model.num_players() > kMaxPlayers)
    throw ModelError(fmt::format("at most {} players are supported", kMaxPlayers));
  if (static_cast<int>(rule_.size()) != n) throw ModelError("joint rule has wrong arity");
  labels_.resize(n);
  build.weights.resize(n);
  tiers_.resize(n);
  for (int i = 0; i < n; ++i) {
    std::vector<HistoryId> domain;
    for (const auto& [h, u] : rule_[i].actions) domain.push_back(h);
    std::sort(domain.begin(), domain.end());
    if (domain.empty()) throw ModelError("decision rule with an empty domain");
    auto weight = [&](HistoryId h) {
      auto it = build.weights[i].find(h);
      return it == build.weights[i].end() ? 0.0 : it->second;
    };
    auto offer = [&](auto& slot, HistoryId h) {
      if (slot == kNoHistory || weight(h) > weight(slot)) slot = h;
    };
    Tiers& t = tiers_[i];
    for (HistoryId h : domain) {
      const HistoryNode& node = histories_->node(i, h);
      auto& a = t.step_and_sub.try_emplace({node.action, node.obs, node.sub}, kNoHistory)
                    .first->second;
      offer(a, h);
      auto& b = t.sub.try_emplace(node.sub, kNoHistory).first->second;
      offer(b, h);
      auto& c = t.step.try_emplace({node.action, node.obs}, kNoHistory).first->second;
      offer(c, h);
      offer(t.any, h);
    }
  }
}

HistoryId AlphaVector::Fallback(int player, ActionId u, ObsId z, HistoryId mapped_sub) const {
  const Tiers& t = tiers_[player];
  if (auto it = t.step_and_sub.find({u, z, mapped_sub}); it != t.step_and_sub.end())
    return it->second;
  if (player > 0) {
    if (auto it = t.sub.find(mapped_sub); it != t.sub.end()) return it->second;
  }
  if (auto it = t.step.find({u, z}); it != t.step.end()) return it->second;
  return t.any;
}

HistoryId AlphaVector::Entry(int player, HistoryId h, ActionId u, ObsId z,
                             HistoryId mapped_sub) const {
  if (h != kNoHistory) {
    const auto& labels = labels_[player];
    if (auto it = labels.find(h); it != labels.end()) return it->second;
    if (rule_[player].defines(h)) return h;
  }
  const EntryKey key{player, h, u, z, mapped_sub};
  {
    std::lock_guard lock(mutex_);
    if (auto it = entry_memo_.find(key); it != entry_memo_.end()) return it->second;
  }
  const HistoryId out = Fallback(player, u, z, mapped_sub);
  std::lock_guard lock(mutex_);
  entry_memo_.emplace(key, out);
  return out;
}

void AlphaVector::MapHistory(HistoryId top, std::span<HistoryId> nodes) const {
  const int n = model_->num_players();
  std::array<HistoryId, kMaxPlayers> own{};
  HistoryId h = top;
  for (int i = n - 1; i >= 0; --i) {
    own[i] = h;
    h = histories_->node(i, h).sub;
  }
  HistoryId below = kNoHistory;
  for (int i = 0; i < n; ++i) {
    const HistoryNode& node = histories_->node(i, own[i]);
    below = Entry(i, own[i], node.action, node.obs, below);
    nodes[i] = below;
  }
}

void AlphaVector::Advance(std::span<const HistoryId> positions,
                          std::span<const ActionId> actions, JointObs z,
                          std::span<HistoryId> nodes) const {
  const int n = model_->num_players();
  const JointSpace& uz = model_->observations();
  HistoryId raw = kNoHistory;
  HistoryId below = kNoHistory;
  for (int i = 0; i < n; ++i) {
    const ObsId zi = uz.component(z, i);
    if (i == 0 || raw != kNoHistory)
      raw = histories_->Find(i, positions[i], actions[i], zi, raw);
    below = Entry(i, raw, actions[i], zi, below);
    nodes[i] = below;
  }
}

double AlphaVector::Value(StateId x, std::span<const HistoryId> nodes) const {
  if (zero_) return 0.0;
  const int n = model_->num_players();
  NodeKey key;
  key.v[0] = x;
  for (int i = 0; i < n; ++i) key.v[i + 1] = nodes[i];
  {
    std::lock_guard lock(mutex_);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
  }
  std::array<ActionId, kMaxPlayers> act{};
  JointAction u = 0;
  for (int i = 0; i < n; ++i) {
    act[i] = rule_[i].at(nodes[i]);
    u += act[i] * model_->actions().stride(i);
  }
  double v = model_->reward(x, u);
  if (!next_.empty()) {
    const double gamma = model_->discount();
    std::array<HistoryId, kMaxPlayers> succ{};
    const JointSpace& uz = model_->observations();
    double future = 0.0;
    model_->ForEachOutcome(x, u, [&](const Outcome& o) {
      const AlphaVector& nx = *next_[uz.component(o.obs, 0)];
      if (nx.zero_) return;
      nx.Advance(nodes.first(n), std::span<const ActionId>(act.data(), n), o.obs,
                 std::span<HistoryId>(succ.data(), n));
      future += o.prob * nx.Value(o.next, std::span<const HistoryId>(succ.data(), n));
    });
    v += gamma * future;
  }
  std::lock_guard lock(mutex_);
  memo_.emplace(key, v);
  return v;
}

double AlphaVector::Evaluate(StateId x, HistoryId top) const {
  if (zero_) return 0.0;
  std::array<HistoryId, kMaxPlayers> nodes{};
  const int n = model_->num_players();
  MapHistory(top, std::span<HistoryId>(nodes.data(), n));
  return Value(x, std::span<const HistoryId>(nodes.data(), n));
}

void AlphaVector::ClearMemo() const {
  std::lock_guard lock(mutex_);
  memo_.clear();
  entry_memo_.clear();
}

std::size_t AlphaVector::memo_size() const {
  std::lock_guard lock(mutex_);
  return memo_.size();
}

BetaVector::BetaVector(const DecPomdpModel& model, int stage,
                       std::vector<AlphaPtr> continuation)
    : model_(&model), stage_(stage), continuation_(std::move(continuation)) {
  const int z0 = model.observations().radix(0);
  if (continuation_.size() == 1 && z0 > 1) continuation_.resize(z0, continuation_[0]);
  if (!continuation_.empty() && static_cast<int>(continuation_.size()) != z0)
    throw ModelError("continuation needs one vector per player-0 signal");
}

BetaVector BetaVector::Uniform(const DecPomdpModel& model, int stage, AlphaPtr continuation) {
  return BetaVector(model, stage, {std::move(continuation)});
}

bool BetaVector::is_boundary() const {
  return continuation_.empty() ||
         std::all_of(continuation_.begin(), continuation_.end(),
                     [](const AlphaPtr& a) { return a->is_zero(); });
}

double BetaVector::Eval(const HistoryTable& histories, StateId x, HistoryId top,
                        JointAction u) const {
  const DecPomdpModel& model = *model_;
  double v = model.reward(x, u);
  if (is_boundary()) return v;
  const int n = model.num_players();
  std::array<HistoryId, kMaxPlayers> own{}, succ{};
  std::array<ActionId, kMaxPlayers> act{};
  HistoryId h = top;
  for (int i = n - 1; i >= 0; --i) {
    own[i] = h;
    h = histories.node(i, h).sub;
    act[i] = model.actions().component(u, i);
  }
  const JointSpace& uz = model.observations();
  double future = 0.0;
  model.ForEachOutcome(x, u, [&](const Outcome& o) {
    const AlphaVector& nx = *continuation_[uz.component(o.obs, 0)];
    if (nx.is_zero()) return;
    nx.Advance(std::span<const HistoryId>(own.data(), n), std::span<const ActionId>(act.data(), n),
               o.obs, std::span<HistoryId>(succ.data(), n));
    future += o.prob * nx.Value(o.next, std::span<const HistoryId>(succ.data(), n));
  });
  return v + model.discount() * future;
}

BetaTable tabulate(const DecPomdpModel& model, const BetaVector& beta,
                   const OccupancyState& s) {
  BetaTable table;
  table.num_actions = model.actions().size();
  table.values.resize(s.size() * static_cast<std::size_t>(table.num_actions));
  auto entries = s.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    for (JointAction u = 0; u < table.num_actions; ++u) {
      table.values[k * table.num_actions + u] =
          beta.Eval(s.histories(), entries[k].state, entries[k].history, u);
    }
  }
  return table;
}

double eval_beta(const DecPomdpModel&, const BetaVector& beta, const HistoryTable& histories,
                 StateId x, HistoryId o, JointAction u) {
  return beta.Eval(histories, x, o, u);
}

double eval_alpha(const AlphaVector& alpha, StateId x, HistoryId o) {
  return alpha.Evaluate(x, o);
}

double inner(const AlphaVector& alpha, const OccupancyState& s) {
  double v = 0.0;
  for (const auto& e : s.entries()) v += e.prob * alpha.Evaluate(e.state, e.history);
  return v;
}

std::pair<double, std::size_t> value_at(const DecPomdpModel&, const OccupancyState& s,
                                        std::span<const AlphaPtr> V) {
  if (V.empty()) throw ModelError("value_at needs a nonempty collection");
  double best = 0.0;
  std::size_t arg = 0;
  for (std::size_t k = 0; k < V.size(); ++k) {
    const double v = inner(*V[k], s);
    if (k == 0 || v > best) {
      best = v;
      arg = k;
    }
  }
  return {best, arg};
}

double q_value(const DecPomdpModel& model, const OccupancyState& s,
               const JointDecisionRule& a, const BetaTable& beta) {
  double v = 0.0;
  auto entries = s.entries();
  for (std::size_t k = 0; k < entries.size(); ++k)
    v += entries[k].prob * beta.at(k, joint_action(model, s.histories(), a, entries[k].history));
  return v;
}

double q_value(const DecPomdpModel& model, const OccupancyState& s,
               const JointDecisionRule& a, const BetaVector& beta) {
  double v = 0.0;
  for (const auto& e : s.entries())
    v += e.prob * beta.Eval(s.histories(), e.state, e.history,
                            joint_action(model, s.histories(), a, e.history));
  return v;
}

}  // namespace hpbvi
