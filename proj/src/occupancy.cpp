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

#include "hpbvi/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

namespace hpbvi {

ActionId DecisionRule::at(HistoryId h) const {
  auto it = actions.find(h);
  if (it == actions.end())
    throw ModelError(fmt::format("decision rule of player {} undefined on history {}",
                                 player + 1, h));
  return it->second;
}

OccupancyState::OccupancyState(int stage, std::vector<OccupancyEntry> entries,
                               std::shared_ptr<HistoryTable> histories)
    : stage_(stage), histories_(std::move(histories)) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.history != b.history ? a.history < b.history : a.state < b.state;
  });
  for (const OccupancyEntry& e : entries) {
    if (!entries_.empty() && entries_.back().history == e.history &&
        entries_.back().state == e.state) {
      entries_.back().prob += e.prob;
    } else {
      entries_.push_back(e);
    }
  }
}

double OccupancyState::mass() const {
  double total = 0.0;
  for (const auto& e : entries_) total += e.prob;
  return total;
}

int HistoryLevels::index_of(int player, HistoryId h) const {
  const auto& v = ids[player];
  auto it = std::lower_bound(v.begin(), v.end(), h);
  if (it == v.end() || *it != h) return -1;
  return static_cast<int>(it - v.begin());
}

HistoryLevels build_levels(const OccupancyState& s) {
  const int n = s.players();
  const HistoryTable& table = s.histories();
  HistoryLevels out;
  out.ids.resize(n);
  out.sub.resize(n);
  out.mass.resize(n);
  for (const auto& e : s.entries()) {
    if (out.ids[n - 1].empty() || out.ids[n - 1].back() != e.history)
      out.ids[n - 1].push_back(e.history);
  }
  for (int i = n - 1; i > 0; --i) {
    std::vector<HistoryId>& below = out.ids[i - 1];
    for (HistoryId h : out.ids[i]) below.push_back(table.node(i, h).sub);
    std::sort(below.begin(), below.end());
    below.erase(std::unique(below.begin(), below.end()), below.end());
  }
  for (int i = 0; i < n; ++i) {
    out.mass[i].assign(out.ids[i].size(), 0.0);
    out.sub[i].assign(out.ids[i].size(), -1);
    if (i == 0) continue;
    for (std::size_t k = 0; k < out.ids[i].size(); ++k)
      out.sub[i][k] = out.index_of(i - 1, table.node(i, out.ids[i][k]).sub);
  }
  out.entry_top.reserve(s.size());
  int top = -1;
  HistoryId last = kNoHistory;
  for (const auto& e : s.entries()) {
    if (e.history != last) {
      ++top;
      last = e.history;
    }
    out.entry_top.push_back(top);
    out.mass[n - 1][top] += e.prob;
  }
  for (int i = n - 1; i > 0; --i) {
    for (std::size_t k = 0; k < out.ids[i].size(); ++k)
      out.mass[i - 1][out.sub[i][k]] += out.mass[i][k];
  }
  return out;
}

OccupancyState initial_occupancy(const DecPomdpModel& model) {
  auto table = std::make_shared<HistoryTable>(model.num_players());
  std::vector<OccupancyEntry> entries;
  for (StateId x = 0; x < model.num_states(); ++x) {
    const double p = model.initial_belief()[x];
    if (p > 0.0) entries.push_back({x, kRootHistory, p});
  }
  return OccupancyState(0, std::move(entries), std::move(table));
}

JointAction joint_action(const DecPomdpModel& model, const HistoryTable& histories,
                         const JointDecisionRule& a, HistoryId top) {
  const int n = model.num_players();
  JointAction u = 0;
  HistoryId h = top;
  for (int i = n - 1; i >= 0; --i) {
    u += a[i].at(h) * model.actions().stride(i);
    h = histories.node(i, h).sub;
  }
  return u;
}

JointDecisionRule constant_rule(const DecPomdpModel& model, const OccupancyState& s,
                                JointAction u) {
  const HistoryLevels levels = build_levels(s);
  JointDecisionRule rule(model.num_players());
  for (int i = 0; i < model.num_players(); ++i) {
    rule[i].player = i;
    for (HistoryId h : levels.ids[i])
      rule[i].actions[h] = model.actions().component(u, i);
  }
  return rule;
}

std::pair<OccupancyState, double> next_occupancy(const DecPomdpModel& model,
                                                 const OccupancyState& s,
                                                 const JointDecisionRule& a,
                                                 ObsId z0) {
  const int n = model.num_players();
  HistoryTable& table = s.mutable_histories();
  const JointSpace& uz = model.observations();
  const JointSpace& ua = model.actions();
  std::map<std::pair<HistoryId, StateId>, double> acc;
  std::vector<HistoryId> own(n), next(n);
  std::vector<ActionId> act(n);
  double total = 0.0;
  for (const auto& e : s.entries()) {
    HistoryId h = e.history;
    for (int i = n - 1; i >= 0; --i) {
      own[i] = h;
      h = table.node(i, h).sub;
    }
    JointAction u = 0;
    for (int i = 0; i < n; ++i) {
      act[i] = a[i].at(own[i]);
      u += act[i] * ua.stride(i);
    }
    model.ForEachOutcome(e.state, u, [&](const Outcome& o) {
      if (uz.component(o.obs, 0) != z0) return;
      HistoryId below = kNoHistory;
      for (int i = 0; i < n; ++i) {
        below = table.Intern(i, own[i], act[i], uz.component(o.obs, i), below);
        next[i] = below;
      }
      const double p = e.prob * o.prob;
      acc[{next[n - 1], o.next}] += p;
      total += p;
    });
  }
  if (total <= 0.0)
    return {OccupancyState(s.stage() + 1, {}, s.shared_histories()), 0.0};
  std::vector<OccupancyEntry> entries;
  entries.reserve(acc.size());
  for (const auto& [key, p] : acc) entries.push_back({key.second, key.first, p / total});
  const double mass = s.mass();
  return {OccupancyState(s.stage() + 1, std::move(entries), s.shared_histories()),
          total / mass};
}

double expected_reward(const DecPomdpModel& model, const OccupancyState& s,
                       const JointDecisionRule& a) {
  double total = 0.0;
  for (const auto& e : s.entries())
    total += e.prob * model.reward(e.state, joint_action(model, s.histories(), a, e.history));
  return total;
}

double occupancy_distance(const OccupancyState& s1, const OccupancyState& s2) {
  if (s1.stage() != s2.stage())
    throw ModelError(fmt::format("occupancy states at stages {} and {} are not comparable",
                                 s1.stage(), s2.stage()));
  auto a = s1.entries();
  auto b = s2.entries();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  auto less = [](const OccupancyEntry& x, const OccupancyEntry& y) {
    return x.history != y.history ? x.history < y.history : x.state < y.state;
  };
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && less(a[i], b[j]))) {
      d += std::abs(a[i++].prob);
    } else if (i == a.size() || less(b[j], a[i])) {
      d += std::abs(b[j++].prob);
    } else {
      d += std::abs(a[i++].prob - b[j++].prob);
    }
  }
  return d;
}

ClusterResult cluster_histories(const DecPomdpModel& model, const OccupancyState& s,
                                double tolerance) {
  const int n = model.num_players();
  ClusterResult out;
  out.label.resize(n);
  const HistoryLevels levels = build_levels(s);
  if (s.stage() == 0 || s.empty()) {
    for (int i = 0; i < n; ++i)
      for (HistoryId h : levels.ids[i]) out.label[i][h] = h;
    out.compressed = s;
    return out;
  }
  auto rounded = [&](double p) { return static_cast<std::int64_t>(std::llround(p / tolerance)); };

  // Signatures, top player first. sig[i][k] is a class id within level i.
  std::vector<std::vector<int>> sig(n);
  {
    std::map<std::vector<std::int64_t>, int> classes;
    sig[n - 1].assign(levels.ids[n - 1].size(), -1);
    std::size_t k = 0;
    auto entries = s.entries();
    for (std::size_t top = 0; top < levels.ids[n - 1].size(); ++top) {
      std::vector<std::int64_t> key;
      const double m = levels.mass[n - 1][top];
      while (k < entries.size() && levels.entry_top[k] == static_cast<int>(top)) {
        key.push_back(entries[k].state);
        key.push_back(rounded(entries[k].prob / m));
        ++k;
      }
      sig[n - 1][top] = classes.try_emplace(key, static_cast<int>(classes.size())).first->second;
    }
  }
  for (int i = n - 2; i >= 0; --i) {
    std::vector<std::map<int, double>> children(levels.ids[i].size());
    for (std::size_t k = 0; k < levels.ids[i + 1].size(); ++k)
      children[levels.sub[i + 1][k]][sig[i + 1][k]] += levels.mass[i + 1][k];
    std::map<std::vector<std::int64_t>, int> classes;
    sig[i].assign(levels.ids[i].size(), -1);
    for (std::size_t k = 0; k < levels.ids[i].size(); ++k) {
      std::vector<std::int64_t> key;
      for (const auto& [c, m] : children[k]) {
        key.push_back(c);
        key.push_back(rounded(m / levels.mass[i][k]));
      }
      sig[i][k] = classes.try_emplace(key, static_cast<int>(classes.size())).first->second;
    }
  }

  // Labels, bottom player first.
  HistoryTable& table = s.mutable_histories();
  std::vector<std::vector<HistoryId>> label(n);
  for (int i = 0; i < n; ++i) {
    label[i].assign(levels.ids[i].size(), kNoHistory);
    std::map<std::pair<HistoryId, int>, HistoryId> reps;
    for (std::size_t k = 0; k < levels.ids[i].size(); ++k) {
      const HistoryId below = i == 0 ? kNoHistory : label[i - 1][levels.sub[i][k]];
      auto [it, inserted] = reps.try_emplace({below, sig[i][k]}, kNoHistory);
      if (inserted) {
        const HistoryNode& rep = table.node(i, levels.ids[i][k]);
        it->second = table.Intern(i, rep.parent, rep.action, rep.obs, below);
      }
      label[i][k] = it->second;
      out.label[i][levels.ids[i][k]] = it->second;
    }
  }
  std::vector<OccupancyEntry> entries;
  auto all = s.entries();
  for (std::size_t k = 0; k < all.size(); ++k)
    entries.push_back({all[k].state, label[n - 1][levels.entry_top[k]], all[k].prob});
  out.compressed = OccupancyState(s.stage(), std::move(entries), s.shared_histories());
  return out;
}

}  // namespace hpbvi
