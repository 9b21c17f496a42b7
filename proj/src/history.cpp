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

#include "hpbvi/history.hpp"

#include <fmt/format.h>

namespace hpbvi {

HistoryTable::HistoryTable(int players) : nodes_(players), index_(players) {
  for (int i = 0; i < players; ++i) {
    HistoryNode root;
    root.sub = i == 0 ? kNoHistory : kRootHistory;
    nodes_[i].push_back(root);
  }
}

HistoryId HistoryTable::Intern(int player, HistoryId parent, ActionId u, ObsId z,
                               HistoryId sub) {
  const Key key{parent, u, z, sub};
  auto [it, inserted] =
      index_[player].try_emplace(key, static_cast<HistoryId>(nodes_[player].size()));
  if (inserted) {
    nodes_[player].push_back({parent, u, z, sub, nodes_[player][parent].stage + 1});
  }
  return it->second;
}

HistoryId HistoryTable::Find(int player, HistoryId parent, ActionId u, ObsId z,
                             HistoryId sub) const {
  auto it = index_[player].find(Key{parent, u, z, sub});
  return it == index_[player].end() ? kNoHistory : it->second;
}

HistoryId HistoryTable::Project(int from, HistoryId h, int to) const {
  for (int i = from; i > to; --i) h = nodes_[i][h].sub;
  return h;
}

std::string HistoryTable::Describe(const DecPomdpModel& model, int player,
                                   HistoryId h) const {
  std::vector<std::string> steps;
  while (h != kNoHistory && nodes_[player][h].parent != kNoHistory) {
    const HistoryNode& n = nodes_[player][h];
    steps.push_back(fmt::format("{}/{}", model.labels().actions[player][n.action],
                                model.labels().observations[player][n.obs]));
    h = n.parent;
  }
  std::string out = "(";
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    if (it != steps.rbegin()) out += ", ";
    out += *it;
  }
  return out + ")";
}

}  // namespace hpbvi
