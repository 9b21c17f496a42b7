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

#ifndef HPBVI_HISTORY_HPP_
#define HPBVI_HISTORY_HPP_

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hpbvi/model.hpp"

namespace hpbvi {

using HistoryId = std::int32_t;
inline constexpr HistoryId kNoHistory = -1;
inline constexpr HistoryId kRootHistory = 0;

// One step of a private history. Under hierarchical sharing, player i's
// history at stage t is its own history at t-1, its own action and base
// signal, and the full history of player i-1 at stage t. Player 0 has no
// subordinate.
struct HistoryNode {
  HistoryId parent = kNoHistory;
  ActionId action = -1;
  ObsId obs = -1;
  HistoryId sub = kNoHistory;
  int stage = 0;
};

// Intern pool of private histories, one id space per player.
class HistoryTable {
 public:
  explicit HistoryTable(int players);

  int players() const { return static_cast<int>(nodes_.size()); }
  std::size_t size(int player) const { return nodes_[player].size(); }

  HistoryId Intern(int player, HistoryId parent, ActionId u, ObsId z, HistoryId sub);
  // kNoHistory when the extension was never interned.
  HistoryId Find(int player, HistoryId parent, ActionId u, ObsId z, HistoryId sub) const;

  const HistoryNode& node(int player, HistoryId h) const { return nodes_[player][h]; }
  int stage(int player, HistoryId h) const { return nodes_[player][h].stage; }
  // History of player `to` contained in history h of player `from` (to <= from).
  HistoryId Project(int from, HistoryId h, int to) const;

  // Own (action, signal) sequence, for display.
  std::string Describe(const DecPomdpModel& model, int player, HistoryId h) const;

 private:
  struct Key {
    HistoryId parent;
    ActionId u;
    ObsId z;
    HistoryId sub;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = static_cast<std::uint32_t>(k.parent);
      h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::uint32_t>(k.u);
      h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::uint32_t>(k.z);
      h = h * 0x9E3779B97F4A7C15ULL + static_cast<std::uint32_t>(k.sub);
      return static_cast<std::size_t>(h ^ (h >> 29));
    }
  };
  std::vector<std::vector<HistoryNode>> nodes_;
  std::vector<std::unordered_map<Key, HistoryId, KeyHash>> index_;
};

}  // namespace hpbvi

#endif  // HPBVI_HISTORY_HPP_
