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

#ifndef HPBVI_BASELINES_HPP_
#define HPBVI_BASELINES_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "hpbvi/history.hpp"
#include "hpbvi/model.hpp"

namespace hpbvi {

struct IqlConfig {
  int episodes = 100000;
  // Learning rate initial / (1 + decay * episode).
  double lr_initial = 0.1;
  double lr_decay = 0.0;
  // Apply an episode's updates last step first, once it ends, so a reward
  // reaches the early histories within one episode.
  bool backward_updates = true;
  // Initial Q of a history with k steps to go is k times this; an upper
  // bound on the per-step reward makes untried actions look worth trying.
  // Unset means the model's largest reward.
  std::optional<double> q_init_per_step;
  // Exploration falls linearly from initial to final over decay_episodes.
  double eps_initial = 1.0;
  double eps_final = 0.05;
  int eps_decay_episodes = 50000;
  std::uint64_t seed = 0;
  // Exact evaluation of the greedy policy every this many episodes; the last
  // episode is always evaluated.
  int eval_every = 10000;
  // Guard on Q entries summed over players.
  std::size_t max_table_entries = 50'000'000;
};

// Greedy action of every player on the private histories it visited. An
// unvisited history plays action 0, as does everything below it.
struct IqlPolicy {
  std::shared_ptr<HistoryTable> histories;
  std::vector<std::vector<ActionId>> greedy;  // [player][history id]

  ActionId act(int player, HistoryId h) const;
};

struct IqlResult {
  IqlPolicy policy;
  // (episodes trained, exact value of the greedy policy)
  std::vector<std::pair<int, double>> curve;
  double value = 0.0;
  double wall_s = 0.0;
  // Final tables, [player][history * |U_i| + u].
  std::vector<std::vector<double>> q;
};

// Throws std::invalid_argument on a bad config and GuardError when the
// tables outgrow max_table_entries.
IqlResult iql_train(const DecPomdpModel& model, const IqlConfig& config);

// Exact expected return of the policy from the initial belief.
double evaluate_iql_policy(const DecPomdpModel& model, const IqlPolicy& policy);

}  // namespace hpbvi

#endif  // HPBVI_BASELINES_HPP_
