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

#include "hpbvi/baselines.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <limits>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

#include "hpbvi/subgame.hpp"
#include "hpbvi/valuefn.hpp"

namespace hpbvi {

namespace {

void validate(const IqlConfig& c) {
  auto rate = [](double v) { return v > 0.0 && v <= 1.0; };
  auto prob = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (c.episodes <= 0) throw std::invalid_argument("episodes must be positive");
  if (!rate(c.lr_initial)) throw std::invalid_argument("learning rate must lie in (0,1]");
  if (c.lr_decay < 0.0) throw std::invalid_argument("learning-rate decay must be nonnegative");
  if (!prob(c.eps_initial) || !prob(c.eps_final))
    throw std::invalid_argument("exploration rates must lie in [0,1]");
  if (c.eval_every <= 0) throw std::invalid_argument("eval_every must be positive");
}

// Marks a player whose history left the visited set; it plays action 0 from
// then on, so the history itself no longer matters.
constexpr HistoryId kUnvisited = -2;

struct Positions {
  StateId x;
  std::array<HistoryId, kMaxPlayers> h;
  bool operator==(const Positions&) const = default;
};

struct PositionsHash {
  std::size_t operator()(const Positions& p) const {
    std::uint64_t v = static_cast<std::uint32_t>(p.x);
    for (HistoryId h : p.h) v = v * 0x9E3779B97F4A7C15ULL + static_cast<std::uint32_t>(h);
    return static_cast<std::size_t>(v ^ (v >> 31));
  }
};

}  // namespace

ActionId IqlPolicy::act(int player, HistoryId h) const {
  if (h < 0 || static_cast<std::size_t>(h) >= greedy[player].size()) return 0;
  return greedy[player][h];
}

double evaluate_iql_policy(const DecPomdpModel& model, const IqlPolicy& policy) {
  const int n = model.num_players();
  const JointSpace& ua = model.actions();
  const JointSpace& uz = model.observations();
  const HistoryTable& table = *policy.histories;
  std::unordered_map<Positions, double, PositionsHash> layer;
  for (StateId x = 0; x < model.num_states(); ++x) {
    if (model.initial_belief()[x] <= 0.0) continue;
    Positions p{x, {}};
    p.h.fill(kRootHistory);
    layer[p] += model.initial_belief()[x];
  }
  double value = 0.0;
  double weight = 1.0;
  for (int t = 0; t < model.horizon(); ++t) {
    std::unordered_map<Positions, double, PositionsHash> next;
    for (const auto& [p, prob] : layer) {
      std::array<ActionId, kMaxPlayers> act{};
      JointAction u = 0;
      for (int i = 0; i < n; ++i) {
        act[i] = p.h[i] == kUnvisited ? 0 : policy.act(i, p.h[i]);
        u += act[i] * ua.stride(i);
      }
      value += weight * prob * model.reward(p.x, u);
      if (t + 1 == model.horizon()) continue;
      model.ForEachOutcome(p.x, u, [&](const Outcome& o) {
        Positions q{o.next, {}};
        HistoryId below = kNoHistory;
        for (int i = 0; i < n; ++i) {
          HistoryId h = kUnvisited;
          if (p.h[i] != kUnvisited && (i == 0 || below != kUnvisited))
            h = table.Find(i, p.h[i], act[i], uz.component(o.obs, i), i == 0 ? kNoHistory : below);
          if (h == kNoHistory) h = kUnvisited;
          q.h[i] = h;
          below = h;
        }
        next[q] += prob * o.prob;
      });
    }
    layer = std::move(next);
    weight *= model.discount();
  }
  return value;
}

IqlResult iql_train(const DecPomdpModel& model, const IqlConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const int n = model.num_players();
  if (n > kMaxPlayers) throw ModelError("too many players");
  const JointSpace& ua = model.actions();
  const JointSpace& uz = model.observations();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::discrete_distribution<StateId> initial(model.initial_belief().begin(),
                                              model.initial_belief().end());

  IqlResult out;
  out.policy.histories = std::make_shared<HistoryTable>(n);
  HistoryTable& table = *out.policy.histories;
  std::vector<std::vector<double>> q(n);  // [player][history * |U_i| + u]
  std::size_t entries = 0;
  double q_init = -std::numeric_limits<double>::infinity();
  if (config.q_init_per_step) {
    q_init = *config.q_init_per_step;
  } else {
    for (StateId x = 0; x < model.num_states(); ++x)
      for (JointAction u = 0; u < ua.size(); ++u) q_init = std::max(q_init, model.reward(x, u));
  }
  auto row = [&](int i, HistoryId h) -> double* {
    const std::size_t width = ua.radix(i);
    const std::size_t need = (static_cast<std::size_t>(h) + 1) * width;
    if (q[i].size() < need) {
      entries += need - q[i].size();
      if (entries > config.max_table_entries)
        throw GuardError(fmt::format("Q tables exceed {} entries", config.max_table_entries));
      const std::size_t from = q[i].size() / width;
      q[i].resize(need, 0.0);
      for (std::size_t g = from; g * width < need; ++g) {
        const double togo = model.horizon() - table.stage(i, static_cast<HistoryId>(g));
        std::fill_n(q[i].begin() + g * width, width, q_init * togo);
      }
    }
    return q[i].data() + static_cast<std::size_t>(h) * width;
  };
  auto greedy = [&](int i, const double* r) {
    return static_cast<ActionId>(std::max_element(r, r + ua.radix(i)) - r);
  };
  auto snapshot = [&]() {
    out.policy.greedy.assign(n, {});
    for (int i = 0; i < n; ++i) {
      const std::size_t rows = table.size(i);
      out.policy.greedy[i].resize(rows, 0);
      for (std::size_t h = 0; h < rows; ++h)
        if (q[i].size() >= (h + 1) * ua.radix(i))
          out.policy.greedy[i][h] = greedy(i, q[i].data() + h * ua.radix(i));
    }
    return evaluate_iql_policy(model, out.policy);
  };

  struct Step {
    std::array<HistoryId, kMaxPlayers> h, h_next;
    std::array<ActionId, kMaxPlayers> act;
    double r;
  };
  std::vector<Step> episode_steps(model.horizon());
  auto update = [&](const Step& st, bool last, double lr) {
    for (int i = 0; i < n; ++i) {
      double target = st.r;
      if (!last) {
        const double* nr = row(i, st.h_next[i]);
        target += model.discount() * *std::max_element(nr, nr + ua.radix(i));
      }
      double& cell = row(i, st.h[i])[st.act[i]];
      cell += lr * (target - cell);
    }
  };
  for (int episode = 0; episode < config.episodes; ++episode) {
    const double lr = config.lr_initial / (1.0 + config.lr_decay * episode);
    const double frac = config.eps_decay_episodes > 0
                            ? std::min(1.0, static_cast<double>(episode) / config.eps_decay_episodes)
                            : 1.0;
    const double eps = config.eps_initial + frac * (config.eps_final - config.eps_initial);
    StateId x = initial(rng);
    std::array<HistoryId, kMaxPlayers> h{};
    h.fill(kRootHistory);
    for (int t = 0; t < model.horizon(); ++t) {
      Step& st = episode_steps[t];
      st.h = h;
      JointAction u = 0;
      for (int i = 0; i < n; ++i) {
        if (unit(rng) < eps) {
          st.act[i] = std::uniform_int_distribution<ActionId>(0, ua.radix(i) - 1)(rng);
        } else {
          st.act[i] = greedy(i, row(i, h[i]));
        }
        u += st.act[i] * ua.stride(i);
      }
      st.r = model.reward(x, u);
      const double draw = unit(rng);
      double acc = 0.0;
      Outcome picked{};
      bool found = false;
      model.ForEachOutcome(x, u, [&](const Outcome& o) {
        if (found) return;
        picked = o;
        acc += o.prob;
        if (draw < acc) found = true;
      });
      const bool last = t + 1 == model.horizon();
      HistoryId below = kNoHistory;
      for (int i = 0; i < n && !last; ++i) {
        st.h_next[i] = table.Intern(i, h[i], st.act[i], uz.component(picked.obs, i),
                                    i == 0 ? kNoHistory : below);
        below = st.h_next[i];
      }
      if (!config.backward_updates) update(st, last, lr);
      x = picked.next;
      h = st.h_next;
    }
    if (config.backward_updates)
      for (int t = model.horizon() - 1; t >= 0; --t)
        update(episode_steps[t], t + 1 == model.horizon(), lr);
    if ((episode + 1) % config.eval_every == 0 || episode + 1 == config.episodes)
      out.curve.emplace_back(episode + 1, snapshot());
  }
  out.value = out.curve.back().second;
  out.q = std::move(q);
  out.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace hpbvi
