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

#include "hpbvi/benchgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/format.h>

namespace hpbvi {

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kTiger: return "tiger";
    case Family::kRecycling: return "recycling";
    case Family::kMabc: return "mabc";
    case Family::kGrid3x3: return "grid3x3";
  }
  return "?";
}

std::optional<Family> parse_family(std::string_view name) {
  for (Family f : {Family::kTiger, Family::kRecycling, Family::kMabc,
                   Family::kGrid3x3}) {
    if (family_name(f) == name) return f;
  }
  return std::nullopt;
}

namespace {

int IntPow(int base, int exp) {
  int out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Shared plumbing for families whose state is a tuple of per-player
// components, each evolving independently given the player's own action.
class ProductDynamics : public Dynamics {
 public:
  ProductDynamics(int n, int local_states, int local_actions, int local_obs)
      : n_(n),
        local_states_(local_states),
        states_(std::vector<int>(n, local_states)),
        actions_(std::vector<int>(n, local_actions)),
        obs_(std::vector<int>(n, local_obs)) {}

 protected:
  int local(StateId x, int i) const { return states_.component(x, i); }

  // Enumerates the product of per-player distributions.
  template <typename Local>
  void Product(Local&& local_row, std::vector<std::pair<int, double>>& out,
               const JointSpace& space) const {
    std::vector<std::vector<std::pair<int, double>>> rows(n_);
    for (int i = 0; i < n_; ++i) local_row(i, rows[i]);
    std::vector<int> idx(n_, 0);
    while (true) {
      double p = 1.0;
      int code = 0;
      for (int i = 0; i < n_; ++i) {
        p *= rows[i][idx[i]].second;
        code += rows[i][idx[i]].first * space.stride(i);
      }
      if (p > 0.0) out.push_back({code, p});
      int i = 0;
      while (i < n_ && ++idx[i] == static_cast<int>(rows[i].size())) {
        idx[i] = 0;
        ++i;
      }
      if (i == n_) break;
    }
  }

  int n_;
  int local_states_;
  JointSpace states_;
  JointSpace actions_;
  JointSpace obs_;
};

// ---------------------------------------------------------------- tiger

class TigerDynamics : public Dynamics {
 public:
  TigerDynamics(int n, double accuracy)
      : n_(n), accuracy_(accuracy), actions_(std::vector<int>(n, 3)),
        obs_(std::vector<int>(n, 2)) {}

  void Transition(StateId x, JointAction u,
                  std::vector<std::pair<StateId, double>>& out) const override {
    if (u == 0) {  // every player listens
      out.push_back({x, 1.0});
    } else {
      out.push_back({0, 0.5});
      out.push_back({1, 0.5});
    }
  }

  void Observation(JointAction u, StateId y,
                   std::vector<std::pair<JointObs, double>>& out) const override {
    for (JointObs z = 0; z < obs_.size(); ++z) {
      double p = 1.0;
      for (int i = 0; i < n_; ++i) {
        if (u == 0) {
          p *= obs_.component(z, i) == y ? accuracy_ : 1.0 - accuracy_;
        } else {
          p *= 0.5;
        }
      }
      out.push_back({z, p});
    }
  }

  double Reward(StateId x, JointAction u) const override {
    double r = 0.0;
    int wrong = 0;
    for (int i = 0; i < n_; ++i) {
      const int a = actions_.component(u, i);
      if (a == 0) {
        r -= 1.0;
      } else {
        // open-left (1) is good when the tiger is right (x = 1)
        const bool good = (a == 1) == (x == 1);
        if (good) {
          r += 10.0;
        } else {
          ++wrong;
        }
      }
    }
    if (wrong > 0) r -= 100.0 / wrong;
    return r;
  }

 private:
  int n_;
  double accuracy_;
  JointSpace actions_;
  JointSpace obs_;
};

DecPomdpModel MakeTiger(const BenchmarkSpec& spec, const GeneratorOptions& opt) {
  ModelLabels labels;
  labels.states = {"tiger-left", "tiger-right"};
  for (int i = 0; i < spec.n_players; ++i) {
    labels.actions.push_back({"listen", "open-left", "open-right"});
    labels.observations.push_back({"hear-left", "hear-right"});
  }
  return DecPomdpModel(
      std::move(labels),
      std::make_shared<TigerDynamics>(spec.n_players, opt.tiger_accuracy),
      {0.5, 0.5}, spec.discount, spec.horizon);
}

// ------------------------------------------------------------ recycling

// Local battery: 0 high, 1 low. Actions: 0 small, 1 big, 2 recharge.
class RecyclingDynamics : public ProductDynamics {
 public:
  RecyclingDynamics(int n, RecyclingParams p)
      : ProductDynamics(n, 2, 3, 2), p_(p) {}

  void Transition(StateId x, JointAction u,
                  std::vector<std::pair<StateId, double>>& out) const override {
    std::vector<std::pair<int, double>> rows;
    Product(
        [&](int i, std::vector<std::pair<int, double>>& row) {
          const int b = local(x, i);
          const int a = actions_.component(u, i);
          if (a == 2) {
            row.push_back({0, 1.0});
          } else if (b == 0) {
            const double stay =
                a == 0 ? p_.high_stays_high_small : p_.high_stays_high_big;
            row.push_back({0, stay});
            row.push_back({1, 1.0 - stay});
          } else {
            // a flat battery is rescued and recharged
            const double flat =
                a == 0 ? p_.low_depletes_small : p_.low_depletes_big;
            row.push_back({0, flat});
            row.push_back({1, 1.0 - flat});
          }
        },
        rows, states_);
    out.insert(out.end(), rows.begin(), rows.end());
  }

  void Observation(JointAction, StateId y,
                   std::vector<std::pair<JointObs, double>>& out) const override {
    out.push_back({y, 1.0});  // own battery level, exact
  }

  // Expectation over which low-battery searchers run flat.
  double Reward(StateId x, JointAction u) const override {
    std::vector<int> at_risk;
    for (int i = 0; i < n_; ++i) {
      if (actions_.component(u, i) != 2 && local(x, i) == 1) at_risk.push_back(i);
    }
    double total = 0.0;
    const int k = static_cast<int>(at_risk.size());
    for (int mask = 0; mask < (1 << k); ++mask) {
      double p = 1.0;
      std::vector<bool> flat(n_, false);
      for (int j = 0; j < k; ++j) {
        const int i = at_risk[j];
        const double q = actions_.component(u, i) == 0 ? p_.low_depletes_small
                                                       : p_.low_depletes_big;
        if (mask >> j & 1) {
          flat[i] = true;
          p *= q;
        } else {
          p *= 1.0 - q;
        }
      }
      if (p == 0.0) continue;
      double r = 0.0;
      int carry_big = 0;
      for (int i = 0; i < n_; ++i) {
        const int a = actions_.component(u, i);
        if (a == 2) continue;
        if (flat[i]) {
          r += p_.rescue_penalty;
        } else if (a == 0) {
          r += p_.small_reward;
        } else {
          ++carry_big;
        }
      }
      if (carry_big == n_) {
        r += p_.big_reward * n_;
      } else if (carry_big > 0) {
        r += p_.big_penalty;
      }
      total += p * r;
    }
    return total;
  }

 private:
  RecyclingParams p_;
};

DecPomdpModel MakeRecycling(const BenchmarkSpec& spec,
                            const GeneratorOptions& opt) {
  const int n = spec.n_players;
  ModelLabels labels;
  for (int x = 0; x < IntPow(2, n); ++x) {
    std::string s;
    for (int i = 0; i < n; ++i) s += (x >> i & 1) ? 'l' : 'h';
    labels.states.push_back(s);
  }
  for (int i = 0; i < n; ++i) {
    labels.actions.push_back({"small", "big", "recharge"});
    labels.observations.push_back({"high", "low"});
  }
  std::vector<double> start(labels.states.size(), 0.0);
  start[0] = 1.0;
  return DecPomdpModel(std::move(labels),
                       std::make_shared<RecyclingDynamics>(n, opt.recycling),
                       std::move(start), spec.discount, spec.horizon);
}

// ----------------------------------------------------------------- mabc

// Local buffer: 0 empty, 1 full. Actions: 0 send, 1 idle.
class MabcDynamics : public ProductDynamics {
 public:
  MabcDynamics(int n, std::vector<double> fill, MabcSignal signal,
               double accuracy)
      : ProductDynamics(n, 2, 2, 2),
        fill_(std::move(fill)),
        signal_(signal),
        accuracy_(accuracy) {}

  void Transition(StateId x, JointAction u,
                  std::vector<std::pair<StateId, double>>& out) const override {
    std::vector<std::pair<int, double>> rows;
    Product(
        [&](int i, std::vector<std::pair<int, double>>& row) {
          const bool full = local(x, i) == 1;
          const bool send = actions_.component(u, i) == 0;
          if (full && !send) {
            row.push_back({1, 1.0});
          } else {
            const double f = fill_[i];
            row.push_back({0, 1.0 - f});
            row.push_back({1, f});
          }
        },
        rows, states_);
    out.insert(out.end(), rows.begin(), rows.end());
  }

  void Observation(JointAction u, StateId y,
                   std::vector<std::pair<JointObs, double>>& out) const override {
    int senders = 0;
    for (int i = 0; i < n_; ++i) senders += actions_.component(u, i) == 0;
    std::vector<std::pair<int, double>> rows;
    Product(
        [&](int i, std::vector<std::pair<int, double>>& row) {
          // signal 0: collision / empty buffer, 1: clear / full buffer
          const int truth = signal_ == MabcSignal::kCollision
                                ? (senders > 1 ? 0 : 1)
                                : local(y, i);
          row.push_back({truth, accuracy_});
          row.push_back({1 - truth, 1.0 - accuracy_});
        },
        rows, obs_);
    out.insert(out.end(), rows.begin(), rows.end());
  }

  double Reward(StateId x, JointAction u) const override {
    int senders = 0, sender = -1;
    for (int i = 0; i < n_; ++i) {
      if (actions_.component(u, i) == 0) {
        ++senders;
        sender = i;
      }
    }
    return senders == 1 && local(x, sender) == 1 ? 1.0 : 0.0;
  }

 private:
  std::vector<double> fill_;
  MabcSignal signal_;
  double accuracy_;
};

DecPomdpModel MakeMabc(const BenchmarkSpec& spec, const GeneratorOptions& opt) {
  const int n = spec.n_players;
  if (opt.mabc_fill.empty()) throw ModelError("mabc needs fill probabilities");
  std::vector<double> fill;
  for (int i = 0; i < n; ++i) fill.push_back(opt.mabc_fill[i % opt.mabc_fill.size()]);
  ModelLabels labels;
  for (int x = 0; x < IntPow(2, n); ++x) {
    std::string s;
    for (int i = 0; i < n; ++i) s += (x >> i & 1) ? 'f' : 'e';
    labels.states.push_back(s);
  }
  for (int i = 0; i < n; ++i) {
    labels.actions.push_back({"send", "idle"});
    if (opt.mabc_signal == MabcSignal::kCollision) {
      labels.observations.push_back({"collision", "clear"});
    } else {
      labels.observations.push_back({"empty", "full"});
    }
  }
  std::vector<double> start(labels.states.size(), 0.0);
  start.back() = 1.0;  // every buffer full
  return DecPomdpModel(
      std::move(labels),
      std::make_shared<MabcDynamics>(n, std::move(fill), opt.mabc_signal,
                                     opt.mabc_accuracy),
      std::move(start), spec.discount, spec.horizon);
}

// -------------------------------------------------------------- grid3x3

// Local position: cell r*3+c. Actions: north, south, west, east, stay.
class GridDynamics : public ProductDynamics {
 public:
  GridDynamics(int n, double success)
      : ProductDynamics(n, 9, 5, 9), success_(success) {}

  static int Move(int cell, int action) {
    int r = cell / 3, c = cell % 3;
    switch (action) {
      case 0: r = std::max(0, r - 1); break;
      case 1: r = std::min(2, r + 1); break;
      case 2: c = std::max(0, c - 1); break;
      case 3: c = std::min(2, c + 1); break;
      default: break;
    }
    return r * 3 + c;
  }

  void Transition(StateId x, JointAction u,
                  std::vector<std::pair<StateId, double>>& out) const override {
    std::vector<std::pair<int, double>> rows;
    Product(
        [&](int i, std::vector<std::pair<int, double>>& row) {
          const int cell = local(x, i);
          const int target = Move(cell, actions_.component(u, i));
          if (target == cell) {
            row.push_back({cell, 1.0});
          } else {
            row.push_back({cell, 1.0 - success_});
            row.push_back({target, success_});
          }
        },
        rows, states_);
    out.insert(out.end(), rows.begin(), rows.end());
  }

  void Observation(JointAction, StateId y,
                   std::vector<std::pair<JointObs, double>>& out) const override {
    out.push_back({y, 1.0});
  }

  double Reward(StateId x, JointAction) const override {
    int top_left = 0, bottom_right = 0;
    for (int i = 0; i < n_; ++i) {
      top_left += local(x, i) == 0;
      bottom_right += local(x, i) == 8;
    }
    return std::max(0, std::max(top_left, bottom_right) - 1);
  }

 private:
  double success_;
};

DecPomdpModel MakeGrid(const BenchmarkSpec& spec, const GeneratorOptions& opt) {
  const int n = spec.n_players;
  ModelLabels labels;
  const int count = IntPow(9, n);
  for (int x = 0; x < count; ++x) {
    std::string s;
    int rest = x;
    for (int i = 0; i < n; ++i) {
      if (i > 0) s += '.';
      s += fmt::format("c{}", rest % 9);
      rest /= 9;
    }
    labels.states.push_back(s);
  }
  std::vector<std::string> cells;
  for (int c = 0; c < 9; ++c) cells.push_back(fmt::format("c{}", c));
  for (int i = 0; i < n; ++i) {
    labels.actions.push_back({"north", "south", "west", "east", "stay"});
    labels.observations.push_back(cells);
  }
  std::vector<double> start(count, 1.0 / count);
  return DecPomdpModel(std::move(labels),
                       std::make_shared<GridDynamics>(n, opt.grid_success),
                       std::move(start), spec.discount, spec.horizon);
}

}  // namespace

DecPomdpModel generate(const BenchmarkSpec& spec, const GeneratorOptions& options) {
  if (spec.n_players < 2)
    throw ModelError(fmt::format("{} needs at least 2 players, got {}",
                                 family_name(spec.family), spec.n_players));
  if (spec.horizon <= 0) throw ModelError("horizon must be positive");
  if (!(spec.discount > 0.0 && spec.discount <= 1.0))
    throw ModelError("discount must lie in (0,1]");
  switch (spec.family) {
    case Family::kTiger: return MakeTiger(spec, options);
    case Family::kRecycling: return MakeRecycling(spec, options);
    case Family::kMabc: return MakeMabc(spec, options);
    case Family::kGrid3x3: return MakeGrid(spec, options);
  }
  throw ModelError("unsupported family");
}

}  // namespace hpbvi
