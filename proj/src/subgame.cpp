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

#include "hpbvi/subgame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/format.h>

namespace hpbvi {

namespace {

// Unnormalized top-level rows: q[t][u] = sum over entries of top history t of
// prob * beta(entry, u).
std::vector<double> top_rows(const OccupancyState& s, const HistoryLevels& levels,
                             const BetaTable& beta) {
  const std::size_t nu = static_cast<std::size_t>(beta.num_actions);
  const std::size_t tops = levels.ids.back().size();
  std::vector<double> q(tops * nu, 0.0);
  auto entries = s.entries();
  for (std::size_t k = 0; k < entries.size(); ++k) {
    double* row = q.data() + levels.entry_top[k] * nu;
    auto b = beta.row(k);
    for (std::size_t u = 0; u < nu; ++u) row[u] += entries[k].prob * b[u];
  }
  return q;
}

void check_table(const DecPomdpModel& model, const OccupancyState& s, const BetaTable& beta) {
  if (beta.num_actions != model.actions().size() ||
      beta.values.size() != s.size() * static_cast<std::size_t>(beta.num_actions))
    throw ModelError("beta table does not match the occupancy support");
}

std::int64_t round_key(double v, double tolerance) {
  return static_cast<std::int64_t>(std::llround(v / tolerance));
}

}  // namespace

double enum_candidates(const DecPomdpModel& model, const OccupancyState& s) {
  const HistoryLevels levels = build_levels(s);
  double count = 1.0;
  for (int i = 0; i + 1 < model.num_players(); ++i)
    count *= std::pow(static_cast<double>(model.actions().radix(i)),
                      static_cast<double>(levels.ids[i].size()));
  return count;
}

SubgameSolution solve_enum(const DecPomdpModel& model, const OccupancyState& s,
                           const BetaTable& beta, const EnumOptions& options) {
  check_table(model, s, beta);
  const int n = model.num_players();
  const JointSpace& ua = model.actions();
  const HistoryLevels levels = build_levels(s);
  const double count = enum_candidates(model, s);
  if (options.max_candidates > 0 && count > options.max_candidates)
    throw GuardError(fmt::format("{:.3g} candidate rules exceed the guard of {:.3g}", count,
                                 options.max_candidates));

  const std::vector<double> q = top_rows(s, levels, beta);
  const std::size_t nu = static_cast<std::size_t>(ua.size());
  const std::size_t tops = levels.ids[n - 1].size();
  const int top_actions = ua.radix(n - 1);
  const int top_stride = ua.stride(n - 1);

  // chain[i][t]: index in level i of top history t's player-i history.
  std::vector<std::vector<int>> chain(n, std::vector<int>(tops));
  for (std::size_t t = 0; t < tops; ++t) {
    int k = static_cast<int>(t);
    for (int i = n - 1; i >= 0; --i) {
      chain[i][t] = k;
      if (i > 0) k = levels.sub[i][k];
    }
  }

  // Odometer digits over the histories of players 0..n-2, player 0 first.
  std::vector<std::pair<int, int>> digits;  // (player, index)
  for (int i = 0; i + 1 < n; ++i)
    for (std::size_t k = 0; k < levels.ids[i].size(); ++k)
      digits.emplace_back(i, static_cast<int>(k));
  std::vector<std::vector<ActionId>> act(n);
  for (int i = 0; i < n; ++i) act[i].assign(levels.ids[i].size(), 0);

  SubgameSolution best;
  best.value = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<ActionId>> best_act;
  std::vector<ActionId> top_choice(tops), best_top(tops);
  std::uint64_t scored = 0;
  while (true) {
    double v = 0.0;
    for (std::size_t t = 0; t < tops; ++t) {
      int prefix = 0;
      for (int i = 0; i + 1 < n; ++i) prefix += act[i][chain[i][t]] * ua.stride(i);
      const double* row = q.data() + t * nu;
      ActionId arg = 0;
      double m = row[prefix];
      for (int u = 1; u < top_actions; ++u) {
        const double c = row[prefix + u * top_stride];
        if (c > m) {
          m = c;
          arg = u;
        }
      }
      top_choice[t] = arg;
      v += m;
    }
    ++scored;
    if (v > best.value) {
      best.value = v;
      best_act = act;
      best_top = top_choice;
    }
    if (options.deadline && (scored & 1023) == 0 && Clock::now() > *options.deadline)
      throw DeadlineExceeded(fmt::format("enumeration stopped after {} of {:.3g} candidates",
                                         scored, count));
    std::size_t d = 0;
    for (; d < digits.size(); ++d) {
      auto [i, k] = digits[d];
      if (++act[i][k] < ua.radix(i)) break;
      act[i][k] = 0;
    }
    if (d == digits.size()) break;
  }

  best.nodes = scored;
  best.rule.resize(n);
  for (int i = 0; i < n; ++i) {
    best.rule[i].player = i;
    for (std::size_t k = 0; k < levels.ids[i].size(); ++k)
      best.rule[i].actions[levels.ids[i][k]] = i + 1 < n ? best_act[i][k] : best_top[k];
  }
  return best;
}

SubgameSolution solve_hierarchical(const DecPomdpModel& model, const OccupancyState& s,
                                   const BetaTable& beta, const HierarchicalOptions& options) {
  check_table(model, s, beta);
  const int n = model.num_players();
  const JointSpace& ua = model.actions();
  const HistoryLevels levels = build_levels(s);
  const double tol = options.key_tolerance;

  // rows[i][k * width_i + p]: backward value of player-i history k under
  // prefix actions p of players 0..i, normalized by the history's mass when
  // sharing. type[i][k] indexes the distinct rows when sharing.
  std::vector<std::vector<double>> rows(n);
  std::vector<std::vector<int>> type(n);
  std::vector<std::vector<double>> unit_rows(n);  // per type, when sharing
  SubgameSolution out;

  auto width = [&](int i) { return static_cast<std::size_t>(ua.stride(i + 1)); };

  {
    std::vector<double> q = top_rows(s, levels, beta);
    const std::size_t w = width(n - 1);
    const std::size_t tops = levels.ids[n - 1].size();
    if (!options.share) {
      rows[n - 1] = std::move(q);
      out.nodes += tops * w;
    } else {
      std::map<std::vector<std::int64_t>, int> classes;
      type[n - 1].resize(tops);
      for (std::size_t t = 0; t < tops; ++t) {
        const double m = levels.mass[n - 1][t];
        std::vector<std::int64_t> key(w);
        for (std::size_t u = 0; u < w; ++u) key[u] = round_key(q[t * w + u] / m, tol);
        auto [it, inserted] = classes.try_emplace(std::move(key), static_cast<int>(classes.size()));
        type[n - 1][t] = it->second;
        if (inserted) {
          for (std::size_t u = 0; u < w; ++u) unit_rows[n - 1].push_back(q[t * w + u] / m);
        }
      }
      out.nodes += classes.size() * w;
    }
  }

  for (int i = n - 2; i >= 0; --i) {
    const std::size_t w = width(i);
    const std::size_t wc = width(i + 1);
    const int child_actions = ua.radix(i + 1);
    const std::size_t count = levels.ids[i].size();
    // Best response of player i+1 for each prefix p of players 0..i.
    auto reduce = [&](const double* child, double* dst, double scale) {
      for (std::size_t p = 0; p < w; ++p) {
        double m = child[p];
        for (int u = 1; u < child_actions; ++u) m = std::max(m, child[p + u * w]);
        dst[p] += scale * m;
      }
    };
    if (!options.share) {
      rows[i].assign(count * w, 0.0);
      for (std::size_t k = 0; k < levels.ids[i + 1].size(); ++k)
        reduce(rows[i + 1].data() + k * wc, rows[i].data() + levels.sub[i + 1][k] * w, 1.0);
      out.nodes += count * w;
    } else {
      const std::size_t child_types = unit_rows[i + 1].size() / wc;
      std::vector<double> best_child(child_types * w, 0.0);
      for (std::size_t c = 0; c < child_types; ++c)
        reduce(unit_rows[i + 1].data() + c * wc, best_child.data() + c * w, 1.0);
      std::vector<std::map<int, double>> mix(count);
      for (std::size_t k = 0; k < levels.ids[i + 1].size(); ++k)
        mix[levels.sub[i + 1][k]][type[i + 1][k]] += levels.mass[i + 1][k];
      std::map<std::vector<std::int64_t>, int> classes;
      type[i].resize(count);
      for (std::size_t k = 0; k < count; ++k) {
        const double m = levels.mass[i][k];
        std::vector<std::int64_t> key;
        for (const auto& [c, cm] : mix[k]) {
          key.push_back(c);
          key.push_back(round_key(cm / m, tol));
        }
        auto [it, inserted] = classes.try_emplace(std::move(key), static_cast<int>(classes.size()));
        type[i][k] = it->second;
        if (inserted) {
          const std::size_t base = unit_rows[i].size();
          unit_rows[i].resize(base + w, 0.0);
          for (const auto& [c, cm] : mix[k])
            for (std::size_t p = 0; p < w; ++p)
              unit_rows[i][base + p] += cm / m * best_child[c * w + p];
        }
      }
      out.nodes += classes.size() * w;
    }
  }

  auto row_of = [&](int i, std::size_t k) -> const double* {
    const std::size_t w = width(i);
    return options.share ? unit_rows[i].data() + type[i][k] * w : rows[i].data() + k * w;
  };

  // Forward greedy pass.
  out.rule.resize(n);
  std::vector<std::vector<int>> prefix(n);
  out.value = 0.0;
  for (int i = 0; i < n; ++i) {
    out.rule[i].player = i;
    const int stride = ua.stride(i);
    prefix[i].resize(levels.ids[i].size());
    for (std::size_t k = 0; k < levels.ids[i].size(); ++k) {
      const int base = i == 0 ? 0 : prefix[i - 1][levels.sub[i][k]];
      const double* row = row_of(i, k);
      ActionId arg = 0;
      double m = row[base];
      for (int u = 1; u < ua.radix(i); ++u) {
        if (row[base + u * stride] > m) {
          m = row[base + u * stride];
          arg = u;
        }
      }
      out.rule[i].actions[levels.ids[i][k]] = arg;
      prefix[i][k] = base + arg * stride;
      if (i == 0) out.value += options.share ? m * levels.mass[0][k] : m;
    }
  }
  return out;
}

namespace {

struct Leaf {
  std::vector<HistoryId> path;  // histories of players i+1..n-1
  StateId state;
  double weight;
};

NestedBelief build_belief(int player, HistoryId history, int n, std::span<Leaf> leaves,
                          double total) {
  NestedBelief b;
  b.player = player;
  b.history = history;
  if (player == n - 1) {
    for (const Leaf& l : leaves) {
      if (!b.states.empty() && b.states.back().first == l.state)
        b.states.back().second += l.weight / total;
      else
        b.states.emplace_back(l.state, l.weight / total);
    }
    return b;
  }
  const std::size_t depth = static_cast<std::size_t>(n - 1 - player) - 1;
  const std::size_t slot = leaves.front().path.size() - 1 - depth;
  std::size_t lo = 0;
  while (lo < leaves.size()) {
    std::size_t hi = lo;
    double w = 0.0;
    while (hi < leaves.size() && leaves[hi].path[slot] == leaves[lo].path[slot]) w += leaves[hi++].weight;
    NestedBelief child =
        build_belief(player + 1, leaves[lo].path[slot], n, leaves.subspan(lo, hi - lo), w);
    child.prob = w / total;
    b.superiors.push_back(std::move(child));
    lo = hi;
  }
  return b;
}

NestedBelief finish(int player, HistoryId history, int n, std::vector<Leaf> leaves) {
  std::sort(leaves.begin(), leaves.end(), [](const Leaf& a, const Leaf& b) {
    return a.path != b.path ? a.path < b.path : a.state < b.state;
  });
  double total = 0.0;
  for (const Leaf& l : leaves) total += l.weight;
  return build_belief(player, history, n, leaves, total);
}

// Calls f(path histories, path actions, state, weight) for every leaf of b.
template <typename F>
void walk(const NestedBelief& b, const JointDecisionRule& rules, std::vector<HistoryId>& path,
          std::vector<ActionId>& acts, double weight, F&& f) {
  if (b.superiors.empty() && !b.states.empty()) {
    for (const auto& [x, p] : b.states) f(path, acts, x, weight * p);
    return;
  }
  for (const NestedBelief& c : b.superiors) {
    path.push_back(c.history);
    acts.push_back(rules[c.player].at(c.history));
    walk(c, rules, path, acts, weight * c.prob, f);
    path.pop_back();
    acts.pop_back();
  }
}

}  // namespace

NestedBelief compute_nested_belief(const DecPomdpModel& model, const OccupancyState& s,
                                   int player, HistoryId h) {
  const int n = model.num_players();
  const HistoryTable& table = s.histories();
  std::vector<Leaf> leaves;
  for (const auto& e : s.entries()) {
    if (table.Project(n - 1, e.history, player) != h || e.prob <= 0.0) continue;
    Leaf leaf{std::vector<HistoryId>(n - 1 - player), e.state, e.prob};
    for (int j = player + 1; j < n; ++j) leaf.path[j - player - 1] = table.Project(n - 1, e.history, j);
    leaves.push_back(std::move(leaf));
  }
  if (leaves.empty())
    throw ModelError(fmt::format("history {} of player {} has no mass", h, player + 1));
  return finish(player, h, n, std::move(leaves));
}

std::vector<double> predict_observation(const DecPomdpModel& model, const HistoryTable&,
                                        const NestedBelief& b,
                                        std::span<const ActionId> own_actions,
                                        const JointDecisionRule& rules) {
  const int i = b.player;
  const JointSpace& ua = model.actions();
  const JointSpace& uz = model.observations();
  std::vector<double> dist(static_cast<std::size_t>(uz.stride(i + 1)), 0.0);
  JointAction base = 0;
  for (int j = 0; j <= i; ++j) base += own_actions[j] * ua.stride(j);
  std::vector<HistoryId> path;
  std::vector<ActionId> acts;
  walk(b, rules, path, acts, 1.0, [&](const auto&, const auto& a, StateId x, double w) {
    JointAction u = base;
    for (std::size_t k = 0; k < a.size(); ++k) u += a[k] * ua.stride(i + 1 + static_cast<int>(k));
    model.ForEachOutcome(x, u, [&](const Outcome& o) {
      dist[uz.prefix(o.obs, i + 1)] += w * o.prob;
    });
  });
  return dist;
}

NestedBelief update_nested_belief(const DecPomdpModel& model, HistoryTable& table,
                                  const NestedBelief& b, std::span<const ActionId> own_actions,
                                  const JointDecisionRule& rules, int z) {
  const int i = b.player;
  const int n = model.num_players();
  const JointSpace& ua = model.actions();
  const JointSpace& uz = model.observations();
  HistoryId own = kNoHistory;
  for (int j = 0; j <= i; ++j)
    own = table.Intern(j, table.Project(i, b.history, j), own_actions[j], uz.component(z, j), own);
  JointAction base = 0;
  for (int j = 0; j <= i; ++j) base += own_actions[j] * ua.stride(j);

  std::vector<Leaf> leaves;
  std::vector<HistoryId> path;
  std::vector<ActionId> acts;
  walk(b, rules, path, acts, 1.0, [&](const auto& hs, const auto& a, StateId x, double w) {
    JointAction u = base;
    for (std::size_t k = 0; k < a.size(); ++k) u += a[k] * ua.stride(i + 1 + static_cast<int>(k));
    model.ForEachOutcome(x, u, [&](const Outcome& o) {
      if (uz.prefix(o.obs, i + 1) != z) return;
      Leaf leaf{std::vector<HistoryId>(hs.size()), o.next, w * o.prob};
      HistoryId below = own;
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const int j = i + 1 + static_cast<int>(k);
        below = table.Intern(j, hs[k], a[k], uz.component(o.obs, j), below);
        leaf.path[k] = below;
      }
      leaves.push_back(std::move(leaf));
    });
  });
  double total = 0.0;
  for (const Leaf& l : leaves) total += l.weight;
  if (total <= 0.0)
    throw ModelError(fmt::format("signal {} has zero probability for player {}", z, i + 1));
  return finish(i, own, n, std::move(leaves));
}

double nested_belief_gap(const NestedBelief& a, const NestedBelief& b) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (a.player != b.player || a.history != b.history) return kInf;
  double gap = std::abs(a.prob - b.prob);
  if (a.states.size() != b.states.size() || a.superiors.size() != b.superiors.size()) return kInf;
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    if (a.states[k].first != b.states[k].first) return kInf;
    gap = std::max(gap, std::abs(a.states[k].second - b.states[k].second));
  }
  for (std::size_t k = 0; k < a.superiors.size(); ++k)
    gap = std::max(gap, nested_belief_gap(a.superiors[k], b.superiors[k]));
  return gap;
}

namespace {

std::vector<std::int64_t> belief_key(const NestedBelief& b, double tolerance) {
  std::vector<std::int64_t> key;
  if (b.superiors.empty()) {
    key.push_back(-1);
    key.push_back(static_cast<std::int64_t>(b.states.size()));
    for (const auto& [x, p] : b.states) {
      key.push_back(x);
      key.push_back(round_key(p, tolerance));
    }
    return key;
  }
  std::map<std::vector<std::int64_t>, double> mix;
  for (const NestedBelief& c : b.superiors) mix[belief_key(c, tolerance)] += c.prob;
  key.push_back(-2);
  key.push_back(static_cast<std::int64_t>(mix.size()));
  for (const auto& [k, p] : mix) {
    key.push_back(round_key(p, tolerance));
    key.push_back(static_cast<std::int64_t>(k.size()));
    key.insert(key.end(), k.begin(), k.end());
  }
  return key;
}

}  // namespace

std::vector<std::int64_t> b1_lookup_key(const NestedBelief& b,
                                        std::span<const ActionId> subordinate_actions,
                                        double tolerance) {
  std::vector<std::int64_t> key = belief_key(b, tolerance);
  key.push_back(-3);
  key.push_back(static_cast<std::int64_t>(subordinate_actions.size()));
  key.insert(key.end(), subordinate_actions.begin(), subordinate_actions.end());
  return key;
}

}  // namespace hpbvi
