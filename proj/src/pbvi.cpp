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

#include "hpbvi/pbvi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

namespace hpbvi {

namespace {

constexpr double kImprovement = 1e-12;
constexpr std::size_t kMaxSeeds = 6;
constexpr int kRefineRounds = 8;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

OccupancyState compress(const DecPomdpModel& model, const OccupancyState& s,
                        const SolverConfig& config) {
  if (config.compression != Compression::kB1B2 || s.empty()) return s;
  return cluster_histories(model, s).compressed;
}

SubgameSolution solve_subgame(const DecPomdpModel& model, const OccupancyState& s,
                              const BetaTable& beta, const SolverConfig& config,
                              std::optional<Clock::time_point> deadline) {
  if (config.backup == BackupKind::kEnum) {
    EnumOptions opt;
    opt.max_candidates = config.enum_max_candidates;
    opt.deadline = deadline;
    return solve_enum(model, s, beta, opt);
  }
  HierarchicalOptions opt;
  opt.share = config.compression != Compression::kNone;
  return solve_hierarchical(model, s, beta, opt);
}

// A rule with the best continuation per player-0 signal.
struct Candidate {
  JointDecisionRule rule;
  std::vector<std::size_t> next;
  double value = -std::numeric_limits<double>::infinity();
};

// With clustering, successors are valued in compressed form; the chosen
// continuations are later relabeled so the raw successor gets that value.
Candidate with_best_branches(const DecPomdpModel& model, const OccupancyState& s,
                             JointDecisionRule rule, std::span<const AlphaPtr> V_next,
                             const SolverConfig& config) {
  Candidate c;
  c.value = expected_reward(model, s, rule);
  const int signals = model.observations().radix(0);
  c.next.assign(signals, 0);
  for (ObsId z = 0; z < signals; ++z) {
    auto [succ, p] = next_occupancy(model, s, rule, z);
    if (p <= 0.0) continue;
    auto [v, k] = value_at(model, compress(model, succ, config), V_next);
    c.value += model.discount() * p * v;
    c.next[z] = k;
  }
  c.rule = std::move(rule);
  return c;
}

// Continuation for signal z: alpha itself, or a copy that sends every raw
// successor history to the node of its cluster representative.
AlphaPtr continuation(const DecPomdpModel& model, const OccupancyState& s,
                      const JointDecisionRule& rule, ObsId z, const AlphaPtr& alpha,
                      const SolverConfig& config) {
  if (config.compression != Compression::kB1B2 || alpha->is_zero()) return alpha;
  auto [succ, p] = next_occupancy(model, s, rule, z);
  if (p <= 0.0) return alpha;
  const ClusterResult cr = cluster_histories(model, succ);
  const int n = model.num_players();
  const HistoryTable& table = succ.histories();
  std::vector<std::unordered_map<HistoryId, HistoryId>> extra(n);
  std::array<HistoryId, kMaxPlayers> nodes{};
  HistoryId last = kNoHistory;
  for (const auto& e : succ.entries()) {
    if (e.history == last) continue;
    last = e.history;
    auto it = cr.label[n - 1].find(e.history);
    const HistoryId rep = it == cr.label[n - 1].end() ? e.history : it->second;
    alpha->MapHistory(rep, std::span<HistoryId>(nodes.data(), n));
    for (int i = 0; i < n; ++i) {
      auto [slot, fresh] = extra[i].try_emplace(table.Project(n - 1, e.history, i), nodes[i]);
      if (!fresh && slot->second != nodes[i])
        throw ModelError("cluster labels disagree on a private history");
    }
  }
  return AlphaVector::Relabeled(*alpha, extra);
}

BetaTable beta_for(const DecPomdpModel& model, const OccupancyState& s,
                   std::span<const AlphaPtr> V_next, std::span<const std::size_t> next) {
  std::vector<AlphaPtr> cont;
  for (std::size_t k : next) cont.push_back(V_next[k]);
  return tabulate(model, BetaVector(model, s.stage(), std::move(cont)), s);
}

// Every deterministic joint rule over the histories of s, capped.
std::vector<JointDecisionRule> all_rules(const DecPomdpModel& model, const OccupancyState& s) {
  const HistoryLevels levels = build_levels(s);
  const int n = model.num_players();
  double count = 1.0;
  for (int i = 0; i < n; ++i)
    count *= std::pow(model.actions().radix(i), static_cast<double>(levels.ids[i].size()));
  if (count > 1e5)
    throw GuardError(fmt::format("exhaustive expansion needs {:.3g} rules", count));
  std::vector<std::pair<int, HistoryId>> digits;
  for (int i = 0; i < n; ++i)
    for (HistoryId h : levels.ids[i]) digits.emplace_back(i, h);
  JointDecisionRule rule(n);
  for (int i = 0; i < n; ++i) {
    rule[i].player = i;
    for (HistoryId h : levels.ids[i]) rule[i].actions[h] = 0;
  }
  std::vector<JointDecisionRule> out;
  while (true) {
    out.push_back(rule);
    std::size_t d = 0;
    for (; d < digits.size(); ++d) {
      auto [i, h] = digits[d];
      if (++rule[i].actions[h] < model.actions().radix(i)) break;
      rule[i].actions[h] = 0;
    }
    if (d == digits.size()) break;
  }
  return out;
}

bool rule_covers(const JointDecisionRule& rule, const HistoryLevels& levels) {
  if (rule.size() != levels.ids.size()) return false;
  for (std::size_t i = 0; i < rule.size(); ++i)
    for (HistoryId h : levels.ids[i])
      if (!rule[i].defines(h)) return false;
  return true;
}

}  // namespace

std::size_t PointSet::size() const {
  std::size_t total = 0;
  for (const auto& stage : stages) total += stage.size();
  return total;
}

BackupResult backup(const DecPomdpModel& model, const OccupancyState& original,
                    std::span<const AlphaPtr> V_next, const SolverConfig& config,
                    std::span<const JointDecisionRule> seeds,
                    const std::vector<std::vector<double>>* mdp,
                    std::optional<Clock::time_point> until) {
  if (V_next.empty()) throw ModelError("backup needs a nonempty next-stage collection");
  std::optional<Clock::time_point> deadline = until;
  if (config.backup_cap_secs > 0) {
    const auto cap = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                        std::chrono::duration<double>(config.backup_cap_secs));
    deadline = deadline ? std::min(*deadline, cap) : cap;
  }

  AlphaVector::Build build;
  build.stage = original.stage();
  OccupancyState s = original;
  if (config.compression == Compression::kB1B2) {
    ClusterResult cr = cluster_histories(model, original);
    s = std::move(cr.compressed);
    build.labels.resize(model.num_players());
    for (int i = 0; i < model.num_players(); ++i)
      for (const auto& [h, rep] : cr.label[i])
        if (h != rep) build.labels[i][h] = rep;
  }
  const HistoryLevels levels = build_levels(s);
  build.weights.resize(model.num_players());
  for (int i = 0; i < model.num_players(); ++i)
    for (std::size_t k = 0; k < levels.ids[i].size(); ++k)
      build.weights[i][levels.ids[i][k]] = levels.mass[i][k];

  BackupResult out;
  const bool boundary = V_next.size() == 1 && V_next[0]->is_zero();
  if (boundary) {
    BetaTable beta = tabulate(model, BetaVector(model, s.stage(), {}), s);
    SubgameSolution sol = solve_subgame(model, s, beta, config, deadline);
    ++out.subgames;
    build.rule = std::move(sol.rule);
    out.value = sol.value;
    out.alpha = std::make_shared<AlphaVector>(model, s.shared_histories(), std::move(build));
    return out;
  }

  Candidate best;
  auto consider = [&](Candidate c) {
    for (int round = 0; round < kRefineRounds; ++round) {
      BetaTable beta = beta_for(model, s, V_next, c.next);
      SubgameSolution sol = solve_subgame(model, s, beta, config, deadline);
      ++out.subgames;
      if (sol.value <= c.value + kImprovement) break;
      Candidate next = with_best_branches(model, s, std::move(sol.rule), V_next, config);
      if (next.value <= c.value + kImprovement) break;
      c = std::move(next);
    }
    if (c.value > best.value + kImprovement) best = std::move(c);
  };

  // Starting rules: the point's seeds and the relaxation-greedy rule.
  std::vector<std::size_t> favored;
  for (const JointDecisionRule& seed : seeds) {
    if (!rule_covers(seed, levels)) continue;
    Candidate c = with_best_branches(model, s, seed, V_next, config);
    favored.insert(favored.end(), c.next.begin(), c.next.end());
    consider(std::move(c));
  }
  if (mdp != nullptr) consider(with_best_branches(model, s, mdp_greedy_rule(model, s, *mdp), V_next, config));
  if (config.exhaustive) {
    for (JointDecisionRule& rule : all_rules(model, s)) {
      Candidate c = with_best_branches(model, s, std::move(rule), V_next, config);
      if (c.value > best.value + kImprovement) best = std::move(c);
    }
  }

  // One subgame per continuation vector, or a bounded subset of them.
  std::vector<std::size_t> starts;
  if (config.uniform_starts <= 0 || V_next.size() <= static_cast<std::size_t>(config.uniform_starts)) {
    for (std::size_t k = 0; k < V_next.size(); ++k) starts.push_back(k);
  } else {
    std::sort(favored.begin(), favored.end());
    favored.erase(std::unique(favored.begin(), favored.end()), favored.end());
    starts = favored;
    for (std::size_t k = V_next.size(); k-- > 0 && starts.size() < static_cast<std::size_t>(config.uniform_starts);)
      if (!std::binary_search(favored.begin(), favored.end(), k)) starts.push_back(k);
    std::sort(starts.begin(), starts.end());
  }
  const int signals = model.observations().radix(0);
  for (std::size_t k : starts) {
    std::vector<std::size_t> uniform(signals, k);
    SubgameSolution sol = solve_subgame(model, s, beta_for(model, s, V_next, uniform), config, deadline);
    ++out.subgames;
    consider(with_best_branches(model, s, std::move(sol.rule), V_next, config));
  }

  build.rule = std::move(best.rule);
  for (std::size_t z = 0; z < best.next.size(); ++z)
    build.next.push_back(continuation(model, s, build.rule, static_cast<ObsId>(z),
                                      V_next[best.next[z]], config));
  out.value = best.value;
  out.alpha = std::make_shared<AlphaVector>(model, s.shared_histories(), std::move(build));
  return out;
}

namespace {

// Drops vectors weakly dominated on every support entry of the stage's
// points; among equal vectors the first stays.
void prune(std::vector<AlphaPtr>& V, const std::vector<Point>& points) {
  if (V.size() < 2 || points.empty()) return;
  std::vector<std::pair<StateId, HistoryId>> support;
  for (const Point& p : points)
    for (const auto& e : p.state.entries()) support.emplace_back(e.state, e.history);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  std::vector<std::vector<double>> val(V.size());
  for (std::size_t k = 0; k < V.size(); ++k) {
    val[k].reserve(support.size());
    for (auto [x, h] : support) val[k].push_back(V[k]->Evaluate(x, h));
  }
  std::vector<bool> dead(V.size(), false);
  for (std::size_t k = 0; k < V.size(); ++k) {
    for (std::size_t j = 0; j < V.size() && !dead[k]; ++j) {
      if (j == k || dead[j]) continue;
      bool geq = true, strict = false;
      for (std::size_t e = 0; e < support.size() && geq; ++e) {
        if (val[j][e] < val[k][e] - kImprovement) geq = false;
        if (val[j][e] > val[k][e] + kImprovement) strict = true;
      }
      if (geq && (strict || j < k)) dead[k] = true;
    }
  }
  std::vector<AlphaPtr> kept;
  for (std::size_t k = 0; k < V.size(); ++k)
    if (!dead[k]) kept.push_back(V[k]);
  V = std::move(kept);
}

void add_seed(Point& p, const JointDecisionRule& rule) {
  if (std::find(p.seeds.begin(), p.seeds.end(), rule) != p.seeds.end()) return;
  p.seeds.push_back(rule);
  if (p.seeds.size() > kMaxSeeds) p.seeds.erase(p.seeds.begin());
}

}  // namespace

bool improve(const DecPomdpModel& model, ValueSet& V, PointSet& points,
             const SolverConfig& config, SolverStats& stats,
             const std::vector<std::vector<double>>& mdp,
             std::optional<Clock::time_point> deadline) {
  const int horizon = model.horizon();
  double total_time = stats.backup_time_mean_s * static_cast<double>(stats.backups);
  for (int t = horizon - 1; t >= 0; --t) {
    for (Point& p : points.stages[t]) {
      if (deadline && Clock::now() > *deadline) {
        stats.backup_time_mean_s = stats.backups ? total_time / stats.backups : 0.0;
        return false;
      }
      const auto start = Clock::now();
      std::optional<BackupResult> r;
      try {
        r = backup(model, p.state, V[t + 1], config, p.seeds, &mdp, deadline);
      } catch (const DeadlineExceeded&) {
        // A backup past its cap or the run budget ends the run as out of time.
        total_time += seconds_since(start);
        stats.backup_time_max_s = std::max(stats.backup_time_max_s, seconds_since(start));
        ++stats.backups;
        stats.backup_time_mean_s = total_time / stats.backups;
        return false;
      }
      const double took = seconds_since(start);
      total_time += took;
      stats.backup_time_max_s = std::max(stats.backup_time_max_s, took);
      ++stats.backups;
      add_seed(p, induced_rule(*r->alpha, p.state));
      V[t].push_back(std::move(r->alpha));
    }
    prune(V[t], points.stages[t]);
  }
  stats.backup_time_mean_s = stats.backups ? total_time / stats.backups : 0.0;
  return true;
}

namespace {

JointDecisionRule random_rule(const DecPomdpModel& model, const OccupancyState& s,
                              std::mt19937_64& rng) {
  const HistoryLevels levels = build_levels(s);
  JointDecisionRule rule(model.num_players());
  for (int i = 0; i < model.num_players(); ++i) {
    rule[i].player = i;
    std::uniform_int_distribution<int> pick(0, model.actions().radix(i) - 1);
    for (HistoryId h : levels.ids[i]) rule[i].actions[h] = pick(rng);
  }
  return rule;
}

}  // namespace

std::size_t expand(const DecPomdpModel& model, PointSet& points, const ValueSet& V,
                   const SolverConfig& config, std::mt19937_64& rng,
                   const std::vector<std::vector<double>>& mdp) {
  const int horizon = model.horizon();
  const int signals = model.observations().radix(0);
  const std::uint64_t now = ++points.clock;
  std::size_t added = 0;

  // Index of the nearest point within add_distance, or -1. Nearest distance
  // to an empty stage is infinite, so an infinite threshold admits nothing.
  auto near = [&](int t, const OccupancyState& succ) -> long {
    const auto& stage = points.stages[t];
    if (std::isinf(config.add_distance)) return stage.empty() ? -2 : 0;
    for (std::size_t k = 0; k < stage.size(); ++k)
      if (occupancy_distance(stage[k].state, succ) <= config.add_distance)
        return static_cast<long>(k);
    return -1;
  };
  // Candidates off the current policy may only fill free slots.
  auto oversized = [&](const OccupancyState& s) {
    return config.max_support > 0 && s.size() > static_cast<std::size_t>(config.max_support);
  };
  auto offer = [&](int t, OccupancyState succ) {
    auto& stage = points.stages[t];
    if (static_cast<int>(stage.size()) >= config.max_points) return;
    succ = compress(model, succ, config);
    if (oversized(succ) || near(t, succ) != -1) return;
    stage.push_back(Point{std::move(succ), {}, now});
    ++added;
  };
  // Points on the current policy evict the stalest point of a full stage.
  auto offer_on_path = [&](int t, const OccupancyState& succ) {
    auto& stage = points.stages[t];
    const long k = near(t, succ);
    if (k >= 0) {
      stage[k].stamp = now;
      return;
    }
    if (k == -2 || config.max_points <= 0) return;
    Point fresh{succ, {}, now};
    if (static_cast<int>(stage.size()) < config.max_points) {
      stage.push_back(std::move(fresh));
      ++added;
      return;
    }
    auto stale = std::min_element(stage.begin(), stage.end(), [](const Point& a, const Point& b) {
      return a.stamp < b.stamp;
    });
    if (stale->stamp == now) return;
    *stale = std::move(fresh);
    ++added;
  };

  if (config.exhaustive) {
    for (int t = 0; t + 1 < horizon; ++t)
      for (std::size_t idx = 0; idx < points.stages[t].size(); ++idx) {
        const OccupancyState s = points.stages[t][idx].state;
        for (const JointDecisionRule& rule : all_rules(model, s))
          for (ObsId z = 0; z < signals; ++z) {
            auto [succ, p] = next_occupancy(model, s, rule, z);
            if (p > 0.0) offer(t + 1, std::move(succ));
          }
      }
    return added;
  }

  // The current policy from s0, followed through its most probable branches.
  struct Reach {
    OccupancyState state;
    AlphaPtr alpha;
    double prob;
  };
  const OccupancyState& s0 = points.stages[0][0].state;
  points.stages[0][0].stamp = now;
  std::vector<Reach> frontier;
  if (!V[0].empty()) frontier.push_back({s0, V[0][value_at(model, s0, V[0]).second], 1.0});
  for (int t = 0; t + 1 < horizon && !frontier.empty(); ++t) {
    std::vector<Reach> next;
    for (const Reach& r : frontier) {
      if (r.alpha->is_zero() || r.alpha->next().empty()) continue;
      const JointDecisionRule rule = induced_rule(*r.alpha, r.state);
      for (ObsId z = 0; z < signals; ++z) {
        auto [succ, p] = next_occupancy(model, r.state, rule, z);
        if (p <= 0.0) continue;
        OccupancyState compressed = compress(model, succ, config);
        if (oversized(compressed)) continue;
        next.push_back({std::move(compressed), r.alpha->next()[z], r.prob * p});
      }
    }
    std::stable_sort(next.begin(), next.end(),
                     [](const Reach& a, const Reach& b) { return a.prob > b.prob; });
    if (next.size() > static_cast<std::size_t>(std::max(config.path_width, 0)))
      next.resize(std::max(config.path_width, 0));
    for (const Reach& r : next) offer_on_path(t + 1, r.state);
    frontier = std::move(next);
  }

  // Portfolio: per point, a random or relaxation-greedy rule and one sampled
  // signal.
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int t = 0; t + 1 < horizon; ++t) {
    for (std::size_t idx = 0; idx < points.stages[t].size(); ++idx) {
      const OccupancyState s = points.stages[t][idx].state;
      const JointDecisionRule rule = coin(rng) < config.random_share
                                         ? random_rule(model, s, rng)
                                         : mdp_greedy_rule(model, s, mdp);
      add_seed(points.stages[t][idx], rule);
      std::vector<OccupancyState> succs;
      std::vector<double> probs;
      for (ObsId z = 0; z < signals; ++z) {
        auto [succ, p] = next_occupancy(model, s, rule, z);
        succs.push_back(std::move(succ));
        probs.push_back(p);
      }
      std::discrete_distribution<int> draw(probs.begin(), probs.end());
      offer(t + 1, std::move(succs[draw(rng)]));
    }
  }
  return added;
}

PointSet initial_points(const DecPomdpModel& model, const SolverConfig& config) {
  PointSet points;
  points.stages.resize(model.horizon());
  points.stages[0].push_back(Point{compress(model, initial_occupancy(model), config), {}, 0});
  // A spine of successors through the likeliest signals keeps every stage
  // nonempty, so no backup ever faces an empty V_next. The relaxation-greedy
  // rule is preferred; when its successor is oversized, the best-scoring
  // constant joint action that fits takes its place.
  const auto mdp = underlying_mdp_values(model);
  const std::size_t limit = config.max_support > 0 ? static_cast<std::size_t>(config.max_support)
                                                   : std::numeric_limits<std::size_t>::max();
  auto likeliest = [&](const OccupancyState& s, const JointDecisionRule& rule) {
    std::optional<OccupancyState> best;
    double best_p = 0.0;
    for (ObsId z = 0; z < model.observations().radix(0); ++z) {
      auto [succ, p] = next_occupancy(model, s, rule, z);
      if (p > best_p) {
        best_p = p;
        best = std::move(succ);
      }
    }
    return compress(model, *best, config);
  };
  for (int t = 0; t + 1 < model.horizon(); ++t) {
    const OccupancyState s = points.stages[t].front().state;
    JointDecisionRule rule = mdp_greedy_rule(model, s, mdp);
    OccupancyState succ = likeliest(s, rule);
    if (succ.size() > limit) {
      const std::vector<double> q = relaxation_scores(model, s, mdp);
      std::vector<JointAction> order(q.size());
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](JointAction a, JointAction b) { return q[a] > q[b]; });
      for (JointAction u : order) {
        JointDecisionRule constant = constant_rule(model, s, u);
        OccupancyState candidate = likeliest(s, constant);
        if (candidate.size() < succ.size()) {
          succ = std::move(candidate);
          rule = std::move(constant);
        }
        if (succ.size() <= limit) break;
      }
    }
    add_seed(points.stages[t].front(), rule);
    points.stages[t + 1].push_back(Point{std::move(succ), {}, 0});
  }
  return points;
}

ValueSet initial_values(const DecPomdpModel& model, const PointSet& points) {
  ValueSet V(model.horizon() + 1);
  V[model.horizon()].push_back(
      AlphaVector::Zero(model, points.stages[0][0].state.shared_histories()));
  return V;
}

Solution solve(const DecPomdpModel& model, const SolverConfig& config, const Progress& progress) {
  const auto start = Clock::now();
  const auto deadline =
      start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(config.budget_secs));
  const auto mdp = underlying_mdp_values(model);
  std::mt19937_64 rng(config.seed);
  Solution sol;
  sol.points = initial_points(model, config);
  sol.values = initial_values(model, sol.points);
  const OccupancyState& s0 = sol.points.stages[0][0].state;
  double previous = -std::numeric_limits<double>::infinity();
  int stable = 0;
  for (int it = 0; it < config.max_iterations; ++it) {
    const std::size_t added = expand(model, sol.points, sol.values, config, rng, mdp);
    const bool finished = improve(model, sol.values, sol.points, config, sol.stats, mdp, deadline);
    sol.stats.iterations = it + 1;
    if (!sol.values[0].empty()) {
      auto [v, k] = value_at(model, s0, sol.values[0]);
      sol.value = v;
      sol.policy = sol.values[0][k];
    }
    sol.stats.wall_s = seconds_since(start);
    sol.stats.curve.emplace_back(sol.stats.wall_s, sol.value);
    if (progress) progress(sol);
    if (!finished || Clock::now() > deadline) {
      sol.stats.out_of_time = true;
      break;
    }
    if (std::abs(sol.value - previous) < config.converge_tol) {
      ++stable;
      if (added == 0 || (config.patience > 0 && stable >= config.patience)) {
        sol.stats.converged = true;
        break;
      }
    } else {
      stable = 0;
    }
    previous = sol.value;
  }
  sol.stats.points_per_stage.clear();
  for (const auto& stage : sol.points.stages) sol.stats.points_per_stage.push_back(stage.size());
  sol.stats.wall_s = seconds_since(start);
  return sol;
}

JointDecisionRule induced_rule(const AlphaVector& alpha, const OccupancyState& s) {
  const DecPomdpModel& model = alpha.model();
  const int n = model.num_players();
  const HistoryTable& table = s.histories();
  JointDecisionRule rule(n);
  for (int i = 0; i < n; ++i) rule[i].player = i;
  std::array<HistoryId, kMaxPlayers> nodes{};
  HistoryId last = kNoHistory;
  for (const auto& e : s.entries()) {
    if (e.history == last) continue;
    last = e.history;
    alpha.MapHistory(e.history, std::span<HistoryId>(nodes.data(), n));
    for (int i = 0; i < n; ++i)
      rule[i].actions[table.Project(n - 1, e.history, i)] = alpha.rule()[i].at(nodes[i]);
  }
  return rule;
}

double evaluate_policy(const DecPomdpModel& model, const AlphaPtr& root, const OccupancyState& s) {
  const int n = model.num_players();
  struct Key {
    const AlphaVector* alpha;
    StateId x;
    std::array<HistoryId, kMaxPlayers> nodes;
    bool operator<(const Key& o) const {
      return std::tie(alpha, x, nodes) < std::tie(o.alpha, o.x, o.nodes);
    }
  };
  std::map<Key, double> layer;
  if (!root || root->is_zero()) return 0.0;
  for (const auto& e : s.entries()) {
    Key k{root.get(), e.state, {}};
    root->MapHistory(e.history, std::span<HistoryId>(k.nodes.data(), n));
    layer[k] += e.prob;
  }
  const JointSpace& ua = model.actions();
  const JointSpace& uz = model.observations();
  double value = 0.0;
  double weight = 1.0;
  while (!layer.empty()) {
    std::map<Key, double> next;
    for (const auto& [k, p] : layer) {
      std::array<ActionId, kMaxPlayers> act{};
      JointAction u = 0;
      for (int i = 0; i < n; ++i) {
        act[i] = k.alpha->rule()[i].at(k.nodes[i]);
        u += act[i] * ua.stride(i);
      }
      value += weight * p * model.reward(k.x, u);
      if (k.alpha->next().empty()) continue;
      model.ForEachOutcome(k.x, u, [&](const Outcome& o) {
        const AlphaVector* nx = k.alpha->next()[uz.component(o.obs, 0)].get();
        if (nx->is_zero()) return;
        Key succ{nx, o.next, {}};
        nx->Advance(std::span<const HistoryId>(k.nodes.data(), n),
                    std::span<const ActionId>(act.data(), n), o.obs,
                    std::span<HistoryId>(succ.nodes.data(), n));
        next[succ] += p * o.prob;
      });
    }
    layer = std::move(next);
    weight *= model.discount();
  }
  return value;
}

std::vector<std::vector<double>> underlying_mdp_values(const DecPomdpModel& model) {
  const int horizon = model.horizon();
  const int nx = model.num_states();
  const int nu = model.actions().size();
  // Transition rows, shared by every stage.
  std::vector<std::vector<std::pair<StateId, double>>> rows(static_cast<std::size_t>(nx) * nu);
  for (StateId x = 0; x < nx; ++x)
    for (JointAction u = 0; u < nu; ++u) model.dynamics().Transition(x, u, rows[x * nu + u]);
  std::vector<std::vector<double>> V(horizon + 1, std::vector<double>(nx, 0.0));
  for (int t = horizon - 1; t >= 0; --t) {
    for (StateId x = 0; x < nx; ++x) {
      double best = -std::numeric_limits<double>::infinity();
      for (JointAction u = 0; u < nu; ++u) {
        double q = model.reward(x, u);
        for (auto [y, p] : rows[x * nu + u]) q += model.discount() * p * V[t + 1][y];
        best = std::max(best, q);
      }
      V[t][x] = best;
    }
  }
  return V;
}

namespace {

// Q-values of the relaxation at stage t, one row of joint actions per state.
std::vector<double> relaxation_q(const DecPomdpModel& model, int t,
                                 const std::vector<std::vector<double>>& mdp,
                                 std::span<const StateId> states) {
  const int nu = model.actions().size();
  const std::vector<double>& next = mdp[t + 1];
  std::vector<double> q(static_cast<std::size_t>(model.num_states()) * nu, 0.0);
  std::vector<std::pair<StateId, double>> row;
  for (StateId x : states) {
    for (JointAction u = 0; u < nu; ++u) {
      row.clear();
      model.dynamics().Transition(x, u, row);
      double v = model.reward(x, u);
      for (auto [y, p] : row) v += model.discount() * p * next[y];
      q[static_cast<std::size_t>(x) * nu + u] = v;
    }
  }
  return q;
}

std::vector<StateId> support_states(const OccupancyState& s) {
  std::vector<StateId> states;
  for (const auto& e : s.entries()) states.push_back(e.state);
  std::sort(states.begin(), states.end());
  states.erase(std::unique(states.begin(), states.end()), states.end());
  return states;
}

}  // namespace

std::vector<double> relaxation_scores(const DecPomdpModel& model, const OccupancyState& s,
                                      const std::vector<std::vector<double>>& mdp) {
  const int nu = model.actions().size();
  const std::vector<double> q = relaxation_q(model, s.stage(), mdp, support_states(s));
  std::vector<double> score(nu, 0.0);
  for (const auto& e : s.entries())
    for (JointAction u = 0; u < nu; ++u)
      score[u] += e.prob * q[static_cast<std::size_t>(e.state) * nu + u];
  return score;
}

JointDecisionRule mdp_greedy_rule(const DecPomdpModel& model, const OccupancyState& s,
                                  const std::vector<std::vector<double>>& mdp) {
  const int nu = model.actions().size();
  const std::vector<double> q = relaxation_q(model, s.stage(), mdp, support_states(s));
  BetaTable beta;
  beta.num_actions = nu;
  beta.values.reserve(s.size() * nu);
  for (const auto& e : s.entries()) {
    const auto first = q.begin() + static_cast<std::ptrdiff_t>(e.state) * nu;
    beta.values.insert(beta.values.end(), first, first + nu);
  }
  HierarchicalOptions opt;
  opt.share = true;
  return solve_hierarchical(model, s, beta, opt).rule;
}

double error_bound(double c, double delta, double gamma, int horizon) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw std::invalid_argument("the error bound needs a discount strictly inside (0,1)");
  if (c < 0.0 || delta < 0.0) throw std::invalid_argument("c and delta must be nonnegative");
  const double l = horizon;
  const double num = 1.0 + l * std::pow(gamma, l + 1) - (l + 1) * std::pow(gamma, l);
  return 2.0 * c * delta * num / ((1.0 - gamma) * (1.0 - gamma));
}

double density(std::span<const OccupancyState> reachable, std::span<const OccupancyState> points) {
  double worst = 0.0;
  for (const OccupancyState& r : reachable) {
    double nearest = std::numeric_limits<double>::infinity();
    for (const OccupancyState& p : points)
      if (p.stage() == r.stage()) nearest = std::min(nearest, occupancy_distance(r, p));
    worst = std::max(worst, nearest);
  }
  return worst;
}

}  // namespace hpbvi
