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

#ifndef HPBVI_PBVI_HPP_
#define HPBVI_PBVI_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "hpbvi/occupancy.hpp"
#include "hpbvi/subgame.hpp"
#include "hpbvi/valuefn.hpp"

namespace hpbvi {

enum class BackupKind { kEnum, kHierarchical };
enum class Compression { kNone, kB1, kB1B2 };

struct SolverConfig {
  BackupKind backup = BackupKind::kHierarchical;
  Compression compression = Compression::kB1B2;
  // A candidate point is kept only beyond this L1 distance from the stage's
  // existing points.
  double add_distance = 0.01;
  int max_points = 64;
  // Candidate points with more (state, history) entries than this are
  // dropped after compression; random rules grow supports exponentially.
  // <= 0 keeps every size.
  int max_support = 1024;
  double converge_tol = 1e-6;
  // Also stop once the value has been stable for this many consecutive
  // iterations even though expansion still adds points; <= 0 waits for the
  // point set to settle.
  int patience = 3;
  double budget_secs = 1800.0;
  int max_iterations = 1000;
  std::uint64_t seed = 0;
  // Branches of the current policy from s0 kept per stage, most probable
  // first. Their points may evict stale ones from a full stage.
  int path_width = 4;
  // Share of expansion candidates drawn as uniformly random rules; the rest
  // are greedy for the underlying MDP.
  double random_share = 0.5;
  // Expand with every deterministic joint rule and every signal instead of
  // the sampled portfolio. Only for tiny instances.
  bool exhaustive = false;
  // Single-continuation subgames solved per backup when V_next is larger;
  // <= 0 solves one per vector.
  int uniform_starts = 8;
  // Per-backup wall-clock cap; <= 0 disables it.
  double backup_cap_secs = 0.0;
  double enum_max_candidates = 1e7;
};

struct Point {
  OccupancyState state;
  // Rules tried from this point, used as backup starting rules.
  std::vector<JointDecisionRule> seeds;
  // Last expansion that created the point or found it on the policy.
  std::uint64_t stamp = 0;
};

// Per-stage point lists, stages 0..horizon-1.
struct PointSet {
  std::vector<std::vector<Point>> stages;
  std::uint64_t clock = 0;  // expansions so far
  std::size_t size() const;
};

// Per-stage vector collections, stages 0..horizon; the last holds the zero
// boundary vector.
using ValueSet = std::vector<std::vector<AlphaPtr>>;

struct BackupResult {
  AlphaPtr alpha;
  double value = 0.0;
  std::uint64_t subgames = 0;
};

// Best (rule, per-signal continuation) at s against V_next. Throws
// GuardError or DeadlineExceeded from enumeration backups; the deadline is
// the earlier of `until` and the per-backup cap.
BackupResult backup(const DecPomdpModel& model, const OccupancyState& s,
                    std::span<const AlphaPtr> V_next, const SolverConfig& config,
                    std::span<const JointDecisionRule> seeds = {},
                    const std::vector<std::vector<double>>* mdp = nullptr,
                    std::optional<Clock::time_point> until = std::nullopt);

struct SolverStats {
  int iterations = 0;
  std::uint64_t backups = 0;
  double backup_time_mean_s = 0.0;
  double backup_time_max_s = 0.0;
  double wall_s = 0.0;
  bool converged = false;
  bool out_of_time = false;
  // (wall seconds, value at s0) after every improve sweep.
  std::vector<std::pair<double, double>> curve;
  std::vector<std::size_t> points_per_stage;
};

// Backward sweep adding one backup per point per stage, then pointwise
// pruning on the stage's supports. Returns false when the deadline or a
// backup cap stopped the sweep early.
bool improve(const DecPomdpModel& model, ValueSet& V, PointSet& points,
             const SolverConfig& config, SolverStats& stats,
             const std::vector<std::vector<double>>& mdp,
             std::optional<Clock::time_point> deadline = std::nullopt);

// Adds successors along the current policy from s0, then one portfolio
// candidate per point. Returns the number of points added or replaced.
std::size_t expand(const DecPomdpModel& model, PointSet& points, const ValueSet& V,
                   const SolverConfig& config, std::mt19937_64& rng,
                   const std::vector<std::vector<double>>& mdp);

// The first point set: s0 and a spine of relaxation-greedy successors.
PointSet initial_points(const DecPomdpModel& model, const SolverConfig& config);
// Empty collections with the zero boundary.
ValueSet initial_values(const DecPomdpModel& model, const PointSet& points);

struct Solution {
  double value = 0.0;
  // The policy: rule at s0 and continuations per player-0 signal.
  AlphaPtr policy;
  SolverStats stats;
  PointSet points;
  ValueSet values;
};

// Called after every iteration with the current solution.
using Progress = std::function<void(const Solution&)>;

Solution solve(const DecPomdpModel& model, const SolverConfig& config,
               const Progress& progress = {});

// Exact value of the policy rooted at alpha from occupancy s, by a forward
// pass over (vector, state, policy nodes).
double evaluate_policy(const DecPomdpModel& model, const AlphaPtr& alpha,
                       const OccupancyState& s);

// The rule alpha plays on the histories of s.
JointDecisionRule induced_rule(const AlphaVector& alpha, const OccupancyState& s);

// Full-observability relaxation: values[t][x] for t = 0..horizon.
std::vector<std::vector<double>> underlying_mdp_values(const DecPomdpModel& model);

// Expected relaxation Q-value of each constant joint action at s.
std::vector<double> relaxation_scores(const DecPomdpModel& model, const OccupancyState& s,
                                      const std::vector<std::vector<double>>& mdp);

// Decentralized rule greedy for the relaxation's Q-values at s.
JointDecisionRule mdp_greedy_rule(const DecPomdpModel& model, const OccupancyState& s,
                                  const std::vector<std::vector<double>>& mdp);

// Worst-case PBVI loss for reward bound c, density delta. Throws
// std::invalid_argument for gamma outside (0,1) or negative c, delta.
double error_bound(double c, double delta, double gamma, int horizon);

// Largest distance from any of `reachable` to its nearest point in `points`.
double density(std::span<const OccupancyState> reachable, std::span<const OccupancyState> points);

}  // namespace hpbvi

#endif  // HPBVI_PBVI_HPP_
