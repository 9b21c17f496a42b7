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

#include "hpbvi/cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>

#include "hpbvi/baselines.hpp"
#include "hpbvi/benchgen.hpp"
#include "hpbvi/subgame.hpp"

namespace hpbvi {
namespace {

struct Options {
  std::string game;
  std::string model_file;
  int n = 2;
  int horizon = 30;
  std::optional<double> discount;
  std::string backup = "hier";
  std::string compress = "b1b2";
  std::string algo = "pbvi";
  double budget_secs = 1800.0;
  double backup_cap_secs = 0.0;
  std::uint64_t seed = 0;
  int points_cap = 64;
  int max_iterations = 1000;
  long episodes = 100000;
  std::string out;
  bool deterministic = false;
  bool enum_guard = true;
  // table only
  std::vector<std::string> games = {"tiger", "recycling", "mabc", "grid3x3"};
  std::vector<int> ns = {2, 3, 4};
  std::vector<std::string> algos = {"hier", "enum", "iql"};
};

const std::map<std::string, BackupKind> kBackups = {{"hier", BackupKind::kHierarchical},
                                                    {"enum", BackupKind::kEnum}};
const std::map<std::string, Compression> kCompressions = {
    {"none", Compression::kNone}, {"b1", Compression::kB1}, {"b1b2", Compression::kB1B2}};

DecPomdpModel load(const Options& o, const std::string& game, int n) {
  DecPomdpModel model = [&] {
    if (!o.model_file.empty()) return parse_model_file(o.model_file, o.horizon);
    const auto family = parse_family(game);
    if (!family) throw std::invalid_argument(fmt::format("unknown game '{}'", game));
    return generate({*family, n, o.horizon, 1.0});
  }();
  if (o.discount) model = model.WithDiscount(*o.discount);
  return model;
}

SolverConfig solver_config(const Options& o, BackupKind backup) {
  SolverConfig c;
  c.backup = backup;
  c.compression = kCompressions.at(o.compress);
  c.budget_secs = o.budget_secs;
  c.backup_cap_secs = o.backup_cap_secs;
  c.seed = o.seed;
  c.max_points = o.points_cap;
  c.max_iterations = o.max_iterations;
  if (!o.enum_guard) c.enum_max_candidates = std::numeric_limits<double>::infinity();
  return c;
}

RunRecord base_record(const Options& o, const DecPomdpModel& model, const std::string& game,
                      int n, const std::string& algo) {
  RunRecord r;
  r.game = o.model_file.empty() ? game : o.model_file;
  r.n = o.model_file.empty() ? n : model.num_players();
  r.horizon = model.horizon();
  r.discount = model.discount();
  r.algo = algo;
  r.seed = o.seed;
  return r;
}

std::string pbvi_label(const std::string& backup, const std::string& compress) {
  return fmt::format("pbvi-{}-{}", backup, compress);
}

RunRecord run_pbvi(const Options& o, const DecPomdpModel& model, const std::string& game, int n,
                   const std::string& backup, Solution* out_solution = nullptr) {
  SolverConfig config = solver_config(o, kBackups.at(backup));
  RunRecord r = base_record(o, model, game, n, pbvi_label(backup, o.compress));
  Solution sol = solve(model, config);
  r.iterations = sol.stats.iterations;
  r.backup_time_mean_s = sol.stats.backup_time_mean_s;
  r.wall_s = sol.stats.wall_s;
  r.converged = sol.stats.converged;
  if (!sol.stats.out_of_time && sol.policy)
    r.value = evaluate_policy(model, sol.policy, sol.points.stages[0][0].state);
  if (out_solution) *out_solution = std::move(sol);
  return r;
}

IqlConfig iql_config(const Options& o) {
  IqlConfig c;
  c.episodes = o.episodes;
  c.seed = o.seed;
  c.eval_every = std::max<long>(1, o.episodes / 10);
  return c;
}

RunRecord run_iql(const Options& o, const DecPomdpModel& model, const std::string& game, int n,
                  IqlResult* out_result = nullptr) {
  RunRecord r = base_record(o, model, game, n, "iql");
  IqlResult res = iql_train(model, iql_config(o));
  r.value = res.value;
  r.iterations = static_cast<int>(o.episodes);
  r.wall_s = res.wall_s;
  r.converged = true;
  if (out_result) *out_result = std::move(res);
  return r;
}

// Writes to --out when given, else to the caller's stream.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error(fmt::format("cannot open '{}' for writing", path));
      stream_ = &file_;
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

void add_model_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--game", o.game, "benchmark family: tiger, recycling, mabc, grid3x3");
  cmd->add_option("--model-file", o.model_file, "read the model from a file instead");
  cmd->add_option("--n", o.n, "number of players")->check(CLI::PositiveNumber);
  cmd->add_option("--horizon", o.horizon, "planning horizon")->check(CLI::PositiveNumber);
  cmd->add_option("--discount", o.discount, "discount factor in (0,1]");
  cmd->add_option("--out", o.out, "output file (default stdout)");
}

void add_solver_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--backup", o.backup, "backup operator")
      ->check(CLI::IsMember({"hier", "enum"}));
  cmd->add_option("--compress", o.compress, "history compression")
      ->check(CLI::IsMember({"none", "b1", "b1b2"}));
  cmd->add_option("--budget-secs", o.budget_secs, "wall-clock budget per run")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--backup-cap-secs", o.backup_cap_secs, "per-backup cap, 0 for none")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--points-cap", o.points_cap, "points per stage")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iterations", o.max_iterations, "iteration limit")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--episodes", o.episodes, "IQL training episodes")->check(CLI::PositiveNumber);
  cmd->add_flag("--deterministic", o.deterministic, "zero the timing columns");
}

void require_model(const Options& o) {
  if (o.game.empty() == o.model_file.empty())
    throw CLI::ValidationError("exactly one of --game and --model-file is required");
}

}  // namespace

std::string csv_row(const RunRecord& r, bool deterministic) {
  const std::string value = r.value ? fmt::format("{:.6f}", *r.value) : "OOT";
  const double backup_mean = deterministic ? 0.0 : r.backup_time_mean_s;
  const double wall = deterministic ? 0.0 : r.wall_s;
  return fmt::format("{},{},{},{},{},{},{},{},{:.6f},{:.3f},{}", r.game, r.n, r.horizon, r.discount,
                     r.algo, r.seed, value, r.iterations, backup_mean, wall,
                     r.converged ? 1 : 0);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Hierarchical point-based value iteration for Dec-POMDPs", "hpbvi"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "write a benchmark model in text form");
  add_model_options(gen, o);

  auto* solve_cmd = app.add_subcommand("solve", "solve one model, print one CSV row");
  add_model_options(solve_cmd, o);
  add_solver_options(solve_cmd, o);
  solve_cmd->add_option("--algo", o.algo, "pbvi or iql")->check(CLI::IsMember({"pbvi", "iql"}));

  auto* table = app.add_subcommand("table", "sweep games, player counts and algorithms");
  add_model_options(table, o);
  add_solver_options(table, o);
  table->add_option("--games", o.games, "games to sweep")->delimiter(',');
  table->add_option("--ns", o.ns, "player counts to sweep")->delimiter(',');
  table->add_option("--algos", o.algos, "hier, enum, iql")
      ->delimiter(',')
      ->check(CLI::IsMember({"hier", "enum", "iql"}));

  auto* curve = app.add_subcommand("curve", "value against time, one row per iteration");
  add_model_options(curve, o);
  add_solver_options(curve, o);
  curve->add_option("--algo", o.algo, "pbvi or iql")->check(CLI::IsMember({"pbvi", "iql"}));

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*gen) {
      require_model(o);
      const DecPomdpModel model = load(o, o.game, o.n);
      Sink sink(o.out, out);
      serialize_model(model, *sink);
      return 0;
    }
    if (*solve_cmd) {
      require_model(o);
      const DecPomdpModel model = load(o, o.game, o.n);
      const RunRecord r = o.algo == "iql" ? run_iql(o, model, o.game, o.n)
                                          : run_pbvi(o, model, o.game, o.n, o.backup);
      Sink sink(o.out, out);
      *sink << kCsvHeader << "\n" << csv_row(r, o.deterministic) << "\n";
      return 0;
    }
    if (*table) {
      Sink sink(o.out, out);
      *sink << kCsvHeader << "\n";
      const std::vector<std::string> games =
          o.model_file.empty() ? o.games : std::vector<std::string>{o.model_file};
      for (const std::string& game : games) {
        for (int n : o.ns) {
          const DecPomdpModel model = load(o, game, n);
          for (const std::string& algo : o.algos) {
            RunRecord r;
            if (algo == "iql") {
              r = run_iql(o, model, game, n);
            } else {
              // Only time decides OOT here, so the enumeration guard is off.
              Options sweep = o;
              sweep.enum_guard = false;
              r = run_pbvi(sweep, model, game, n, algo);
            }
            *sink << csv_row(r, o.deterministic) << "\n";
            (*sink).flush();
          }
          if (!o.model_file.empty()) break;
        }
      }
      return 0;
    }
    if (*curve) {
      require_model(o);
      const DecPomdpModel model = load(o, o.game, o.n);
      Sink sink(o.out, out);
      *sink << "game,n,horizon,algo,seed,step,time_s,value\n";
      if (o.algo == "iql") {
        IqlResult res;
        const RunRecord r = run_iql(o, model, o.game, o.n, &res);
        for (const auto& [episode, value] : res.curve)
          *sink << fmt::format("{},{},{},{},{},{},{:.3f},{:.6f}\n", r.game, r.n, r.horizon,
                               r.algo, r.seed, episode, 0.0, value);
      } else {
        Solution sol;
        const RunRecord r = run_pbvi(o, model, o.game, o.n, o.backup, &sol);
        int step = 0;
        for (const auto& [time, value] : sol.stats.curve)
          *sink << fmt::format("{},{},{},{},{},{},{:.3f},{:.6f}\n", r.game, r.n, r.horizon,
                               r.algo, r.seed, ++step, o.deterministic ? 0.0 : time, value);
      }
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const GuardError& e) {
    err << "error: guard: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace hpbvi
