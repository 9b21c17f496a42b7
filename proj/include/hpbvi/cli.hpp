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

#ifndef HPBVI_CLI_HPP_
#define HPBVI_CLI_HPP_

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hpbvi/model.hpp"
#include "hpbvi/pbvi.hpp"

namespace hpbvi {

inline constexpr char kCsvHeader[] =
    "game,n,horizon,discount,algo,seed,value,iterations,backup_time_mean_s,wall_s,converged";

// One solver run. value is empty when the run went out of time.
struct RunRecord {
  std::string game;
  int n = 0;
  int horizon = 0;
  double discount = 1.0;
  std::string algo;
  std::uint64_t seed = 0;
  std::optional<double> value;
  int iterations = 0;
  double backup_time_mean_s = 0.0;
  double wall_s = 0.0;
  bool converged = false;
};

// A CSV row matching kCsvHeader; OOT in the value column for out-of-time
// runs. Deterministic rows carry zero timings.
std::string csv_row(const RunRecord& record, bool deterministic);

// The command line front end. Writes CSV or model text to out, messages to
// err, and returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hpbvi

#endif  // HPBVI_CLI_HPP_
