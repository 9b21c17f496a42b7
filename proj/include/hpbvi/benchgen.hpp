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

#ifndef HPBVI_BENCHGEN_HPP_
#define HPBVI_BENCHGEN_HPP_

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hpbvi/model.hpp"

namespace hpbvi {

enum class Family { kTiger, kRecycling, kMabc, kGrid3x3 };

std::string_view family_name(Family family);
std::optional<Family> parse_family(std::string_view name);

// Battery dynamics of one recycling robot. A low battery that runs flat while
// searching is rescued: the robot ends up high, pays the rescue penalty and
// carries nothing that step.
struct RecyclingParams {
  double high_stays_high_small = 0.8;
  double high_stays_high_big = 0.5;
  double low_depletes_small = 0.3;
  double low_depletes_big = 0.5;
  double small_reward = 2.0;   // per carrying robot
  double big_reward = 5.0;     // per robot, only when every robot carries
  double big_penalty = -10.0;  // total, when some but not all carry
  double rescue_penalty = -3.0;
};

enum class MabcSignal {
  kCollision,  // each node hears whether the channel collided
  kBuffer,     // each node senses its own buffer
};

struct GeneratorOptions {
  double tiger_accuracy = 0.85;
  // Per-player fill probabilities; the pattern repeats for larger n.
  std::vector<double> mabc_fill = {0.9, 0.1};
  MabcSignal mabc_signal = MabcSignal::kCollision;
  double mabc_accuracy = 0.9;
  double grid_success = 0.6;
  RecyclingParams recycling;
};

struct BenchmarkSpec {
  Family family = Family::kTiger;
  int n_players = 2;
  int horizon = 30;
  double discount = 1.0;
};

// Throws ModelError for n < 2.
DecPomdpModel generate(const BenchmarkSpec& spec,
                       const GeneratorOptions& options = {});

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }  // 0 for semantic errors

 private:
  int line_;
};

// Reads the standard two-player benchmark grammar (any agent count).
// The horizon is not part of the format and is supplied by the caller.
DecPomdpModel parse_model(std::string_view text, int horizon = 1);
DecPomdpModel parse_model_file(const std::string& path, int horizon = 1);

void serialize_model(const DecPomdpModel& model, std::ostream& out);
std::string serialize_model(const DecPomdpModel& model);

}  // namespace hpbvi

#endif  // HPBVI_BENCHGEN_HPP_
