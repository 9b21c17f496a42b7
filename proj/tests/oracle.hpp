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

#ifndef HPBVI_TESTS_ORACLE_HPP_
#define HPBVI_TESTS_ORACLE_HPP_

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

#include "hpbvi/model.hpp"

namespace hpbvi::testing {

// Optimal value of a two-player game by brute force, without any occupancy
// machinery. Every policy tree of the bottom player (one action per own
// signal sequence) is enumerated; the top player sees everything the bottom
// one does, so its best response is a plain dynamic program over joint
// signal sequences with unnormalized state weights.
class TwoPlayerOracle {
 public:
  explicit TwoPlayerOracle(const DecPomdpModel& m) : m_(m) {
    if (m.num_players() != 2) throw std::invalid_argument("oracle handles two players");
    z0_ = m.observations().radix(0);
    std::size_t width = 1;
    for (int t = 0; t < m.horizon(); ++t) {
      offset_.push_back(nodes_);
      nodes_ += width;
      width *= z0_;
    }
  }

  double Optimum() {
    const int a0 = m_.actions().radix(0);
    std::vector<int> tree(nodes_, 0);
    std::vector<double> b(m_.initial_belief().begin(), m_.initial_belief().end());
    double best = -std::numeric_limits<double>::infinity();
    while (true) {
      tree_ = &tree;
      best = std::max(best, BestResponse(0, 0, b));
      std::size_t d = 0;
      for (; d < tree.size(); ++d) {
        if (++tree[d] < a0) break;
        tree[d] = 0;
      }
      if (d == tree.size()) break;
    }
    return best;
  }

 private:
  double BestResponse(int t, std::size_t node, const std::vector<double>& b) {
    if (t == m_.horizon()) return 0.0;
    const int u0 = (*tree_)[offset_[t] + node];
    const JointSpace& ua = m_.actions();
    double best = -std::numeric_limits<double>::infinity();
    for (int u1 = 0; u1 < ua.radix(1); ++u1) {
      const JointAction u = u0 * ua.stride(0) + u1 * ua.stride(1);
      double q = 0.0;
      std::map<ObsId, std::vector<double>> succ;
      for (StateId x = 0; x < m_.num_states(); ++x) {
        if (b[x] == 0.0) continue;
        q += b[x] * m_.reward(x, u);
        m_.ForEachOutcome(x, u, [&](const Outcome& o) {
          auto& row = succ[o.obs];
          if (row.empty()) row.assign(m_.num_states(), 0.0);
          row[o.next] += b[x] * o.prob;
        });
      }
      for (const auto& [z, row] : succ)
        q += m_.discount() *
             BestResponse(t + 1, node * z0_ + m_.observations().component(z, 0), row);
      best = std::max(best, q);
    }
    return best;
  }

  const DecPomdpModel& m_;
  int z0_ = 0;
  std::size_t nodes_ = 0;
  std::vector<std::size_t> offset_;
  const std::vector<int>* tree_ = nullptr;
};

}  // namespace hpbvi::testing

#endif  // HPBVI_TESTS_ORACLE_HPP_
