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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "hpbvi/benchgen.hpp"

namespace hpbvi {
namespace {

struct CliRun {
  int status;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) result.push_back(line);
  return result;
}

TEST(Cli, SolvePrintsHeaderAndOneRow) {
  const CliRun r = cli({"solve", "--game", "tiger", "--horizon", "3", "--deterministic"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], kCsvHeader);
  EXPECT_EQ(rows[1].rfind("tiger,2,3,1,pbvi-hier-b1b2,0,10.273600,", 0), 0u) << rows[1];
}

TEST(Cli, DeterministicRowsRepeat) {
  const std::vector<std::string> args = {"table",   "--games", "tiger,mabc", "--ns", "2",
                                         "--horizon", "3",     "--algos",    "hier,enum,iql",
                                         "--episodes", "500",  "--deterministic"};
  const CliRun a = cli(args);
  const CliRun b = cli(args);
  ASSERT_EQ(a.status, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out).size(), 7u);
}

TEST(Cli, ZeroBudgetIsOutOfTime) {
  const CliRun r = cli({"solve", "--game", "tiger", "--horizon", "3", "--budget-secs", "0"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(lines(r.out).at(1).find(",OOT,"), std::string::npos);
}

TEST(Cli, GeneratedModelSolvesLikeTheGame) {
  const auto path = std::filesystem::temp_directory_path() / "hpbvi_cli_tiger.dpomdp";
  ASSERT_EQ(cli({"gen", "--game", "tiger", "--out", path.string()}).status, 0);
  const CliRun r = cli({"solve", "--model-file", path.string(), "--horizon", "3", "--deterministic"});
  std::filesystem::remove(path);
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(lines(r.out).at(1).find(",10.273600,"), std::string::npos);
}

TEST(Cli, CurveHasOneRowPerIteration) {
  const CliRun r = cli({"curve", "--game", "mabc", "--horizon", "4", "--deterministic"});
  ASSERT_EQ(r.status, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[0], "game,n,horizon,algo,seed,step,time_s,value");
  EXPECT_NE(rows.back().find(",3.890000"), std::string::npos);
}

TEST(Cli, BadArgumentsFail) {
  EXPECT_NE(cli({}).status, 0);
  EXPECT_NE(cli({"solve"}).status, 0);
  EXPECT_NE(cli({"solve", "--game", "tiger", "--model-file", "x"}).status, 0);
  EXPECT_NE(cli({"solve", "--game", "chess"}).status, 0);
  EXPECT_NE(cli({"solve", "--game", "tiger", "--backup", "magic"}).status, 0);
  EXPECT_NE(cli({"solve", "--game", "tiger", "--discount", "1.5"}).status, 0);
  EXPECT_NE(cli({"solve", "--model-file", "/nonexistent/model"}).status, 0);
  const CliRun r = cli({"solve", "--game", "chess"});
  EXPECT_NE(r.err.find("chess"), std::string::npos);
}

TEST(Cli, CsvRowFormatsOot) {
  RunRecord rec;
  rec.game = "tiger";
  rec.n = 2;
  rec.horizon = 30;
  rec.algo = "pbvi-enum-b1b2";
  rec.wall_s = 12.5;
  EXPECT_EQ(csv_row(rec, false), "tiger,2,30,1,pbvi-enum-b1b2,0,OOT,0,0.000000,12.500,0");
  EXPECT_EQ(csv_row(rec, true), "tiger,2,30,1,pbvi-enum-b1b2,0,OOT,0,0.000000,0.000,0");
}

}  // namespace
}  // namespace hpbvi
