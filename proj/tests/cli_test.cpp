//
// Copyright 2026 The dsigma Authors
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
//

// End-to-end checks of the dsigma executable through the shell.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "gtest/gtest.h"

namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("dsigma_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string Path(const std::string& name) const { return (dir_ / name).string(); }

  // Runs the CLI with stdout sent to `stdout_file` (when given); returns the exit code.
  int Run(const std::string& args, const std::string& stdout_file = "") const {
    std::string cmd = std::string(DSIGMA_CLI) + " " + args;
    cmd += stdout_file.empty() ? " > /dev/null" : " > " + Path(stdout_file);
    cmd += " 2> " + Path("stderr.txt");
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string Read(const std::string& name) const {
    std::ifstream in(Path(name));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  }

  void Write(const std::string& name, const std::string& text) const {
    std::ofstream(Path(name)) << text;
  }

  fs::path dir_;
};

TEST_F(CliTest, GenSynThenShuffle) {
  ASSERT_EQ(Run("gen-syn --n 2000 --seed 7 --out " + Path("syn.csv")), 0);
  ASSERT_EQ(Run("shuffle --input " + Path("syn.csv") + " --alpha 1 --r 0.4 --seed 7"), 0);
  EXPECT_TRUE(fs::exists(Path("syn.csv.z.csv")));
  EXPECT_TRUE(fs::exists(Path("syn.csv.z.csv.json")));
  const std::string sidecar = Read("syn.csv.z.csv.json");
  EXPECT_NE(sidecar.find("\"digest\""), std::string::npos);
  EXPECT_NE(sidecar.find("\"theta\""), std::string::npos);
  EXPECT_NE(sidecar.find("\"width\""), std::string::npos);
  EXPECT_EQ(sidecar.find("sigma_star"), std::string::npos);
}

TEST_F(CliTest, ShuffleIsDeterministicGivenSeed) {
  ASSERT_EQ(Run("gen-syn --n 300 --seed 1 --out " + Path("a.csv")), 0);
  ASSERT_EQ(Run("shuffle --input " + Path("a.csv") + " --r 0.3 --seed 5 --out " + Path("z1.csv") +
                " --emit-permutation"),
            0);
  ASSERT_EQ(Run("shuffle --input " + Path("a.csv") + " --r 0.3 --seed 5 --threads 3 --out " +
                Path("z2.csv") + " --emit-permutation"),
            0);
  EXPECT_EQ(Read("z1.csv"), Read("z2.csv"));
  EXPECT_NE(Read("z1.csv.json").find("sigma_star"), std::string::npos);
  ASSERT_EQ(Run("shuffle --input " + Path("a.csv") + " --r 0.3 --seed 6 --out " + Path("z3.csv")),
            0);
  EXPECT_NE(Read("z1.csv"), Read("z3.csv"));
}

TEST_F(CliTest, AuditPasses) {
  Write("g.json", R"({"points": [[0], [1], [2], [3], [4]]})");
  ASSERT_EQ(Run("audit --n 5 --alpha 1 --r 2 --grouping-file " + Path("g.json"), "report.json"),
            0);
  const std::string rep = Read("report.json");
  EXPECT_NE(rep.find("\"pass\": true"), std::string::npos);
  EXPECT_NE(rep.find("\"max_log_ratio_observed\""), std::string::npos);
}

TEST_F(CliTest, AuditFailureExitCode) {
  // A dispersion four times too small cannot meet the claimed budget.
  Write("g.json", R"({"groups": [[0, 1, 2], [0, 1], [0, 2], [3]]})");
  EXPECT_EQ(Run("audit --alpha 1 --grouping-file " + Path("g.json") + " --theta-override 0.05",
                "report.json"),
            0);
  EXPECT_EQ(Run("audit --alpha 0.01 --grouping-file " + Path("g.json") + " --theta-override 5",
                "report.json"),
            3);
  EXPECT_NE(Read("report.json").find("\"pass\": false"), std::string::npos);
}

TEST_F(CliTest, PreserveExactMatchesBrute) {
  ASSERT_EQ(Run("preserve --method exact --n 8 --theta 0.5 --eta 0.75", "exact.json"), 0);
  ASSERT_EQ(Run("preserve --method brute --n 8 --theta 0.5 --eta 0.75", "brute.json"), 0);
  auto delta = [](const std::string& s) {
    const auto p = s.find("\"delta\": ");
    return std::stod(s.substr(p + 9));
  };
  EXPECT_NEAR(delta(Read("exact.json")), delta(Read("brute.json")), 1e-12);
  EXPECT_GT(delta(Read("exact.json")), 0.0);
}

TEST_F(CliTest, PreserveMonteCarloWithSweep) {
  ASSERT_EQ(Run("preserve --method mc --n 60 --r 3 --alpha 1 --eta 0.5 --delta 0.1 --trials 50 "
                "--sweep-out " + Path("sweep.csv"),
                "mc.json"),
            0);
  EXPECT_NE(Read("mc.json").find("\"eta_at_delta\""), std::string::npos);
  EXPECT_EQ(Read("sweep.csv").rfind("axis,value,omega,subset_size,alpha,eta\n", 0), 0u);
}

TEST_F(CliTest, LdpRoundTrip) {
  Write("x.csv", "id,x\na,0\nb,1\nc,2\n");
  ASSERT_EQ(Run("ldp --input " + Path("x.csv") + " --epsilon 50 --seed 3 --out " + Path("y.csv")),
            0);
  EXPECT_EQ(Read("y.csv"), "id,y\na,0\nb,1\nc,2\n");
}

TEST_F(CliTest, AttackLearnSweep) {
  ASSERT_EQ(Run("gen-syn --n 400 --seed 2 --out " + Path("s.csv")), 0);
  const std::string common = " --input " + Path("s.csv") + " --r 0 --trials 5 --seed 9";
  ASSERT_EQ(Run("attack" + common, "attack.json"), 0);
  EXPECT_NE(Read("attack.json").find("\"rho\""), std::string::npos);
  ASSERT_EQ(Run("learn" + common, "learn.json"), 0);
  EXPECT_NE(Read("learn.json").find("\"lambda\""), std::string::npos);
  ASSERT_EQ(Run("sweep --input " + Path("s.csv") + " --radii 0 inf --trials 5 --seed 9",
                "sweep.csv"),
            0);
  const std::string csv = Read("sweep.csv");
  EXPECT_EQ(csv.rfind("r,alpha,rho,lambda,omega,delta_sensitivity,seed\n", 0), 0u);
  EXPECT_NE(csv.find("\ninf,1,"), std::string::npos);
}

TEST_F(CliTest, ValidationErrorsExitTwo) {
  EXPECT_EQ(Run("no-such-command"), 2);
  EXPECT_EQ(Run("gen-syn --n 4"), 2);
  EXPECT_EQ(Run("gen-syn --n 20 --bogus"), 2);
  Write("dup.csv", "id,x,t_1\na,0,1\na,1,2\n");
  EXPECT_EQ(Run("shuffle --input " + Path("dup.csv")), 2);
  EXPECT_NE(Read("stderr.txt").find("line 3"), std::string::npos);
  EXPECT_EQ(Run("audit --n 9 --r 1"), 2);
  EXPECT_EQ(Run("preserve --method exact --n 30 --theta 1"), 2);
}

TEST_F(CliTest, HelpSucceeds) {
  for (const char* cmd : {"gen-syn", "ldp", "shuffle", "audit", "preserve", "attack", "learn",
                          "sweep"}) {
    EXPECT_EQ(Run(std::string(cmd) + " --help", "help.txt"), 0) << cmd;
    EXPECT_NE(Read("help.txt").find("--"), std::string::npos);
  }
}

}  // namespace
