// Copyright 2026 The pipeint Authors
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


#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pipeint/cli.hpp"
#include "pipeint/generators.hpp"
#include "pipeint/io.hpp"

namespace pipeint {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pipeint_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
  }
  fs::path dir_;
};

const std::string kEx7 = PIPEINT_FIXTURES "/ex7.json";

TEST(Io, RoundTrip) {
  std::vector<Instance> xs{gen_example7(3, 0.1, 1.0), gen_separation(0.6),
                           gen_random(5, 3, 4, 0.5, 0.7),
                           gen_hardness(triangle_graph(), 2, 0.25, 3).instance};
  auto weighted = gen_random(6, 2, 3, 1.0, 1.0);
  weighted.cost_model.kind = CostKind::kWeightedL1;
  for (std::size_t t = 0; t < 2; ++t) weighted.cost_model.weights.emplace_back(2, 2, 1.5);
  xs.push_back(weighted);
  for (const auto& in : xs) {
    const auto back = instance_from_json(Json::parse(instance_to_json(in).dump()));
    EXPECT_EQ(back, in);
    EXPECT_EQ(instance_digest(back), instance_digest(in));
  }
}

TEST(Io, FixtureMatchesGenerator) {
  EXPECT_EQ(parse_instance(kEx7), gen_example7(3, 0.1, 1.0));
}

TEST(Io, MissingMaskMeansAllMalleable) {
  auto j = instance_to_json(gen_separation(0.6));
  j.erase("malleable");
  j.erase("cost_model");
  const auto in = instance_from_json(j);
  EXPECT_TRUE(in.all_malleable());
  EXPECT_EQ(in.cost_model.kind, CostKind::kL1);
}

TEST(Io, PlanAndMixtureRoundTrip) {
  const auto in = gen_separation(0.6);
  const auto p = separation_path_plan(in, 1);
  EXPECT_EQ(plan_from_json(Json::parse(plan_to_json(p).dump()), in), p);
  MixedPlan mp{{{0.25, separation_path_plan(in, 0)}, {0.75, p}}};
  const auto back = mixture_from_json(Json::parse(mixture_to_json(mp).dump()), in);
  ASSERT_EQ(back.support.size(), 2u);
  EXPECT_EQ(back.support[1].plan, p);
  EXPECT_EQ(back.support[0].weight, 0.25);
}

TEST_F(CliTest, ValidateReportsLayerAndColumn) {
  auto j = read_json_file(kEx7);
  j["transitions"][0][1][1] = 0.9;
  write("bad.json", j.dump());
  const auto r = run({"validate", "--instance", path("bad.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("layer 0"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("column 1"), std::string::npos) << r.err;
}

TEST_F(CliTest, InputErrorsExitTwo) {
  write("syntax.json", "{\"layers\": [2, ");
  write("shape.json", R"({"layers":[2,2],"rewards":[1,0],"initial_distribution":[1,0],
                         "budget":1,"transitions":[[[1,0]]]})");
  EXPECT_EQ(run({"validate", "--instance", path("missing.json")}).code, 2);
  EXPECT_EQ(run({"validate", "--instance", path("syntax.json")}).code, 2);
  EXPECT_EQ(run({"validate", "--instance", path("shape.json")}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"solve-welfare", "--instance", kEx7, "--epsilon", "0"}).code, 2);
}

TEST_F(CliTest, ValidatePrintsDigest) {
  const auto r = run({"validate", "--instance", kEx7});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.json()["digest"], "d565a730ec45d9dc");
}

TEST_F(CliTest, SolveExample7) {
  const auto w = run({"solve-welfare", "--instance", kEx7, "--epsilon", "0.05",
                      "--out", path("plan.json"), "--csv", path("rewards.csv")});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_NEAR(w.json()["objective"].get<double>(), 0.40, 1e-6);
  EXPECT_TRUE(w.json()["meta"].contains("wall_ms"));
  const auto in = parse_instance(kEx7);
  const auto plan = plan_from_json(read_json_file(path("plan.json")), in);
  EXPECT_TRUE(check_plan(in, plan).empty());
  std::ifstream csv(path("rewards.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "population,expected_reward");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 3);

  const auto m = run({"solve-maximin", "--instance", kEx7, "--epsilon", "0.05"});
  ASSERT_EQ(m.code, 0);
  EXPECT_NEAR(m.json()["objective"].get<double>(), 1.0 / 6.0, 1e-6);

  const auto e = run({"solve-exante", "--instance", kEx7, "--epsilon", "0.1",
                      "--out", path("mix.json")});
  ASSERT_EQ(e.code, 0);
  EXPECT_EQ(e.json()["meta"]["details"]["regret_holds"], 1.0);
  EXPECT_FALSE(mixture_from_json(read_json_file(path("mix.json")), in).support.empty());
}

TEST_F(CliTest, OutputIsDeterministic) {
  auto strip = [](Json j) {
    j["meta"].erase("wall_ms");
    return j.dump();
  };
  const auto a = run({"solve-maximin", "--instance", kEx7, "--epsilon", "0.1"});
  const auto b = run({"solve-maximin", "--instance", kEx7, "--epsilon", "0.1", "--threads", "2"});
  EXPECT_EQ(strip(a.json()), strip(b.json()));
}

TEST_F(CliTest, GenSeparationThenOracle) {
  const auto g = run({"gen", "--family", "separation", "--B", "0.6", "--out", path("sep.json")});
  ASSERT_EQ(g.code, 0) << g.err;
  EXPECT_EQ(g.json()["digest"], "21662961b5d0118c");
  const auto o = run({"oracle", "--instance", path("sep.json"), "--grid", "0.05"});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto j = o.json();
  EXPECT_GE(j["exante_maximin"]["objective"].get<double>(),
            j["expost_maximin"]["objective"].get<double>() - 1e-9);
  EXPECT_GE(j["welfare"]["objective"].get<double>(), 0.1705 - 1e-9);
}

TEST_F(CliTest, GenWarningsAndFamilies) {
  const auto sep = run({"gen", "--family", "separation", "--B", "0.9"});
  EXPECT_EQ(sep.code, 0);
  EXPECT_NE(sep.err.find("0.6"), std::string::npos);
  write("g.txt", "0 1\n1 2\n");
  const auto h = run({"gen", "--family", "hardness", "--graph", path("g.txt"), "--kappa", "1",
                      "--k", "3", "--out", path("h.json")});
  ASSERT_EQ(h.code, 0) << h.err;
  EXPECT_TRUE(validate_instance(parse_instance(path("h.json"))).empty());
  EXPECT_EQ(run({"gen", "--family", "nope"}).code, 2);
}

TEST_F(CliTest, GenRandomGoldenDigests) {
  for (const auto& e : read_json_file(PIPEINT_FIXTURES "/random_digests.json")) {
    const auto r = run({"gen", "--family", "random", "--seed", std::to_string(e["seed"].get<int>()),
                        "--w", "3", "--k", "4", "--malleable-fraction", "0.7", "--B", "1",
                        "--out", path("r.json")});
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.json()["digest"], e["digest"]);
  }
}

TEST_F(CliTest, SizeCapExitsThree) {
  ASSERT_EQ(run({"gen", "--family", "random", "--w", "4", "--k", "3", "--out", path("r.json")}).code, 0);
  const auto r = run({"solve-maximin", "--instance", path("r.json"), "--epsilon", "0.01"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("size cap"), std::string::npos);
  EXPECT_EQ(run({"oracle", "--instance", path("r.json"), "--grid", "0.01", "--cap", "1000"}).code, 3);
}

TEST_F(CliTest, BoundsWithPlanAudit) {
  ASSERT_EQ(run({"solve-maximin", "--instance", kEx7, "--out", path("p.json")}).code, 0);
  const auto r = run({"bounds", "--instance", kEx7, "--plan", path("p.json"), "--bracket"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.json();
  EXPECT_NEAR(j["welfare_upper_bound"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(j["maximin_lower_bound"].get<double>(), 1.0 / 6.0, 1e-12);
  EXPECT_TRUE(j.contains("price_of_fairness_bracket"));
  EXPECT_TRUE(j.contains("plan_audit"));
}

// The installed binary maps errors to the same exit codes.
TEST_F(CliTest, ExecutableExitCodes) {
  const std::string exe = PIPEINT_CLI_PATH;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(s);
  };
  EXPECT_EQ(status(exe + " validate --instance " + kEx7), 0);
  EXPECT_EQ(status(exe + " validate --instance " + path("none.json")), 2);
  ASSERT_EQ(status(exe + " gen --family random --w 3 --k 3 --out " + path("r.json")), 0);
  EXPECT_EQ(status(exe + " solve-welfare --instance " + path("r.json") + " --cap 2"), 3);
}

}  // namespace
}  // namespace pipeint
