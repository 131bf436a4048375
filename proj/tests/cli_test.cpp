#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "random_specs.hpp"
#include "rcep/case.hpp"
#include "rcep/cli.hpp"
#include "rcep/monolithic.hpp"

namespace rcep {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("rcep_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = (dir_ / name).string();
    std::ofstream(path, std::ios::binary) << text;
    return path;
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  nlohmann::json json_out() const { return nlohmann::json::parse(out_.str()); }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, SolveIpEpnsMatchesOracle) {
  const auto cf = gen_case({3, 3, 2, 0.05, 11});
  const auto path = write("case.json", serialize_case(cf));
  ASSERT_EQ(run({"solve", path, "--mode", "ip-epns"}), kExitOk) << err_.str();
  const auto doc = json_out();
  EXPECT_EQ(doc["report"]["violated_periods"], 0);
  EXPECT_EQ(doc["states"]["mode"], "exact");
  EXPECT_TRUE(doc["benders_log"]["converged"].get<bool>());
  EXPECT_FALSE(doc["benders_log"]["iterations"][0].contains("seconds"));

  const auto oracle = solve_monolithic(cf.spec, enumerate_states(cf.spec), cf.criterion);
  ASSERT_EQ(oracle.status, LpStatus::Optimal);
  const double total = doc["report"]["total_cost"];
  EXPECT_NEAR(total, oracle.objective, 1e-6 * oracle.objective);

  double lb = -1e300;
  for (const auto& it : doc["benders_log"]["iterations"]) {
    EXPECT_GE(it["lower_bound"].get<double>(), lb);
    lb = it["lower_bound"];
  }
}

TEST_F(CliTest, ReportsAreDeterministic) {
  const auto path = write("case.json", serialize_case(gen_case({4, 3, 2, 0.05, 3})));
  ASSERT_EQ(run({"compare", path, "--threads", "1"}), kExitOk) << err_.str();
  const std::string one = out_.str();
  ASSERT_EQ(run({"compare", path, "--threads", "1"}), kExitOk);
  EXPECT_EQ(out_.str(), one);
  ASSERT_EQ(run({"compare", path, "--threads", "4"}), kExitOk);
  auto a = nlohmann::json::parse(one);
  auto b = json_out();
  a["options"].erase("threads");
  b["options"].erase("threads");
  EXPECT_EQ(a, b);
}

TEST_F(CliTest, EvaluateFlagsEpPlanWithoutFailing) {
  const auto path = write("case.json", serialize_case(gen_case({4, 3, 3, 0.1, 5})));
  ASSERT_EQ(run({"solve", path, "--mode", "ep", "--out", (dir_ / "ep.json").string()}), kExitOk);
  ASSERT_EQ(run({"evaluate", path, "--plan", (dir_ / "ep.json").string()}), kExitOk)
      << err_.str();
  EXPECT_GT(json_out()["report"]["violated_periods"].get<int>(), 0);
  ASSERT_EQ(run({"evaluate", path, "--format", "table"}), kExitOk);
  EXPECT_NE(out_.str().find("violated"), std::string::npos);
}

TEST_F(CliTest, ExitCodes) {
  const auto path = write("case.json", serialize_case(gen_case({2, 1, 1, 0.0, 7})));
  EXPECT_EQ(run({"solve", path, "--mode", "ep", "--no-such-flag"}), kExitUsage);
  EXPECT_NE(err_.str().find("Usage"), std::string::npos);
  EXPECT_EQ(run({}), kExitUsage);
  EXPECT_EQ(run({"--help"}), kExitOk);
  EXPECT_EQ(run({"solve", (dir_ / "missing.json").string(), "--mode", "ep"}), kExitUsage);

  auto bad = nlohmann::json::parse(serialize_case(gen_case({2, 1, 1, 0.0, 7})));
  bad["generators"][0]["outage_prob"] = 1.5;
  EXPECT_EQ(run({"solve", write("bad.json", bad.dump()), "--mode", "ep"}), kExitUsage);
  EXPECT_NE(err_.str().find(".generators[0].outage_prob"), std::string::npos);

  // Instance A with its 30 MW candidate cannot reach 1% EPNS.
  CaseFile a{1, "a", testing::instance_a(true), {Metric::Epns, 0.01, 0.05}, {}};
  EXPECT_EQ(run({"solve", write("a.json", serialize_case(a)), "--mode", "ip-epns"}),
            kExitInfeasible);

  CaseFile slow = gen_case({4, 4, 3, 0.1, 2});
  slow.options.max_iter = 1;
  EXPECT_EQ(run({"solve", write("slow.json", serialize_case(slow)), "--mode", "ip-epns"}),
            kExitResource);
}

TEST_F(CliTest, GenCaseAndDumpMip) {
  ASSERT_EQ(run({"gen-case", "--existing", "2", "--candidates", "1", "--periods", "1",
                 "--seed", "9"}),
            kExitOk);
  const std::string text = out_.str();
  EXPECT_NO_THROW(parse_case(text));
  ASSERT_EQ(run({"gen-case", "--existing", "2", "--candidates", "1", "--periods", "1",
                 "--seed", "9"}),
            kExitOk);
  EXPECT_EQ(out_.str(), text);

  const auto path = write("case.json", text);
  for (const char* metric : {"epns", "cvar", "lolp", "var", "none"}) {
    ASSERT_EQ(run({"dump-mip", path, "--metric", metric}), kExitOk) << err_.str();
    EXPECT_NE(out_.str().find("Subject To"), std::string::npos);
  }
}

}  // namespace
}  // namespace rcep
