#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bellscope/app.hpp"

using namespace bellscope::app;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bellscope_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  ExitStatus run_command(const std::string& command, std::map<std::string, std::string> params, int jobs = 1) {
    RunConfig config;
    config.command = parse_command(command);
    config.parameters = std::move(params);
    config.jobs = jobs;
    config.out_dir = dir_;
    std::ostringstream log;
    const auto status = run(config, log);
    log_ = log.str();
    return status;
  }

  std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::string log_;
};

}  // namespace

TEST(RangeParser, AcceptsGridsAndSingles) {
  EXPECT_EQ(parse_range("p", "0.5"), std::vector<double>{0.5});
  const auto r = parse_range("alpha", "1:2:0.25");
  ASSERT_EQ(r.size(), 5U);
  EXPECT_DOUBLE_EQ(r.back(), 2.0);
  EXPECT_EQ(parse_range("alpha", "0:1:0.3").size(), 4U);
  EXPECT_EQ(parse_int_range("m", "2:10:1").size(), 9U);
}

TEST(RangeParser, RejectsMalformed) {
  EXPECT_THROW(parse_range("p", "1:2"), ConfigError);
  EXPECT_THROW(parse_range("p", "1:0:0.1"), ConfigError);
  EXPECT_THROW(parse_range("p", "0:1:0"), ConfigError);
  EXPECT_THROW(parse_range("p", "abc"), ConfigError);
  EXPECT_THROW(parse_range("p", "1:2:"), ConfigError);
  EXPECT_THROW(parse_int_range("m", "2:3:0.5"), ConfigError);
}

TEST_F(CliTest, SignGhzWritesCsvAndJson) {
  ASSERT_EQ(run_command("sign-ghz", {{"m", "2:4:1"}}), ExitStatus::success) << log_;
  const std::string csv = read("sign-ghz.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "m,bell_factor,closed_form,violates");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  const auto json = nlohmann::json::parse(read("sign-ghz.json"));
  EXPECT_EQ(json["command"], "sign-ghz");
  EXPECT_TRUE(json.contains("wall_time_seconds"));
  EXPECT_NEAR(json["results"]["rows"][1]["bell_factor"].get<double>(), 2.0317963, 1e-6);
}

TEST_F(CliTest, UnknownParameterIsConfigError) {
  EXPECT_EQ(run_command("sign-ghz", {{"alpha", "1"}}), ExitStatus::config_error);
  EXPECT_NE(log_.find("not a parameter"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "sign-ghz.csv"));
}

TEST_F(CliTest, OutOfRangeValuesAreConfigErrors) {
  EXPECT_EQ(run_command("noise-sweep", {{"m", "3"}, {"p", "0:1.5:0.5"}}), ExitStatus::config_error);
  EXPECT_EQ(run_command("sign-optimize", {{"m", "3"}, {"d", "1"}}), ExitStatus::config_error);
  EXPECT_EQ(run_command("root-max", {{"labeling", "diagonal"}}), ExitStatus::config_error);
  EXPECT_EQ(run_command("sign-ghz", {}, 0), ExitStatus::config_error);
}

TEST_F(CliTest, JobsDoNotChangeResults) {
  ASSERT_EQ(run_command("noise-sweep", {{"m", "3:5:1"}, {"p", "0:0.2:0.05"}}, 1), ExitStatus::success) << log_;
  const std::string serial = read("noise-sweep.csv");
  ASSERT_EQ(run_command("noise-sweep", {{"m", "3:5:1"}, {"p", "0:0.2:0.05"}}, 4), ExitStatus::success) << log_;
  EXPECT_EQ(read("noise-sweep.csv"), serial);
}

TEST_F(CliTest, EveryCommandRuns) {
  EXPECT_EQ(run_command("sign-optimize", {{"m", "3"}, {"d", "6"}}), ExitStatus::success) << log_;
  EXPECT_EQ(run_command("sign-optimize", {{"m", "2"}, {"d", "6"}, {"constraint", "nonneg"}}), ExitStatus::success)
      << log_;
  EXPECT_EQ(run_command("root-max", {{"m", "5"}}), ExitStatus::success) << log_;
  EXPECT_EQ(run_command("cat-vw", {{"alpha", "1:6:1"}}, 2), ExitStatus::success) << log_;
  EXPECT_EQ(run_command("psi3-curve", {{"alpha", "1:1.2:0.1"}}, 2), ExitStatus::success) << log_;
  EXPECT_EQ(run_command("prep-fidelity", {{"alpha", "2"}}), ExitStatus::success) << log_;
  EXPECT_EQ(run_command("prep-fidelity", {{"alpha", "2"}, {"x0", "-2.8"}}), ExitStatus::success) << log_;
  const auto json = nlohmann::json::parse(read("prep-fidelity.json"));
  EXPECT_TRUE(json["results"]["rows"][0].contains("alternate_ports"));
}

TEST_F(CliTest, RootMaxReachesQuantumBound) {
  ASSERT_EQ(run_command("root-max", {{"m", "4"}, {"labeling", "x-unprimed"}}), ExitStatus::success);
  const auto json = nlohmann::json::parse(read("root-max.json"));
  EXPECT_NEAR(json["results"]["bell_factor"].get<double>(), std::pow(2.0, 2.5), 1e-10);
}

TEST(CliBinary, ExitCodes) {
  const fs::path out = fs::temp_directory_path() / "bellscope_cli_binary";
  fs::remove_all(out);
  const std::string exe = BELLSCOPE_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((exe + " " + args + " --out " + out.string() + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status("sign-ghz --m 3"), 0);
  EXPECT_TRUE(fs::exists(out / "sign-ghz.csv"));
  EXPECT_EQ(status("sign-ghz --m 3:2:1"), 2);
  EXPECT_EQ(status("no-such-command"), 2);
  EXPECT_EQ(status("cat-vw --d 4"), 2);
  fs::remove_all(out);
}
