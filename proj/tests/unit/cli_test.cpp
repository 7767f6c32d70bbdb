#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "oscctl/errors.hpp"
#include "oscctl_cli/commands.hpp"
#include "oscctl_cli/config.hpp"

namespace oscctl::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("oscctl-test-" + name);
  fs::remove_all(p);
  return p;
}

int tool(const std::string& args) {
  const std::string cmd = std::string(OSCCTL_TOOL_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, ToyDefaults) {
  const RunConfig c = default_config(Command::Toy);
  EXPECT_EQ(c.omega, std::vector<double>{1.0});
  EXPECT_EQ(c.x0, (std::vector<double>{10.0, 0.0}));
  ASSERT_TRUE(c.r_switch.has_value());
  EXPECT_EQ(*c.r_switch, 2.0);
  EXPECT_EQ(c.r_switch_kind, RadiusKind::Euclidean);
  const ControlDesign d = make_run_design(c);
  EXPECT_NEAR(d.plan.theta, std::pow(3.0, 0.25), 1e-10);
  EXPECT_DOUBLE_EQ(d.plan.kappa2, 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(d.plan.U, d.plan.lambda_in / 2);
}

TEST(Config, RoundTrip) {
  for (Command cmd : {Command::Simulate, Command::Toy, Command::RatioStudy, Command::Convergence}) {
    RunConfig c = default_config(cmd);
    c.omega = {1.0, std::sqrt(2.0)};
    c.x0 = {0.1, -2.5, 1.0 / 3.0, 7.0};
    c.theta = 0.123456789012345678;
    c.dt_list = {1e-3, 5e-4};
    c.seed = 987654321;
    const RunConfig back = parse_config_text(serialize(c), default_config(Command::Tables));
    EXPECT_EQ(back, c) << to_string(cmd);
    EXPECT_EQ(serialize(back), serialize(c));
  }
}

TEST(Config, Overrides) {
  RunConfig c = default_config(Command::Simulate);
  apply_override(c, "system.omega=1, 2");
  apply_override(c, "numerics.dt=5e-4");
  apply_override(c, "plan.r_switch=auto");
  EXPECT_EQ(c.omega, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(c.dt, 5e-4);
  EXPECT_FALSE(c.r_switch.has_value());
  EXPECT_THROW(apply_override(c, "numerics.nope=1"), ParseError);
  EXPECT_THROW(apply_override(c, "numerics.dt=fast"), ParseError);
  EXPECT_THROW(apply_override(c, "no-equals-sign"), ParseError);
}

TEST(Config, ParseErrorsNameTheField) {
  try {
    parse_config_text("[numerics]\ndt = abc\n", default_config(Command::Simulate));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("numerics.dt"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_config_text("[numerics\n", default_config(Command::Simulate)), ParseError);
}

TEST(Config, ValidationNamesTheField) {
  RunConfig c = default_config(Command::Simulate);
  c.omega = {1.0, 1.0};
  c.x0 = {1, 0, 1, 0};
  try {
    validate(c);
    FAIL();
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("system.omega"), std::string::npos) << what;
    EXPECT_NE(what.find("Kalman"), std::string::npos) << what;
  }
  c = default_config(Command::Simulate);
  c.dt = -1;
  EXPECT_THROW(validate(c), ValidationError);
  c = default_config(Command::Simulate);
  c.x0 = {1.0};
  EXPECT_THROW(validate(c), ValidationError);
}

TEST(Tables, DimFourIsExact) {
  RunConfig c = default_config(Command::Tables);
  c.table_dim = 4;
  const auto j = tables_json(c);
  const int base[4][4] = {{1, -9, 21, -14}, {-9, 111, -294, 210}, {21, -294, 840, -630}, {-14, 210, -630, 490}};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) EXPECT_EQ(j["Q"][i][k].get<std::string>(), std::to_string(20 * base[i][k]));
}

TEST(Run, ToyWritesArtifactsDeterministically) {
  const fs::path a = scratch("toy-a"), b = scratch("toy-b");
  RunConfig c = default_config(Command::Toy);
  c.sample_stride = 100;
  std::ostringstream out, err;
  c.output_dir = a.string();
  EXPECT_EQ(run(c, out, err), kExitOk);
  c.output_dir = b.string();
  EXPECT_EQ(run(c, out, err), kExitOk);
  for (const char* f : {"trajectory.csv", "events.csv"}) {
    ASSERT_TRUE(fs::exists(a / f)) << f;
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  // The summaries differ only in the echoed output directory.
  auto sa = nlohmann::json::parse(slurp(a / "summary.json"));
  auto sb = nlohmann::json::parse(slurp(b / "summary.json"));
  sa["config"]["run"].erase("output_dir");
  sb["config"]["run"].erase("output_dir");
  EXPECT_EQ(sa, sb);
  const RunConfig echoed = read_config_file((a / "config.ini").string(), default_config(Command::Tables));
  EXPECT_EQ(echoed.x0, c.x0);
  EXPECT_EQ(echoed.r_switch, c.r_switch);
}

TEST(Run, ResonanceAdvisory) {
  RunConfig c = default_config(Command::Simulate);
  c.omega = {1.0, 2.0};
  // Inside the inscribed ball of the terminal zone so the run stays short.
  c.x0 = {2e-4, 0.0, 1e-4, 0.0};
  c.dt = 1e-2;
  c.sample_stride = 100;
  c.output_dir = scratch("resonant").string();
  std::ostringstream out, err;
  EXPECT_EQ(run(c, out, err), kExitOk);
  EXPECT_NE(err.str().find("resonant"), std::string::npos);
}

TEST(Tool, ExitCodes) {
  const std::string out = scratch("tool").string();
  EXPECT_EQ(tool("-o " + out + " tables --dim 4"), 0);
  EXPECT_EQ(tool("-o " + out + " tables --dim 3"), 2);
  EXPECT_EQ(tool("-o " + out + " -s system.omega=1,1 simulate"), 2);
  EXPECT_EQ(tool("-o " + out + " -s numerics.bogus=1 simulate"), 2);
  EXPECT_EQ(tool("frobnicate"), 2);
  EXPECT_EQ(tool("-c /nonexistent.ini simulate"), 2);
}

}  // namespace
}  // namespace oscctl::cli
