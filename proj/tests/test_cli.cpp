#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fracgrowth/cli.hpp"
#include "fracgrowth/serialization.hpp"

namespace fs = std::filesystem;
using fracgrowth::cli::run;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("fracgrowth_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const std::string& text) {
    const auto path = dir_ / name;
    std::ofstream(path) << text;
    return path.string();
  }

  int call(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
  }

  static std::vector<std::string> lines(const fs::path& p) {
    std::ifstream f(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(f, line);) out.push_back(line);
    return out;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

const char* kEvolveConfig = R"({
  "crack": {"origin": [0, 0.5]},
  "domain": {"h": 0.0625},
  "physics": {"w0": {"x": 0.4, "y": 1}},
  "evolution": {"delta_a": 0.125, "steps": 8, "raster_depth": 3, "load": [[0, 0], [1, 3]]}
})";

}  // namespace

TEST_F(CliTest, CurveDepthOneHasFiveVertices) {
  const auto cfg = write_config("c.json", R"({"curve_output":{"depth":1,"holder_depth":3}})");
  ASSERT_EQ(call({"curve", "--config", cfg, "--out", (dir_ / "out").string()}), 0) << err_.str();
  const auto rows = lines(dir_ / "out" / "prefractal.csv");
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "s,x,y");
  EXPECT_EQ(rows[1], "0,0,0");
  EXPECT_EQ(rows[5], "1,1,0");
  EXPECT_TRUE(fs::exists(dir_ / "out" / "holder.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "manifest.json"));
}

TEST_F(CliTest, ZeroLoadEvolutionKeepsTheTip) {
  const auto cfg = write_config("e.json", R"({"crack":{"origin":[0,0.5]},"domain":{"h":0.0625},
    "evolution":{"delta_a":0.125,"steps":4,"raster_depth":3,"a0":0.25,"load":[[0,0],[1,0]]}})");
  ASSERT_EQ(call({"evolve", "--config", cfg, "--out", (dir_ / "out").string()}), 0) << err_.str();
  std::ifstream in(dir_ / "out" / "trace.csv");
  const auto trace = fracgrowth::read_trace_csv(in);
  ASSERT_EQ(trace.records.size(), 5u);
  for (const auto& r : trace.records) EXPECT_EQ(r.a, 0.25);
}

TEST_F(CliTest, AuditAcceptsTheTraceAndRejectsAFault) {
  const auto cfg = write_config("e.json", kEvolveConfig);
  const auto out = (dir_ / "out").string();
  ASSERT_EQ(call({"evolve", "--config", cfg, "--out", out}), 0) << err_.str();
  const auto trace_path = (dir_ / "out" / "trace.csv").string();
  EXPECT_EQ(call({"audit", "--config", cfg, "--trace", trace_path, "--out", (dir_ / "audit").string()}), 0)
      << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "audit" / "audit.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "audit" / "energy_balance.csv"));

  std::ifstream in(trace_path);
  auto trace = fracgrowth::read_trace_csv(in);
  std::size_t grown = 0;
  for (std::size_t i = 0; i < trace.records.size(); ++i)
    if (trace.records[i].a > 0.0) {
      grown = i;
      break;
    }
  ASSERT_GT(grown, 0u);
  trace.records[grown].a -= 0.125;
  const auto bad_path = dir_ / "bad.csv";
  {
    std::ofstream bad(bad_path, std::ios::binary);
    fracgrowth::write_trace_csv(bad, trace);
  }
  EXPECT_EQ(call({"audit", "--config", cfg, "--trace", bad_path.string(), "--out", (dir_ / "audit2").string()}), 3);
}

TEST_F(CliTest, BadConfigExitsWithOne) {
  const auto cfg = write_config("bad.json", R"({"physics":{"kind":"plasma"}})");
  EXPECT_EQ(call({"solve", "--config", cfg, "--out", (dir_ / "out").string()}), 1);
  EXPECT_FALSE(err_.str().empty());
  const auto unknown = write_config("unknown.json", R"({"solverr":{}})");
  EXPECT_EQ(call({"solve", "--config", unknown}), 1);
  EXPECT_EQ(call({"solve", "--config", (dir_ / "missing.json").string()}), 1);
  EXPECT_EQ(call({"explode"}), 1);
  EXPECT_EQ(call({"solve"}), 1);
}

TEST_F(CliTest, SolverFailureExitsWithTwo) {
  const auto cfg = write_config("s.json", R"({"domain":{"h":0.03125},"physics":{"w0":{"xx":1}},
    "solver":{"iteration_cap":1},"crack":{"a":0}})");
  EXPECT_EQ(call({"solve", "--config", cfg, "--out", (dir_ / "out").string()}), 2);
}

TEST_F(CliTest, RepeatedRunsAreByteIdentical) {
  const auto cfg = write_config("e.json", kEvolveConfig);
  const auto solve_cfg = write_config("s.json", R"({"crack":{"origin":[0,0.5],"a":0.7},"domain":{"h":0.03125},
    "physics":{"integrand":"p_power","p":1.5}})");
  const auto run_twice = [&](const std::string& command, const std::string& config, const std::string& file) {
    std::vector<std::uint64_t> hashes;
    for (int k = 0; k < 2; ++k) {
      const auto out = dir_ / (command + std::to_string(k));
      EXPECT_EQ(call({command, "--config", config, "--out", out.string(), "--threads", std::to_string(k + 1)}), 0)
          << err_.str();
      hashes.push_back(fracgrowth::fnv1a64(slurp(out / file)));
    }
    EXPECT_EQ(hashes[0], hashes[1]) << command;
  };
  run_twice("evolve", cfg, "trace.csv");
  run_twice("solve", solve_cfg, "field.csv");
  run_twice("solve", solve_cfg, "mask.csv");
}

TEST_F(CliTest, SolveConvergeAndDimensionWriteTheirTables) {
  const auto cfg = write_config("all.json", R"({"crack":{"origin":[0,0.5]},"domain":{"h":0.0625},
    "converge":{"depths":[1,2,3]},"dimension":{"depth":6,"eps":[0.1111111111111111,0.037037037037037035,0.012345679012345678,0.004115226337448559],
    "content_depths":[0,1],"content_eps":[0.3333333333333333,0.1111111111111111],"deep_depth":6}})");
  const auto out = (dir_ / "out").string();
  ASSERT_EQ(call({"solve", "--config", cfg, "--out", out}), 0) << err_.str();
  EXPECT_EQ(lines(dir_ / "out" / "field.csv").size(), 17u * 17u + 1u);
  EXPECT_EQ(lines(dir_ / "out" / "mask.csv").front(), "i1,j1,i2,j2");
  ASSERT_EQ(call({"converge", "--config", cfg, "--out", out}), 0) << err_.str();
  const auto conv = lines(dir_ / "out" / "convergence.csv");
  ASSERT_EQ(conv.size(), 4u);
  EXPECT_EQ(conv[0], "depth,hausdorff,energy,gradient_distance,severed_edges");
  ASSERT_EQ(call({"dimension", "--config", cfg, "--out", out}), 0) << err_.str();
  EXPECT_EQ(lines(dir_ / "out" / "dimension.csv").size(), 2u);
  EXPECT_EQ(lines(dir_ / "out" / "box_counts.csv").size(), 5u);
  EXPECT_EQ(lines(dir_ / "out" / "semicontinuity.csv").size(), 1u + 3u * 2u);
  const auto manifest = slurp(dir_ / "out" / "manifest.json");
  EXPECT_NE(manifest.find("\"dimension\""), std::string::npos);
}
