#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace graphon_rds;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "graphon-rds");
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  const auto dir = fs::temp_directory_path() / "graphon_rds_cli_tests" /
                   (std::string(info->test_suite_name()) + "." + info->name());
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

nlohmann::json small_config() {
  return {{"kernel", {{"kind", "block"}, {"alpha", 0.5}, {"beta", 0.3}, {"delta", 0.1}, {"gamma", 0.4}}},
          {"sampler", {{"kind", "markov"}, {"burn_in", 10}}},
          {"n_schedule", {40, 80}},
          {"replications", 3},
          {"motifs", {"edge", "triangle"}},
          {"seed", 5}};
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Runs `args` into dir/a, reruns from dir/a/manifest.json into dir/b, and
// checks both manifests list the same output hashes and the files match.
void expect_rerun_identical(const fs::path& dir, std::vector<std::string> args) {
  auto first = args;
  first.insert(first.end(), {"--out", (dir / "a").string()});
  const auto r1 = run(first);
  ASSERT_EQ(r1.code, kExitOk) << r1.err;
  const auto r2 = run({args.front(), "--config", (dir / "a" / "manifest.json").string(), "--out",
                       (dir / "b").string()});
  ASSERT_EQ(r2.code, kExitOk) << r2.err;
  const auto m1 = read_json(dir / "a" / "manifest.json");
  const auto m2 = read_json(dir / "b" / "manifest.json");
  ASSERT_FALSE(m1["outputs"].empty());
  EXPECT_EQ(m1["outputs"], m2["outputs"]);
  EXPECT_EQ(m1["config"]["seed"], m2["config"]["seed"]);
  for (const auto& [name, hash] : m1["outputs"].items()) {
    EXPECT_EQ(read_file(dir / "a" / name), read_file(dir / "b" / name)) << name;
    EXPECT_EQ(hex64(file_hash(dir / "b" / name)), hash.get<std::string>()) << name;
  }
}

}  // namespace

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"tsub"}).code, kExitUsage);
  EXPECT_EQ(run({"tsub", "--motif", "edge", "--exact", "--mc", "10"}).code, kExitUsage);
  EXPECT_EQ(run({"--format", "xml", "distortion"}).code, kExitUsage);
  EXPECT_EQ(run({"--threads", "-3", "distortion"}).code, kExitUsage);
}

TEST(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("converge"), std::string::npos);
}

TEST(Cli, RuntimeErrorsExitTwo) {
  const auto dir = scratch_dir();
  EXPECT_EQ(run({"tsub", "--motif", "edge", "--graph", (dir / "missing.bin").string()}).code, kExitRuntime);
  EXPECT_EQ(run({"tsub", "--motif", "pentagon"}).code, kExitRuntime);
  EXPECT_EQ(run({"--config", (dir / "missing.json").string(), "converge"}).code, kExitRuntime);
  const auto bad = write_config(dir, {{"n_schedule", {10, 5}}});
  const auto r = run({"--config", bad.string(), "converge"});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("n_schedule"), std::string::npos);
}

TEST(Cli, TsubOnLimitKernelPrintsNumber) {
  const auto r = run({"tsub", "--motif", "edge"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const ExperimentConfig cfg;
  const auto limit = limit_kernel(cfg.make_kernel(), cfg.sampler);
  EXPECT_EQ(std::stod(r.out), t_kernel(named_motif("edge"), limit, ClosedFormBlock{}).value);
  const auto j = run({"--format", "json", "tsub", "--motif", "triangle"});
  ASSERT_EQ(j.code, kExitOk);
  EXPECT_EQ(nlohmann::json::parse(j.out)["motif"], "k=3; edges=1-2,1-3,2-3");
}

TEST(Cli, GenerateThenTsubAndDsub) {
  const auto dir = scratch_dir();
  const auto cfg = write_config(dir, small_config());
  const auto out = dir / "gen";
  const auto g = run({"--config", cfg.string(), "--out", out.string(), "generate", "--n", "60", "--edge-list"});
  ASSERT_EQ(g.code, kExitOk) << g.err;
  ASSERT_TRUE(fs::exists(out / "graph.bin"));
  ASSERT_TRUE(fs::exists(out / "edges.txt"));
  std::ifstream in(out / "graph.bin", std::ios::binary);
  const auto graph = read_graph_binary(in);
  EXPECT_EQ(graph.n(), 60u);
  const auto t = run({"tsub", "--graph", (out / "graph.bin").string(), "--motif", "path3", "--exact"});
  ASSERT_EQ(t.code, kExitOk) << t.err;
  EXPECT_EQ(std::stod(t.out), t_exact(named_motif("path3"), graph));
  const auto te = run({"tsub", "--graph", (out / "edges.txt").string(), "--motif", "path3", "--exact"});
  EXPECT_EQ(te.out, t.out);
  const auto d = run({"--config", cfg.string(), "dsub", "--graph", (out / "graph.bin").string(), "--other",
                      (out / "edges.txt").string()});
  ASSERT_EQ(d.code, kExitOk) << d.err;
  EXPECT_EQ(std::stod(d.out), 0.0);
}

TEST(Cli, StationaryAndDistortionFiles) {
  const auto dir = scratch_dir();
  const auto s = run({"--out", dir.string(), "stationary", "--points", "11"});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  EXPECT_NE(s.out.find("tau(gamma)="), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "stationary.csv"));
  const auto d = run({"--out", dir.string(), "distortion", "--alpha", "0.3", "--beta", "0.1", "--delta", "0.05"});
  ASSERT_EQ(d.code, kExitOk) << d.err;
  for (const char* f : {"fig2.csv", "fig3.svg", "fig4.csv", "custom.csv"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
}

TEST(Cli, RerunFromManifestIsBitIdentical) {
  const auto dir = scratch_dir();
  const auto cfg = write_config(dir, small_config()).string();
  expect_rerun_identical(dir / "converge", {"converge", "--config", cfg});
  expect_rerun_identical(dir / "ergodic", {"ergodic", "--config", cfg});
  expect_rerun_identical(dir / "sample", {"sample", "--config", cfg, "--n", "70"});
  expect_rerun_identical(dir / "generate", {"generate", "--config", cfg, "--n", "50", "--edge-list"});
  expect_rerun_identical(dir / "stationary", {"stationary", "--config", cfg, "--points", "21"});
  expect_rerun_identical(dir / "distortion", {"distortion", "--points", "9", "--alpha", "0.3", "--beta", "0.1", "--delta", "0.05"});
}

TEST(Cli, SeedOverrideChangesOutput) {
  const auto dir = scratch_dir();
  const auto cfg = write_config(dir, small_config()).string();
  ASSERT_EQ(run({"--config", cfg, "--out", (dir / "a").string(), "sample", "--n", "30"}).code, kExitOk);
  ASSERT_EQ(run({"--config", cfg, "--seed", "6", "--out", (dir / "b").string(), "sample", "--n", "30"}).code, kExitOk);
  EXPECT_NE(read_file(dir / "a" / "trace.csv"), read_file(dir / "b" / "trace.csv"));
  EXPECT_EQ(read_json(dir / "b" / "manifest.json")["config"]["seed"], 6);
}
