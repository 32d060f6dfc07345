#include <gtest/gtest.h>

#include <fstream>
#include <iterator>

#include "nlohmann/json.hpp"
#include "rtfnet/cli.hpp"
#include "rtfnet/dataset.hpp"
#include "rtfnet/eval.hpp"
#include "test_support.hpp"

using namespace rtfnet;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "rtfnet");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> small_gen(const fs::path& out) {
  return {"gen-dataset", "--n-rooms", "8", "--k", "2", "--grid", "8", "8", "--mics", "5,15",
          "--seed", "3", "--out", out.string()};
}

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}), kExitArgument);
  EXPECT_EQ(run({"--help"}), kExitOk);
  EXPECT_EQ(run({"--version"}), kExitOk);
  EXPECT_EQ(run({"frobnicate"}), kExitArgument);
  EXPECT_EQ(run({"gen-dataset"}), kExitArgument);  // --out is required
  EXPECT_EQ(run({"train", "--data", "/nonexistent/rtfnet", "--out", "/tmp/x"}), kExitData);
  EXPECT_EQ(run({"compare", "--data", "x", "--out", "y", "--sweep", "sideways"}), kExitArgument);
}

TEST(Cli, GenDatasetWritesEightRecordsAndRunJson) {
  const auto dir = testsupport::temp_dir("cli_gen");
  ASSERT_EQ(run(small_gen(dir / "ds")), kExitOk);
  const Dataset ds = load_dataset(dir / "ds");
  EXPECT_EQ(ds.train.size() + ds.validation.size(), 8u);
  EXPECT_EQ(ds.config.k, 2u);
  EXPECT_EQ(ds.config.mic_choices, (std::vector<std::size_t>{5, 15}));
  const auto run_json = nlohmann::json::parse(slurp(dir / "ds" / "run.json"));
  EXPECT_EQ(run_json["command"], "gen-dataset");
  EXPECT_EQ(run_json["seed"], 3);
  EXPECT_TRUE(run_json.contains("versions"));
  EXPECT_TRUE(run_json.contains("wall_time_s"));
  // Non-empty output directory is refused without --force.
  EXPECT_EQ(run(small_gen(dir / "ds")), kExitArgument);
  auto forced = small_gen(dir / "ds");
  forced.push_back("--force");
  EXPECT_EQ(run(forced), kExitOk);
  fs::remove_all(dir);
}

TEST(Cli, GenDatasetIsByteDeterministicAcrossThreadCounts) {
  const auto dir = testsupport::temp_dir("cli_det");
  auto one = small_gen(dir / "a");
  one.insert(one.begin(), {"--threads", "1"});
  auto three = small_gen(dir / "b");
  three.insert(three.begin(), {"--threads", "3"});
  ASSERT_EQ(run(one), kExitOk);
  ASSERT_EQ(run(three), kExitOk);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    if (e.path().filename() == "run.json") continue;
    EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / e.path().filename())) << e.path();
    ++compared;
  }
  EXPECT_EQ(compared, 9u);  // meta.json and eight records
  fs::remove_all(dir);
}

TEST(Cli, ConfigFileSectionsFeedSubcommands) {
  const auto dir = testsupport::temp_dir("cli_cfg");
  {
    std::ofstream cfg(dir / "gen.toml");
    cfg << "[gen-dataset]\nn-rooms = 4\nk = 3\ngrid = [8, 8]\nseed = 9\n";
  }
  ASSERT_EQ(run({"--config", (dir / "gen.toml").string(), "gen-dataset", "--k", "2", "--out",
                 (dir / "ds").string()}),
            kExitOk);
  const Dataset ds = load_dataset(dir / "ds");
  EXPECT_EQ(ds.train.size() + ds.validation.size(), 4u);
  EXPECT_EQ(ds.config.k, 2u);  // command line wins
  EXPECT_EQ(ds.config.seed, 9u);
  fs::remove_all(dir);
}

TEST(Cli, TrainEvalCompareAndPlots) {
  const auto dir = testsupport::temp_dir("cli_pipeline");
  ASSERT_EQ(run(small_gen(dir / "ds")), kExitOk);
  ASSERT_EQ(run({"train", "--data", (dir / "ds").string(), "--out", (dir / "tr").string(), "--widths", "4,4",
                 "--batch", "2", "--max-epochs", "3", "--quiet"}),
            kExitOk);
  for (const char* f : {"history.csv", "state.ckpt", "model.ckpt", "run.json"}) {
    EXPECT_TRUE(fs::exists(dir / "tr" / f)) << f;
  }
  const auto history = slurp(dir / "tr" / "history.csv");
  EXPECT_EQ(history.substr(0, history.find('\n')), "epoch,train_loss,val_loss");
  EXPECT_EQ(std::count(history.begin(), history.end(), '\n'), 4);
  const auto info = nlohmann::json::parse(slurp(dir / "tr" / "run.json"));
  EXPECT_EQ(info["stop_reason"], "max_epochs");

  ASSERT_EQ(run({"eval", "--data", (dir / "ds").string(), "--out", (dir / "ev").string(), "--method", "cvnn",
                 "--checkpoint", (dir / "tr" / "model.ckpt").string()}),
            kExitOk);
  const auto ev = parse_metrics_csv(read_text_file(dir / "ev" / "metrics.csv"));
  ASSERT_FALSE(ev.empty());
  EXPECT_EQ(ev.front().method, "cvnn");
  EXPECT_EQ(ev.front().freqs.size(), 2u);

  ASSERT_EQ(run({"compare", "--data", (dir / "ds").string(), "--out", (dir / "cmp").string(), "--methods",
                 "kernel", "--sweep", "mics", "--mics", "5,15", "--split", "all"}),
            kExitOk);
  const auto cmp = parse_metrics_csv(read_text_file(dir / "cmp" / "metrics.csv"));
  ASSERT_EQ(cmp.size(), 2u);
  EXPECT_EQ(cmp[0].sweep, "mics");
  EXPECT_EQ(cmp[0].sweep_key, 5.0);
  EXPECT_EQ(cmp[1].sweep_key, 15.0);
  EXPECT_TRUE(fs::exists(dir / "cmp" / "plots" / "mics_nmse_complex.svg"));

  ASSERT_EQ(run({"plots", "--metrics", (dir / "cmp" / "metrics.csv").string(), "--out", (dir / "pl").string()}),
            kExitOk);
  EXPECT_TRUE(fs::exists(dir / "pl" / "mics_nmse_abs.svg"));

  // Missing checkpoint for cvnn is an argument error.
  EXPECT_EQ(run({"eval", "--data", (dir / "ds").string(), "--out", (dir / "ev2").string(), "--method", "cvnn"}),
            kExitArgument);
  fs::remove_all(dir);
}

TEST(Cli, TrainIsByteDeterministic) {
  const auto dir = testsupport::temp_dir("cli_train_det");
  ASSERT_EQ(run(small_gen(dir / "ds")), kExitOk);
  for (const char* name : {"a", "b"}) {
    ASSERT_EQ(run({"train", "--data", (dir / "ds").string(), "--out", (dir / name).string(), "--widths", "4,4",
                   "--batch", "2", "--max-epochs", "2", "--quiet"}),
              kExitOk);
  }
  for (const char* f : {"history.csv", "model.ckpt", "state.ckpt"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  fs::remove_all(dir);
}

TEST(Cli, SimulateWritesFieldAndImages) {
  const auto dir = testsupport::temp_dir("cli_sim");
  ASSERT_EQ(run({"simulate", "--freq", "80,120", "--grid", "16", "16", "--mics", "20", "--out",
                 (dir / "sim").string()}),
            kExitOk);
  for (const char* f : {"field.mdf", "field.json", "run.json"}) EXPECT_TRUE(fs::exists(dir / "sim" / f)) << f;
  std::size_t pngs = 0;
  for (const auto& e : fs::directory_iterator(dir / "sim")) pngs += e.path().extension() == ".png";
  EXPECT_GE(pngs, 4u);
  const auto info = nlohmann::json::parse(slurp(dir / "sim" / "run.json"));
  EXPECT_TRUE(info.contains("config"));
  EXPECT_EQ(run({"simulate", "--room", "4", "4", "2", "--source", "9", "1", "1", "--out", (dir / "bad").string()}),
            kExitArgument);
  fs::remove_all(dir);
}
