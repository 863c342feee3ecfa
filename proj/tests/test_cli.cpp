#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <regex>

#include "hcrn/report.hpp"
#include "hcrn/synthetic.hpp"
#include "support/tempdir.hpp"

namespace hcrn {
namespace {

using testing::TempDir;

struct CliRun {
  int status;
  std::string out;
  std::string err;
};

CliRun run_cli(const TempDir& dir, const std::string& args) {
  const auto out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd = std::string("'") + HCRN_CLI_PATH + "' " + args + " >'" + out.string() +
                          "' 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, read_text(out), read_text(err)};
}

void expect_error(const CliRun& r, int status, const std::string& code) {
  EXPECT_EQ(r.status, status) << r.err;
  EXPECT_TRUE(std::regex_match(r.err, std::regex("error\\[" + code + "\\]: [^\n]+\n"))) << r.err;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto data = make_synthetic({24, 12, 16, 2, 0.2});
    write_dataset(dir_ / "data", Split::kTrain, {data.begin(), data.begin() + 16});
    write_dataset(dir_ / "data", Split::kTest, {data.begin() + 16, data.end()});
  }
  std::string data() const { return "'" + (dir_ / "data").string() + "'"; }
  std::string out(const std::string& leaf) const { return "'" + (dir_ / leaf).string() + "'"; }

  TempDir dir_;
};

TEST_F(Cli, TrainEvalInspect) {
  const CliRun t = run_cli(dir_, "train --preset tiny --epochs 2 --batch 8 --task 2way --arch cnn --data " +
                                     data() + " --out " + out("run"));
  ASSERT_EQ(t.status, 0) << t.err;
  EXPECT_TRUE(std::filesystem::exists(dir_ / "run" / "confusion_cnn_2way.csv"));
  EXPECT_EQ(parse_metrics_csv(read_text(dir_ / "run" / "metrics.csv")).size(), 4u);

  const CliRun e = run_cli(dir_, "eval --ckpt " + out("run/model.ckpt") + " --data " + data() + " --split test");
  ASSERT_EQ(e.status, 0) << e.err;
  EXPECT_NE(e.out.find("samples 8"), std::string::npos);
  EXPECT_NE(e.out.find("MONONUCLEAR"), std::string::npos);

  const CliRun i = run_cli(dir_, "inspect --ckpt " + out("run/model.ckpt"));
  ASSERT_EQ(i.status, 0) << i.err;
  EXPECT_NE(i.out.find("cnn.conv1"), std::string::npos);
  EXPECT_NE(i.out.find("total parameters"), std::string::npos);
}

TEST_F(Cli, ConfigFileWithFlagOverride) {
  write_text(dir_ / "run.cfg", "preset=tiny\nepochs=5\nbatch=8\n");
  const CliRun t = run_cli(dir_, "train --config " + out("run.cfg") + " --epochs 1 --data " + data() +
                                     " --out " + out("cfg"));
  ASSERT_EQ(t.status, 0) << t.err;
  EXPECT_EQ(parse_metrics_csv(read_text(dir_ / "cfg" / "metrics.csv")).size(), 2u);
}

TEST_F(Cli, SummaryCommandCollectsConfusionFiles) {
  ConfusionMatrix m(2);
  m.add(0, 0);
  m.add(1, 0);
  write_text(dir_ / confusion_filename(Architecture::kCnnOnly, Task::kTwoWay),
             confusion_csv(m, LabelCodec(Task::kTwoWay).class_names()));
  const CliRun r = run_cli(dir_, "summary --dir '" + dir_.path().string() + "'");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("50.00%"), std::string::npos);
  EXPECT_EQ(read_text(dir_ / "summary.txt"), r.out);
}

TEST_F(Cli, ExitCodes) {
  expect_error(run_cli(dir_, "train --arch rnn --data " + data() + " --out " + out("x")), 2, "E_CONFIG");
  expect_error(run_cli(dir_, "train --preset tiny --set bogus=1 --data " + data() + " --out " + out("x")), 2,
               "E_CONFIG");
  expect_error(run_cli(dir_, "frobnicate"), 2, "E_USAGE");
  expect_error(run_cli(dir_, "eval --data " + data()), 2, "E_USAGE");
  expect_error(run_cli(dir_, "train --preset tiny --data " + out("nowhere") + " --out " + out("x")), 3,
               "E_DATASET");

  write_text(dir_ / "bad.ckpt", "HCRN garbage");
  expect_error(run_cli(dir_, "inspect --ckpt " + out("bad.ckpt")), 4, "E_INTEGRITY");
  expect_error(run_cli(dir_, "inspect --ckpt " + out("missing.ckpt")), 5, "E_IO");

  write_text(dir_ / "blocker", "");
  expect_error(run_cli(dir_, "train --preset tiny --epochs 1 --data " + data() + " --out " + out("blocker/sub")),
               5, "E_IO");
}

TEST_F(Cli, UndecodableImageIsDatasetError) {
  write_text(dir_ / "data" / "TRAIN" / "MONOCYTE" / "zz.ppm", "P6\n2 2\n255\n");
  expect_error(run_cli(dir_, "train --preset tiny --epochs 1 --data " + data() + " --out " + out("x")), 3,
               "E_INGESTION");
}

}  // namespace
}  // namespace hcrn
