// tests/test_cli.cc

// Copyright 2026  The posm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "posm/audio_io.h"
#include "posm/cli.h"
#include "posm/keyvalue.h"
#include "test_support.h"

using namespace posm;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "posm");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string &text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

const std::vector<std::string> kSmall{"--window", "512", "--hop", "256", "--outer", "2", "--inner", "3", "--k", "4"};

std::vector<std::string> with_small(std::vector<std::string> args) {
  args.insert(args.end(), kSmall.begin(), kSmall.end());
  return args;
}

std::string make_scene(const std::string &dir) {
  const auto r = run({"simulate", "--out", dir, "--duration", "2", "--seed", "3"});
  REQUIRE(r.code == kExitOk);
  return dir + "/scene.txt";
}

}  // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"separate", "--bogus", "1"}).code == kExitUsage);
  CHECK(run({"separate", "--out", "/tmp/x"}).code == kExitUsage);
  CHECK(run({"simulate", "--out", testing::temp_dir("cli_bad"), "--channels", "3"}).code == kExitUsage);
  CHECK(run({"separate", "--input", "/no/such.wav", "--mode", "ilrma", "--out", testing::temp_dir("cli_io")}).code ==
        kExitIo);
}

TEST_CASE("simulate and separate with an oracle") {
  const auto dir = testing::temp_dir("cli_sep");
  const auto manifest = make_scene(dir + "/scene");
  CHECK(fs::exists(dir + "/scene/observed.wav"));
  CHECK(fs::exists(dir + "/scene/image_2.wav"));

  const auto out = dir + "/out";
  auto r = run(with_small({"separate", "--scene", manifest, "--mode", "posm", "--alpha", "0.001", "--estimator",
                           "oracle:" + manifest, "--out", out}));
  REQUIRE(r.code == kExitOk);
  for (const char *f : {"src_1.wav", "src_2.wav", "trace.csv", "run_manifest.txt"}) CHECK(fs::exists(out + "/" + f));
  const auto trace = slurp(out + "/trace.csv");
  CHECK(line_count(trace) == 1 + 6);
  CHECK(trace.find("nan") == std::string::npos);
  CHECK(read_wav(out + "/src_1.wav").length() == 16000);

  const auto kv = KeyValueFile::load(out + "/run_manifest.txt");
  CHECK(kv.get_double("beta") == doctest::Approx(0.999));
  // The manifest replays the run; explicit flags still override it.
  const auto again = dir + "/again";
  r = run({"separate", "--config", out + "/run_manifest.txt", "--out", again});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(again + "/trace.csv") == trace);
}

TEST_CASE("estimator specs") {
  const auto dir = testing::temp_dir("cli_est");
  const auto manifest = make_scene(dir + "/scene");
  auto r = run(with_small({"separate", "--scene", manifest, "--estimator",
                           "oracle-corrupt:" + manifest + ":band_swap:0.5", "--out", dir + "/c"}));
  CHECK(r.code == kExitOk);
  r = run(with_small({"separate", "--scene", manifest, "--estimator", "oracle-corrupt:" + manifest + ":bogus:0.5",
                      "--out", dir + "/c2"}));
  CHECK(r.code == kExitUsage);
  r = run(with_small({"separate", "--scene", manifest, "--mode", "ilrma", "--estimator", "oracle:" + manifest,
                      "--out", dir + "/i"}));
  CHECK(r.code == kExitOk);
  CHECK(r.err.find("ignored") != std::string::npos);
  r = run(with_small({"separate", "--scene", manifest, "--mode", "idlma", "--out", dir + "/n"}));
  CHECK(r.code == kExitUsage);

  // Variance file for 2 sources of the right shape (2 s at 512/256 -> 257 x 66).
  std::vector<VarianceField> fields(2, {RealMatrix(257, 66, 0.5), VarianceKind::estimator});
  write_variance_file(fields, dir + "/v.psm1");
  r = run(with_small({"separate", "--input", dir + "/scene/observed.wav", "--mode", "idlma", "--estimator",
                      "file:" + dir + "/v.psm1", "--out", dir + "/f"}));
  CHECK(r.code == kExitOk);
  // No scene, so no references: SDR columns stay empty.
  CHECK(slurp(dir + "/f/trace.csv").find("nan") != std::string::npos);
}

TEST_CASE("train then separate with the trained estimators") {
  const auto dir = testing::temp_dir("cli_train");
  auto r = run({"train", "--out", dir + "/est", "--scenes", "1", "--duration", "2", "--window", "256", "--hop", "128",
                "--hidden", "8", "--epochs", "3"});
  REQUIRE(r.code == kExitOk);
  CHECK(line_count(slurp(dir + "/est/loss_curve.csv")) == 1 + 4);
  const auto manifest = make_scene(dir + "/scene");
  r = run({"separate", "--scene", manifest, "--window", "256", "--hop", "128", "--outer", "1", "--inner", "2",
           "--estimator", "mlp:" + dir + "/est/est_1.psm2," + dir + "/est/est_2.psm2", "--out", dir + "/sep"});
  CHECK(r.code == kExitOk);
  r = run({"separate", "--scene", manifest, "--estimator", "mlp:" + dir + "/est/est_1.psm2", "--out", dir + "/x"});
  CHECK(r.code == kExitUsage);
  r = run({"train", "--out", dir + "/none", "--scenes", "0"});
  CHECK(r.code == kExitUsage);
}

TEST_CASE("silent input is a numerical failure") {
  const auto dir = testing::temp_dir("cli_num");
  write_wav(TimeSignal(2, 4000, 8000), {8000, 2, SampleFormat::float32}, dir + "/zero.wav");
  const auto r = run(with_small({"separate", "--input", dir + "/zero.wav", "--mode", "ilrma", "--out", dir + "/o"}));
  CHECK(r.code == kExitNumerical);
}

TEST_CASE("bench output is complete and reproducible") {
  const auto dir = testing::temp_dir("cli_bench");
  const std::vector<std::string> args = with_small({"bench", "--scenes", "2", "--duration", "2", "--alphas", "0.5,0.01"});
  auto a = args, b = args;
  a.insert(a.end(), {"--out", dir + "/a"});
  b.insert(b.end(), {"--out", dir + "/b"});
  REQUIRE(run(a).code == kExitOk);
  REQUIRE(run(b).code == kExitOk);
  const auto summary = slurp(dir + "/a/bench_summary.csv");
  CHECK(line_count(summary) == 1 + (2 + 2) * 2);
  CHECK(line_count(slurp(dir + "/a/bench_long.csv")) == 1 + (2 + 2) * 2 * 6);
  CHECK(summary == slurp(dir + "/b/bench_summary.csv"));
  CHECK(slurp(dir + "/a/bench_long.csv") == slurp(dir + "/b/bench_long.csv"));
}
