// tests/test_eval.cc

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

#include <random>
#include <sstream>

#include "posm/eval.h"
#include "posm/keyvalue.h"
#include "posm/simulate.h"
#include "test_support.h"

using namespace posm;

namespace {

std::vector<double> gauss(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto &v : x) v = g(rng);
  return x;
}

MixtureScene small_scene() {
  SceneParams p;
  p.duration_s = 1.0;
  p.seed = 4;
  return generate_scene(p);
}

std::vector<TimeSignal> images_at(const MixtureScene &scene, std::size_t ref) {
  std::vector<TimeSignal> out;
  for (const auto &img : scene.images) out.push_back(img.channel(ref));
  return out;
}

}  // namespace

TEST_CASE("si_sdr closed forms") {
  const auto ref = gauss(1000, 1);
  CHECK(si_sdr(ref, ref) == 100.0);
  auto twice = ref;
  for (auto &v : twice) v *= 2.0;
  CHECK(si_sdr(twice, ref) == 100.0);

  // Noise made orthogonal to ref, scaled to 1/100 of its energy: 20 dB.
  auto n = gauss(1000, 2);
  double rr = 0, rn = 0;
  for (std::size_t t = 0; t < 1000; ++t) {
    rr += ref[t] * ref[t];
    rn += ref[t] * n[t];
  }
  double nn = 0;
  for (std::size_t t = 0; t < 1000; ++t) {
    n[t] -= rn / rr * ref[t];
    nn += n[t] * n[t];
  }
  auto est = ref;
  for (std::size_t t = 0; t < 1000; ++t) est[t] += n[t] * std::sqrt(rr / 100.0 / nn);
  CHECK(si_sdr(est, ref) == doctest::Approx(20.0).epsilon(1e-11));
  auto scaled = est;
  for (auto &v : scaled) v *= 3.7;
  CHECK(si_sdr(scaled, ref) == doctest::Approx(si_sdr(est, ref)).epsilon(1e-13));

  CHECK_THROWS_AS(si_sdr(ref, std::vector<double>(1000, 0.0)), InvalidArgument);
  CHECK_THROWS_AS(si_sdr(ref, gauss(999, 3)), InvalidArgument);
}

TEST_CASE("evaluate_scene on perfect, swapped and trivial estimates") {
  const auto scene = small_scene();
  const auto perfect = images_at(scene, 0);
  const auto r = evaluate_scene(scene, perfect, 0);
  for (double v : r.si_sdr_db) CHECK(v == 100.0);
  CHECK(r.permutation == std::vector<std::size_t>{0, 1});

  const std::vector<TimeSignal> swapped{perfect[1], perfect[0]};
  const auto s = evaluate_scene(scene, swapped, 0);
  CHECK(s.permutation == std::vector<std::size_t>{1, 0});
  CHECK(s.si_sdr_db == r.si_sdr_db);
  CHECK(s.si_sdr_improvement_db == r.si_sdr_improvement_db);

  const auto mixture = scene.observed.channel(1);
  const auto m = evaluate_scene(scene, {mixture, mixture}, 1);
  for (double v : m.si_sdr_improvement_db) CHECK(std::abs(v) < 0.1);
  CHECK(m.mean_improvement() == doctest::Approx((m.si_sdr_improvement_db[0] + m.si_sdr_improvement_db[1]) / 2));

  auto shorter = perfect;
  for (auto &sig : shorter) sig.channels[0].resize(sig.length() - 10);
  CHECK(evaluate_scene(scene, shorter, 0).trimmed_samples == 10);
  CHECK_THROWS_AS(evaluate_scene(scene, {perfect[0]}, 0), InvalidArgument);
}

TEST_CASE("trace CSV round-trips") {
  const std::vector<double> cost{-1.25, 3.0000000000000004, 1e-300};
  SdrReport rep;
  rep.si_sdr_improvement_db = {0.1, 1.0 / 3.0};
  const auto csv = trace_to_csv(cost, {rep, rep}, 2);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "iteration,cost,sdr_improvement_src1,sdr_improvement_src2");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    REQUIRE(cells.size() == 4);
    CHECK(std::stoul(cells[0]) == rows + 1);
    CHECK(std::stod(cells[1]) == cost[rows]);
    if (rows < 2) {
      CHECK(std::stod(cells[3]) == 1.0 / 3.0);
    } else {
      CHECK(cells[3] == "nan");
    }
    ++rows;
  }
  CHECK(rows == 3);
}

TEST_CASE("key-value files") {
  KeyValueFile kv;
  kv.set("alpha", 0.1);
  kv.set("name", std::string("x y"));
  kv.set("n", static_cast<std::int64_t>(-3));
  const auto back = KeyValueFile::parse("# comment\n" + kv.str());
  CHECK(back.get_double("alpha") == 0.1);
  CHECK(back.get("name") == "x y");
  CHECK(back.get_int("n") == -3);
  CHECK_THROWS_AS(back.get("missing"), InvalidArgument);
  CHECK_THROWS_AS(back.get_uint("n"), InvalidArgument);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
