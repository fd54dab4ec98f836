// tests/test_estimators.cc

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

#include <algorithm>
#include <random>

#include "posm/estimators.h"
#include "test_support.h"

using namespace posm;

namespace {

RealMatrix random_mag(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  RealMatrix m(rows, cols);
  for (auto &v : m.data()) v = u(rng);
  return m;
}

}  // namespace

TEST_CASE("training loss examples") {
  RealMatrix s(1, 1, 1.0), z(1, 1, 0.0);
  CHECK(training_loss(z, s, 1e-5) == doctest::Approx(99988.487070).epsilon(1e-9));
  const auto m = random_mag(4, 5, 1);
  CHECK(training_loss(m, m, 1e-5) == 0.0);
  CHECK(training_loss(z, z, 1e-5) == 0.0);
  CHECK(training_loss(random_mag(4, 5, 2), m, 1e6) < 1e-10);
  CHECK(training_loss(random_mag(4, 5, 3), m, 1e-5) > 0.0);
}

TEST_CASE("training loss has the shape of the Gaussian cost in sigma") {
  // Per cell: Gaussian negative log-likelihood log r + p / r with r = sigma^2 + delta,
  // p = s^2 + delta, versus q - log q - 1. They differ by a sigma-free constant.
  const double delta = 1e-5;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int cell = 0; cell < 3; ++cell) {
    const double s = u(rng);
    auto nll = [&](double sg) { return std::log(sg * sg + delta) + (s * s + delta) / (sg * sg + delta); };
    auto loss = [&](double sg) {
      RealMatrix a(1, 1, sg), b(1, 1, s);
      return training_loss(a, b, delta);
    };
    const double c0 = nll(0.7) - loss(0.7);
    for (double sg : {0.1, 1.3, 2.9}) CHECK(nll(sg) - loss(sg) == doctest::Approx(c0).epsilon(1e-8));
    const double h = 1e-6, sg = u(rng);
    const double d_nll = (nll(sg + h) - nll(sg - h)) / (2 * h);
    const double d_loss = (loss(sg + h) - loss(sg - h)) / (2 * h);
    const double analytic = 2 * sg / (sg * sg + delta) * (1.0 - (s * s + delta) / (sg * sg + delta));
    CHECK(d_nll == doctest::Approx(analytic).epsilon(1e-6));
    CHECK(d_loss == doctest::Approx(analytic).epsilon(1e-6));
  }
}

TEST_CASE("oracle and file estimators") {
  const auto truth = random_mag(3, 4, 9);
  OracleEstimator o(truth);
  CHECK(o.estimate(random_mag(3, 4, 1)) == truth);
  CHECK_THROWS_AS(o.estimate(RealMatrix(3, 5)), InvalidArgument);
  RealMatrix r(2, 2);
  r.data() = {4.0, 9.0, 0.25, 1.0};
  FileEstimator f({r, VarianceKind::estimator});
  CHECK(f.estimate(RealMatrix(2, 2)).data() == std::vector<double>{2.0, 3.0, 0.5, 1.0});
}

TEST_CASE("zero-parameter toy estimator outputs softplus(0)") {
  ToyEstimator est(6, 4);
  const auto sigma = est.estimate(random_mag(6, 3, 2));
  for (double v : sigma.data()) CHECK(v == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(est.estimate(RealMatrix(5, 3)), InvalidArgument);
}

TEST_CASE("toy estimator is deterministic") {
  const auto est = ToyEstimator::random(10, 8, 3);
  const auto in = random_mag(10, 7, 4);
  CHECK(est.estimate(in) == est.estimate(in));
  CHECK(ToyEstimator::random(10, 8, 3).parameters() == est.parameters());
}

TEST_CASE("backprop matches central differences") {
  auto est = ToyEstimator::random(12, 9, 5);
  const auto in = random_mag(12, 1, 6), target = random_mag(12, 1, 7);
  std::vector<double> grad;
  est.frame_loss(in.data(), target.data(), 1e-5, &grad);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> pick(0, est.parameter_count() - 1);
  for (int probe = 0; probe < 30; ++probe) {
    const std::size_t k = pick(rng);
    const double keep = est.parameters()[k], h = 1e-4;
    est.parameters()[k] = keep + h;
    const double up = est.frame_loss(in.data(), target.data(), 1e-5, nullptr);
    est.parameters()[k] = keep - h;
    const double dn = est.frame_loss(in.data(), target.data(), 1e-5, nullptr);
    est.parameters()[k] = keep;
    const double fd = (up - dn) / (2 * h);
    CHECK(std::abs(fd - grad[k]) / std::max({std::abs(fd), std::abs(grad[k]), 1e-6}) < 1e-4);
  }
}

TEST_CASE("training reduces the loss and save/load round-trips") {
  const auto mag = random_mag(8, 40, 10);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.batch_size = 8;
  cfg.learning_rate = 3e-3;
  const auto result = train_toy(ToyEstimator::random(8, 16, 1), {{mag, mag}}, cfg);
  REQUIRE(result.loss_curve.size() == 61);
  CHECK(result.loss_curve.back() < result.loss_curve.front());
  CHECK(mean_frame_loss(result.estimator, {{mag, mag}}, cfg.delta) ==
        doctest::Approx(result.loss_curve.back()));

  const auto path = testing::temp_dir("psm2") + "/e.psm2";
  result.estimator.save(path);
  const auto back = ToyEstimator::load(path);
  CHECK(back.parameters() == result.estimator.parameters());
  CHECK(back.estimate(mag) == result.estimator.estimate(mag));
  CHECK_THROWS_AS(train_toy(ToyEstimator::random(8, 4, 1), {}, cfg), InvalidArgument);
}

TEST_CASE("corruptions") {
  const auto truth = random_mag(20, 6, 11);
  const OracleEstimator o(truth);
  CHECK(corrupt_oracle(o, Corruption::band_swap, 0.0, 1).ground_truth() == truth);
  CHECK(corrupt_oracle(o, Corruption::smear, 0.0, 1).ground_truth() == truth);

  const auto swapped = corrupt_oracle(o, Corruption::band_swap, 1.0, 3).ground_truth();
  auto rows_of = [](const RealMatrix &m) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < m.rows(); ++i) rows.emplace_back(m.row(i), m.row(i) + m.cols());
    std::sort(rows.begin(), rows.end());
    return rows;
  };
  CHECK(rows_of(swapped) == rows_of(truth));
  std::size_t moved = 0;
  for (std::size_t i = 0; i < 20; ++i) moved += !std::equal(truth.row(i), truth.row(i) + 6, swapped.row(i));
  CHECK(moved == 20);
  CHECK(corrupt_oracle(o, Corruption::band_swap, 0.5, 3).ground_truth() == corrupt_oracle(o, Corruption::band_swap, 0.5, 3).ground_truth());

  for (double strength : {0.1, 0.5, 1.0}) {
    const auto smeared = corrupt_oracle(o, Corruption::smear, strength, 0).ground_truth();
    CHECK_FALSE(smeared == truth);
    for (std::size_t j = 0; j < 6; ++j) {
      double a = 0.0, b = 0.0;
      for (std::size_t i = 0; i < 20; ++i) {
        a += truth(i, j);
        b += smeared(i, j);
      }
      CHECK(std::abs(a - b) <= 1e-9 * a);
    }
  }
  CHECK_THROWS_AS(corrupt_oracle(o, Corruption::smear, 1.5, 0), InvalidArgument);
  CHECK_THROWS_AS(parse_corruption("blur"), InvalidArgument);
}
