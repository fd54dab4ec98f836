// tests/test_solver.cc

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

#include <cmath>
#include <numbers>

#include "posm/dsp.h"
#include "posm/estimators.h"
#include "posm/simulate.h"
#include "posm/solver.h"
#include "test_support.h"

using namespace posm;
using testing::Instance;
using testing::random_instance;

namespace {

SpectroTensor scalar_x(Complex v) {
  SpectroTensor x(1, 1, 1);
  x(0, 0, 0) = v;
  return x;
}

NmfModel scalar_nmf(double t, double v) {
  return {RealMatrix(1, 1, t), RealMatrix(1, 1, v)};
}

double posm_cost(const Instance &in, const PosmWeights &w) {
  return compute_cost(in.w, in.x, testing::nmf_fields(in.nmf), in.r_dnn, w);
}

}  // namespace

TEST_CASE("cost of scalar examples") {
  const auto w = DemixingStack::identity(1, 1);
  const auto x = scalar_x(1.0);
  const std::vector<VarianceField> none;
  CHECK(compute_cost(w, x, {nmf_variance(scalar_nmf(1, 1))}, none, {1, 0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(compute_cost(w, x, {nmf_variance(scalar_nmf(std::numbers::e, 1))}, none, {1, 0}) ==
        doctest::Approx(1.0 + 1.0 / std::numbers::e).epsilon(1e-15));

  DemixingStack singular = DemixingStack::identity(1, 2);
  singular.w[0](1, 1) = 0.0;
  const auto inst = random_instance(1, 4, 2, 2, 1);
  CHECK_THROWS_WITH_AS(compute_cost(singular, inst.x, testing::nmf_fields(inst.nmf), inst.r_dnn, {0.5, 0.5}),
                       doctest::Contains("degenerate demixing matrix"), NumericalError);
}

TEST_CASE("mode=posm with equal experts equals the single-expert cost") {
  const auto in = random_instance(4, 6, 2, 2, 3);
  const auto r = testing::nmf_fields(in.nmf);
  const double posm = compute_cost(in.w, in.x, r, r, {0.3, 0.7});
  const double single = compute_cost(in.w, in.x, {}, r, {0.0, 1.0});
  CHECK(posm == doctest::Approx(single).epsilon(1e-12));
}

TEST_CASE("ILRMA basis update example and fixed point") {
  auto nmf = scalar_nmf(1, 1);
  update_nmf_ilrma(nmf, RealMatrix(1, 1, 4.0));
  // t goes to 2; v then sees TV = 2 and |y|^2 = 4 and moves to sqrt(2).
  CHECK(nmf.basis(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(nmf.activation(0, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  auto fit = NmfModel::random(5, 7, 2, 9);
  const auto power = nmf_variance(fit).r;
  const auto keep = fit;
  update_nmf_ilrma(fit, power);
  for (std::size_t k = 0; k < keep.basis.size(); ++k)
    CHECK(fit.basis.data()[k] == doctest::Approx(keep.basis.data()[k]).epsilon(1e-12));
  for (std::size_t k = 0; k < keep.activation.size(); ++k)
    CHECK(fit.activation.data()[k] == doctest::Approx(keep.activation.data()[k]).epsilon(1e-12));
}

TEST_CASE("PoSM update reduces to ILRMA and has the model as a fixed point") {
  auto a = NmfModel::random(6, 9, 3, 4), b = a;
  const auto in = random_instance(6, 9, 1, 3, 5);
  const auto power = in.x.power(0);
  update_nmf_ilrma(a, power);
  update_nmf_posm(b, power, in.r_dnn[0], {1.0, 0.0});
  for (std::size_t k = 0; k < a.basis.size(); ++k)
    CHECK(b.basis.data()[k] == doctest::Approx(a.basis.data()[k]).epsilon(1e-12));
  for (std::size_t k = 0; k < a.activation.size(); ++k)
    CHECK(b.activation.data()[k] == doctest::Approx(a.activation.data()[k]).epsilon(1e-12));

  auto fit = NmfModel::random(6, 9, 3, 6);
  const PosmWeights w{0.4, 0.6};
  const auto tilde = combine_posm(nmf_variance(fit), in.r_dnn[0], w).r;
  const auto keep = fit;
  update_nmf_posm(fit, tilde, in.r_dnn[0], w);
  for (std::size_t k = 0; k < keep.basis.size(); ++k)
    CHECK(fit.basis.data()[k] == doctest::Approx(keep.basis.data()[k]).epsilon(1e-12));
}

TEST_CASE("NMF sweeps never increase the cost") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto in = random_instance(8, 16, 2, 3, seed);
    const PosmWeights w{0.5, 0.5};
    const double before = posm_cost(in, w);
    const auto y = demix(in.w, in.x);
    for (std::size_t n = 0; n < 2; ++n) update_nmf_posm(in.nmf[n], y.power(n), in.r_dnn[n], w);
    CHECK(testing::rel_increase(before, posm_cost(in, w)) <= 1e-8);

    auto il = random_instance(8, 16, 2, 3, seed + 1000);
    const double b2 = posm_cost(il, {1, 0});
    const auto y2 = demix(il.w, il.x);
    for (std::size_t n = 0; n < 2; ++n) update_nmf_ilrma(il.nmf[n], y2.power(n));
    CHECK(testing::rel_increase(b2, posm_cost(il, {1, 0})) <= 1e-8);
  }
}

TEST_CASE("IP sweeps never increase the cost and normalize rows") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto in = random_instance(8, 16, 2, 3, seed);
    const PosmWeights w{0.5, 0.5};
    const auto tilde = testing::tilde_fields(in.nmf, in.r_dnn, w);
    const double before = posm_cost(in, w);
    ip_update(in.w, in.x, tilde);
    CHECK(testing::rel_increase(before, posm_cost(in, w)) <= 1e-8);
    // w_in^H U_in w_in = 1 for the last-updated row, which no later step touches.
    for (std::size_t i = 0; i < 8; ++i) {
      const std::size_t n = 1;
      Complex quad = 0.0;
      for (std::size_t j = 0; j < 16; ++j) {
        Complex y = 0.0;
        for (std::size_t m = 0; m < 2; ++m) y += in.w.w[i](n, m) * in.x(m, i, j);
        quad += std::norm(y) / tilde[n].r(i, j);
      }
      CHECK(std::abs(quad.real() / 16.0 - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("scalar IP gives 1/sqrt(U)") {
  SpectroTensor x(1, 1, 3);
  x(0, 0, 0) = Complex(1, 1);
  x(0, 0, 1) = 2.0;
  x(0, 0, 2) = Complex(0, -0.5);
  RealMatrix r(1, 3);
  r.data() = {0.5, 2.0, 1.5};
  const double u = (2.0 / 0.5 + 4.0 / 2.0 + 0.25 / 1.5) / 3.0;
  for (Complex start : {Complex(1.0), Complex(-3.0, 2.0), Complex(0.01)}) {
    auto w = DemixingStack::identity(1, 1);
    w.w[0](0, 0) = start;
    ip_update(w, x, {{r, VarianceKind::posm}});
    CHECK(std::abs(std::abs(w.w[0](0, 0)) - 1.0 / std::sqrt(u)) < 1e-14);
  }
}

TEST_CASE("projection back") {
  auto in = random_instance(5, 7, 3, 2, 8);
  const auto id = DemixingStack::identity(5, 3);
  const auto kept = projection_back(in.x, id, 1);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 7; ++j) {
      CHECK(kept(1, i, j) == in.x(1, i, j));
      CHECK(kept(0, i, j) == Complex(0.0));
      CHECK(kept(2, i, j) == Complex(0.0));
    }

  const auto y = projection_back(demix(in.w, in.x), in.w, 2);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 7; ++j) {
      const Complex s = y(0, i, j) + y(1, i, j) + y(2, i, j);
      CHECK(std::abs(s - in.x(2, i, j)) < 1e-10);
    }

  auto scaled = in.w;
  for (auto &wi : scaled.w) wi *= Complex(0.3, -2.0);
  const auto y2 = projection_back(demix(scaled, in.x), scaled, 2);
  for (std::size_t k = 0; k < y.data().size(); ++k) CHECK(std::abs(y2.data()[k] - y.data()[k]) < 1e-10);
}

TEST_CASE("separate: reductions, monotone blocks, PB and determinism") {
  const auto in = random_instance(6, 12, 2, 2, 21);
  std::vector<OracleEstimator> oracles;
  for (std::size_t n = 0; n < 2; ++n) oracles.emplace_back(demix(in.w, in.x).magnitude(n));
  const std::vector<const VarianceEstimator *> est{&oracles[0], &oracles[1]};

  SolverConfig cfg;
  cfg.outer_iters = 3;
  cfg.inner_iters = 4;
  cfg.n_bases = 2;
  cfg.seed = 5;
  cfg.mode = SolverMode::ilrma;
  const auto ilrma = separate(in.x, cfg, {});
  REQUIRE(ilrma.cost_trace.size() == 12);
  cfg.mode = SolverMode::posm;
  cfg.weights = {1.0, 0.0};
  const auto p1 = separate(in.x, cfg, est);
  for (std::size_t k = 0; k < 12; ++k)
    CHECK(p1.cost_trace[k] == doctest::Approx(ilrma.cost_trace[k]).epsilon(1e-9));

  cfg.mode = SolverMode::idlma;
  const auto idlma = separate(in.x, cfg, est);
  cfg.mode = SolverMode::posm;
  cfg.weights = {0.0, 1.0};
  const auto p0 = separate(in.x, cfg, est);
  for (std::size_t k = 0; k < 12; ++k)
    CHECK(p0.cost_trace[k] == doctest::Approx(idlma.cost_trace[k]).epsilon(1e-9));

  cfg.weights = {0.5, 0.5};
  cfg.ref_channel = 1;
  std::size_t calls = 0;
  const auto run = separate(in.x, cfg, est, [&](const IterationView &v) {
    ++calls;
    CHECK(v.iteration == calls);
    for (std::size_t i = 0; i < 6; ++i)
      for (std::size_t j = 0; j < 12; ++j)
        CHECK(std::abs(v.state.y(0, i, j) + v.state.y(1, i, j) - in.x(1, i, j)) < 1e-9);
    if (v.inner > 1) {
      const auto &t = v.state.cost_trace;
      CHECK(testing::rel_increase(t[t.size() - 2], t.back()) <= 1e-8);
    }
  });
  CHECK(calls == 12);
  CHECK(separate(in.x, cfg, est).cost_trace == run.cost_trace);

  CHECK_THROWS_AS(separate(in.x, cfg, {&oracles[0]}), InvalidArgument);
  OracleEstimator wrong(RealMatrix(5, 12, 1.0));
  CHECK_THROWS_AS(separate(in.x, cfg, {&wrong, &wrong}), InvalidArgument);
}

TEST_CASE("separate keeps already-separated channels apart") {
  // Identity mixing: each channel holds one source.
  const StftConfig stft_cfg{512, 256, WindowKind::hamming, 8000};
  TimeSignal x(2, 32000, 8000);
  x.channels[0] = synth_dry(DryKind::tonal, 4.0, 8000, 1).channels[0];
  x.channels[1] = synth_dry(DryKind::percussive, 4.0, 8000, 2).channels[0];
  const auto spec = stft(x, stft_cfg);
  std::vector<OracleEstimator> oracles{OracleEstimator(spec.magnitude(0)), OracleEstimator(spec.magnitude(1))};
  SolverConfig cfg;
  cfg.weights = {1e-3, 1.0 - 1e-3};
  const auto state = separate(spec, cfg, {&oracles[0], &oracles[1]});
  std::size_t dominant = 0;
  for (const auto &wi : state.w.w) {
    const bool ok = std::abs(wi(0, 0)) > std::abs(wi(0, 1)) && std::abs(wi(1, 1)) > std::abs(wi(1, 0));
    dominant += ok;
  }
  CHECK(double(dominant) >= 0.95 * double(state.w.freqs()));
}
