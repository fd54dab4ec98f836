// tests/test_support.h

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

// Small helpers shared by the unit tests and the acceptance suite.

#ifndef POSM_TESTS_TEST_SUPPORT_H_
#define POSM_TESTS_TEST_SUPPORT_H_

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "posm/linalg.h"
#include "posm/model.h"
#include "posm/solver.h"
#include "posm/types.h"

namespace posm::testing {

// Direct O(N^2) DFT of a real sequence, onesided.
inline std::vector<Complex> brute_dft(const std::vector<double> &x) {
  const std::size_t n = x.size();
  std::vector<Complex> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    Complex acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ph = -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      acc += x[t] * Complex(std::cos(ph), std::sin(ph));
    }
    out[k] = acc;
  }
  return out;
}

inline Complex cgauss(std::mt19937_64 &rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  const double re = g(rng);
  return {re, g(rng)};
}

// Random positive-variance LGM instance: M = N channels, I x J bins.
struct Instance {
  SpectroTensor x;
  DemixingStack w;
  std::vector<NmfModel> nmf;
  std::vector<VarianceField> r_dnn;
};

inline Instance random_instance(std::size_t n_freq, std::size_t n_frames, std::size_t n_src,
                                std::size_t n_bases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.x = SpectroTensor(n_src, n_freq, n_frames);
  for (auto &v : inst.x.data()) v = cgauss(rng);
  inst.w = DemixingStack::identity(n_freq, n_src);
  for (auto &wi : inst.w.w)
    for (std::size_t r = 0; r < n_src; ++r)
      for (std::size_t c = 0; c < n_src; ++c) wi(r, c) += 0.5 * cgauss(rng);
  std::uniform_real_distribution<double> pos(0.1, 2.0);
  for (std::size_t n = 0; n < n_src; ++n) {
    inst.nmf.push_back(NmfModel::random(n_freq, n_frames, n_bases, seed * 101 + n));
    RealMatrix r(n_freq, n_frames);
    for (auto &v : r.data()) v = pos(rng);
    inst.r_dnn.push_back({r, VarianceKind::estimator});
  }
  return inst;
}

inline std::vector<VarianceField> nmf_fields(const std::vector<NmfModel> &nmf) {
  std::vector<VarianceField> out;
  for (const auto &m : nmf) out.push_back(nmf_variance(m));
  return out;
}

inline std::vector<VarianceField> tilde_fields(const std::vector<NmfModel> &nmf,
                                               const std::vector<VarianceField> &r_dnn,
                                               const PosmWeights &w) {
  std::vector<VarianceField> out;
  for (std::size_t n = 0; n < nmf.size(); ++n)
    out.push_back(combine_posm(nmf_variance(nmf[n]), r_dnn[n], w));
  return out;
}

inline double rel_increase(double before, double after) {
  return (after - before) / std::max(1.0, std::abs(before));
}

inline std::string temp_dir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("posm_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace posm::testing

#endif  // POSM_TESTS_TEST_SUPPORT_H_
