// src/model.cc

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

#include "posm/model.h"

#include <algorithm>
#include <cmath>
#include <random>

namespace posm {

RealMatrix SpectroTensor::magnitude(std::size_t n) const {
  RealMatrix out(freqs_, frames_);
  for (std::size_t i = 0; i < freqs_; ++i)
    for (std::size_t j = 0; j < frames_; ++j) out(i, j) = std::abs((*this)(n, i, j));
  return out;
}

RealMatrix SpectroTensor::power(std::size_t n) const {
  RealMatrix out(freqs_, frames_);
  for (std::size_t i = 0; i < freqs_; ++i)
    for (std::size_t j = 0; j < frames_; ++j) out(i, j) = std::norm((*this)(n, i, j));
  return out;
}

NmfModel NmfModel::random(std::size_t n_freq, std::size_t n_frames, std::size_t n_bases,
                          std::uint64_t seed) {
  if (n_freq == 0 || n_frames == 0 || n_bases == 0)
    throw InvalidArgument("nmf: dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(0.1, 1.0);
  NmfModel m{RealMatrix(n_freq, n_bases), RealMatrix(n_bases, n_frames)};
  for (auto &v : m.basis.data()) v = dist(rng);
  for (auto &v : m.activation.data()) v = dist(rng);
  return m;
}

void PosmWeights::validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !std::isfinite(alpha) || !std::isfinite(beta))
    throw InvalidArgument("posm weights must be finite and nonnegative");
  if (!(alpha + beta > 0.0)) throw InvalidArgument("posm weights are degenerate: alpha = beta = 0");
}

DemixingStack DemixingStack::identity(std::size_t n_freq, std::size_t n) {
  return DemixingStack{std::vector<ComplexMatrix>(n_freq, ComplexMatrix::identity(n))};
}

VarianceField nmf_variance(const NmfModel &model) {
  const auto &t = model.basis;
  const auto &v = model.activation;
  if (t.cols() != v.rows()) throw InvalidArgument("nmf: basis/activation rank mismatch");
  RealMatrix r(t.rows(), v.cols());
  for (std::size_t i = 0; i < t.rows(); ++i) {
    double *out = r.row(i);
    for (std::size_t k = 0; k < t.cols(); ++k) {
      const double tik = t(i, k);
      const double *vk = v.row(k);
      for (std::size_t j = 0; j < v.cols(); ++j) out[j] += tik * vk[j];
    }
  }
  return {std::move(r), VarianceKind::nmf};
}

VarianceField combine_posm(const VarianceField &r_nmf, const VarianceField &r_dnn,
                           const PosmWeights &weights) {
  weights.validate();
  const double a = weights.alpha;
  const double b = weights.beta;
  if (b == 0.0) {
    VarianceField out{r_nmf.r, VarianceKind::posm};
    if (a != 1.0)
      for (auto &x : out.r.data()) x /= a;
    return out;
  }
  if (a == 0.0) {
    VarianceField out{r_dnn.r, VarianceKind::posm};
    if (b != 1.0)
      for (auto &x : out.r.data()) x /= b;
    return out;
  }
  if (!r_nmf.r.same_shape(r_dnn.r)) throw InvalidArgument("combine_posm: shape mismatch");
  RealMatrix r(r_nmf.r.rows(), r_nmf.r.cols());
  const auto &p = r_nmf.r.data();
  const auto &q = r_dnn.r.data();
  auto &o = r.data();
  for (std::size_t k = 0; k < o.size(); ++k) o[k] = 1.0 / (a / p[k] + b / q[k]);
  return {std::move(r), VarianceKind::posm};
}

VarianceField floor_variance(const RealMatrix &sigma, double eps) {
  if (!(eps > 0.0)) throw InvalidArgument("floor_variance: eps must be positive");
  RealMatrix r(sigma.rows(), sigma.cols());
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double s = sigma.data()[k];
    if (s < 0.0 || !std::isfinite(s))
      throw InvalidArgument("floor_variance: standard deviations must be finite and >= 0");
    r.data()[k] = std::max(s * s, eps);
  }
  return {std::move(r), VarianceKind::estimator};
}

}  // namespace posm
