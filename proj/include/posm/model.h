// include/posm/model.h

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

#ifndef POSM_MODEL_H_
#define POSM_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "posm/linalg.h"
#include "posm/types.h"

namespace posm {

/// Lower bound kept on every NMF factor entry.
inline constexpr double kNmfFloor = 1e-12;

enum class VarianceKind { nmf, estimator, posm };

/// Per-source variance map r (freq x frame), all entries positive.
struct VarianceField {
  RealMatrix r;
  VarianceKind kind = VarianceKind::nmf;
};

/// One source's NMF factors: basis T (freq x K), activation V (K x frame).
struct NmfModel {
  RealMatrix basis;
  RealMatrix activation;

  std::size_t n_bases() const { return basis.cols(); }

  /// Factors drawn i.i.d. uniform on (0.1, 1.0).
  static NmfModel random(std::size_t n_freq, std::size_t n_frames, std::size_t n_bases,
                         std::uint64_t seed);
};

/// Product-of-experts weights; alpha scales the NMF expert, beta the
/// estimator expert.
struct PosmWeights {
  double alpha = 0.5;
  double beta = 0.5;

  void validate() const;
};

/// Per-frequency square demixing matrices. Row n of W_i is w_in^H.
struct DemixingStack {
  std::vector<ComplexMatrix> w;

  static DemixingStack identity(std::size_t n_freq, std::size_t n);
  std::size_t freqs() const { return w.size(); }
  std::size_t sources() const { return w.empty() ? 0 : w[0].rows(); }
};

/// r_ij = sum_k t_ik v_kj.
VarianceField nmf_variance(const NmfModel &model);

/// Elementwise 1/r = alpha/r_nmf + beta/r_dnn. A zero weight drops its
/// expert exactly, so (1, 0) returns r_nmf and (0, 1) returns r_dnn.
VarianceField combine_posm(const VarianceField &r_nmf, const VarianceField &r_dnn,
                           const PosmWeights &weights);

/// r = max(sigma^2, eps).
VarianceField floor_variance(const RealMatrix &sigma, double eps);

}  // namespace posm

#endif  // POSM_MODEL_H_
