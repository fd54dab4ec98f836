// include/posm/solver.h

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

#ifndef POSM_SOLVER_H_
#define POSM_SOLVER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "posm/estimators.h"
#include "posm/model.h"
#include "posm/types.h"

namespace posm {

enum class SolverMode { ilrma, idlma, posm };

SolverMode parse_solver_mode(const std::string &name);
std::string to_string(SolverMode mode);

struct SolverConfig {
  std::size_t outer_iters = 10;  // estimator refreshes
  std::size_t inner_iters = 10;  // NMF + demixing updates per refresh
  std::size_t n_bases = 20;
  double eps = 0.1;  // floor on estimator variances
  PosmWeights weights{0.5, 0.5};
  std::size_t ref_channel = 0;
  std::uint64_t seed = 0;
  SolverMode mode = SolverMode::posm;

  void validate() const;
  /// ilrma -> (1, 0), idlma -> (0, 1), posm -> weights.
  PosmWeights effective_weights() const;
};

struct SeparationState {
  SpectroTensor y;  // separated, projection-back scaled
  DemixingStack w;
  std::vector<NmfModel> nmf;
  std::vector<VarianceField> r_dnn;
  std::vector<VarianceField> r_nmf;
  std::vector<VarianceField> r_tilde;
  std::vector<double> cost_trace;
};

/// y_ij = W_i x_ij.
SpectroTensor demix(const DemixingStack &w, const SpectroTensor &x);

/// Negative log-likelihood up to constants:
///   sum_ijn [ -log p_ijn + p_ijn |w_in^H x_ij|^2 ] - 2J sum_i log|det W_i|
/// with precision p = alpha / r_nmf + beta / r_dnn. A list may be empty when
/// its weight is zero. Throws NumericalError for |det W_i| < 1e-300.
double compute_cost(const DemixingStack &w, const SpectroTensor &x,
                    const std::vector<VarianceField> &r_nmf,
                    const std::vector<VarianceField> &r_dnn, const PosmWeights &weights);

double compute_cost(const SeparationState &state, const SpectroTensor &x,
                    const SolverConfig &cfg);

/// Itakura-Saito MM sweep for a single source: basis first, then activation
/// against the refreshed model. `power` is |y|^2 (freq x frame).
void update_nmf_ilrma(NmfModel &nmf, const RealMatrix &power);

/// MM sweep for the product-of-experts cost. The combined variance is
/// recomputed from the current factors before each half-step.
void update_nmf_posm(NmfModel &nmf, const RealMatrix &power, const VarianceField &r_dnn,
                     const PosmWeights &weights);

/// One iterative-projection sweep over all frequencies and, sequentially,
/// all sources.
void ip_update(DemixingStack &w, const SpectroTensor &x,
               const std::vector<VarianceField> &r_tilde);

/// Rescales y_ij by d_i = (W_i^T)^{-1} e_ref so the sources sum to the
/// reference channel.
SpectroTensor projection_back(const SpectroTensor &y, const DemixingStack &w,
                              std::size_t ref_channel);

struct IterationView {
  std::size_t iteration;  // 1-based over all inner iterations
  std::size_t outer;
  std::size_t inner;
  const SeparationState &state;
};

using IterationObserver = std::function<void(const IterationView &)>;

/// Runs the alternating estimator / NMF / demixing / projection-back loop.
/// ilrma runs outer*inner plain iterations with no estimator calls.
SeparationState separate(const SpectroTensor &x, const SolverConfig &cfg,
                         const std::vector<const VarianceEstimator *> &estimators,
                         const IterationObserver &observer = {});

}  // namespace posm

#endif  // POSM_SOLVER_H_
