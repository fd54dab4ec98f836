// include/posm/eval.h

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

#ifndef POSM_EVAL_H_
#define POSM_EVAL_H_

#include <cstddef>
#include <string>
#include <vector>

#include "posm/simulate.h"
#include "posm/solver.h"
#include "posm/types.h"

namespace posm {

/// Scale-invariant SDR in dB, capped at +100 dB when the residual vanishes.
double si_sdr(const std::vector<double> &estimate, const std::vector<double> &reference);

/// Indexed by reference source n.
struct SdrReport {
  std::vector<double> si_sdr_db;
  std::vector<double> si_sdr_improvement_db;
  std::vector<std::size_t> permutation;  // estimate index assigned to reference n
  std::size_t trimmed_samples = 0;       // samples dropped to equalize lengths

  double mean_improvement() const;
};

/// References are the source images at `ref_channel`; the assignment maximizes
/// the total SI-SDR over all permutations (N <= 8).
SdrReport evaluate_scene(const MixtureScene &scene, const std::vector<TimeSignal> &separated,
                         std::size_t ref_channel);

/// Header `iteration,cost,sdr_improvement_src1,...`; one row per recorded
/// cost. Missing SDR rows are written as nan.
std::string trace_to_csv(const std::vector<double> &cost_trace,
                         const std::vector<SdrReport> &reports, std::size_t n_sources);

}  // namespace posm

#endif  // POSM_EVAL_H_
