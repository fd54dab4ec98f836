// include/posm/experiment.h

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

#ifndef POSM_EXPERIMENT_H_
#define POSM_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "posm/dsp.h"
#include "posm/estimators.h"
#include "posm/eval.h"
#include "posm/simulate.h"
#include "posm/solver.h"

namespace posm {

/// One oracle per source holding |STFT| of that source's image at
/// `ref_channel`, optionally corrupted with seed `seed + n`.
std::vector<OracleEstimator> make_oracles(const MixtureScene &scene, const StftConfig &stft_cfg,
                                          std::size_t ref_channel, Corruption corruption,
                                          double strength, std::uint64_t seed);

std::vector<const VarianceEstimator *> as_pointers(const std::vector<OracleEstimator> &oracles);

/// Splits an N-channel signal into N mono signals.
std::vector<TimeSignal> split_channels(const TimeSignal &signal);

struct TracedRun {
  SeparationState state;
  std::vector<SdrReport> reports;  // one per inner iteration
  std::vector<TimeSignal> separated;

  /// Mean-over-sources SI-SDR improvement per iteration.
  std::vector<double> mean_improvement() const;
};

/// Runs separate() on the scene's observation and scores every iteration
/// against the scene's images.
TracedRun run_traced(const MixtureScene &scene, const StftConfig &stft_cfg,
                     const SolverConfig &solver_cfg,
                     const std::vector<const VarianceEstimator *> &estimators);

}  // namespace posm

#endif  // POSM_EXPERIMENT_H_
