// src/experiment.cc

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

#include "posm/experiment.h"

namespace posm {

std::vector<OracleEstimator> make_oracles(const MixtureScene &scene, const StftConfig &stft_cfg,
                                          std::size_t ref_channel, Corruption corruption,
                                          double strength, std::uint64_t seed) {
  if (ref_channel >= scene.channels()) throw InvalidArgument("oracle: bad reference channel");
  std::vector<OracleEstimator> out;
  for (std::size_t n = 0; n < scene.sources(); ++n) {
    const SpectroTensor s = stft(scene.images[n].channel(ref_channel), stft_cfg);
    OracleEstimator clean(s.magnitude(0));
    if (corruption == Corruption::none || strength == 0.0)
      out.push_back(std::move(clean));
    else
      out.push_back(corrupt_oracle(clean, corruption, strength, seed + n));
  }
  return out;
}

std::vector<const VarianceEstimator *> as_pointers(const std::vector<OracleEstimator> &oracles) {
  std::vector<const VarianceEstimator *> out;
  for (const auto &o : oracles) out.push_back(&o);
  return out;
}

std::vector<TimeSignal> split_channels(const TimeSignal &signal) {
  std::vector<TimeSignal> out;
  for (std::size_t m = 0; m < signal.channel_count(); ++m) out.push_back(signal.channel(m));
  return out;
}

std::vector<double> TracedRun::mean_improvement() const {
  std::vector<double> out;
  for (const auto &r : reports) out.push_back(r.mean_improvement());
  return out;
}

TracedRun run_traced(const MixtureScene &scene, const StftConfig &stft_cfg,
                     const SolverConfig &solver_cfg,
                     const std::vector<const VarianceEstimator *> &estimators) {
  const SpectroTensor x = stft(scene.observed, stft_cfg);
  const std::size_t length = scene.observed.length();
  TracedRun run;
  run.state = separate(x, solver_cfg, estimators, [&](const IterationView &view) {
    const TimeSignal y = istft(view.state.y, stft_cfg, length);
    run.reports.push_back(evaluate_scene(scene, split_channels(y), solver_cfg.ref_channel));
  });
  run.separated = split_channels(istft(run.state.y, stft_cfg, length));
  return run;
}

}  // namespace posm
