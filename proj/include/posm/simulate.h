// include/posm/simulate.h

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

#ifndef POSM_SIMULATE_H_
#define POSM_SIMULATE_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "posm/types.h"

namespace posm {

enum class DryKind { tonal, percussive, noise_band, synth_sweep };

DryKind parse_dry_kind(const std::string &name);
std::string to_string(DryKind kind);

/// Mono test source with peak amplitude 0.9. Samples are float32-exact.
///   tonal       decaying harmonic notes with vibrato
///   percussive  sparse exponentially decaying noise bursts
///   noise_band  band-pass filtered noise with a slow level drift
///   synth_sweep sawtooth-like oscillator with exponential pitch sweeps
TimeSignal synth_dry(DryKind kind, double duration_s, int sample_rate_hz, std::uint64_t seed);

/// FIRs for every (source, channel) pair, stored at index n * channels + m.
struct ImpulseResponseSet {
  std::size_t n_sources = 0;
  std::size_t n_channels = 0;
  int sample_rate_hz = 8000;
  std::vector<std::vector<double>> taps;
  std::vector<double> source_angles_deg;

  const std::vector<double> &at(std::size_t n, std::size_t m) const {
    return taps[n * n_channels + m];
  }
  std::vector<double> &at(std::size_t n, std::size_t m) { return taps[n * n_channels + m]; }
};

/// Linear array of directional microphones (4 cm spacing, sub-cardioid
/// patterns fanned over +-45 deg). Each FIR is a windowed-sinc fractional
/// delay with gain, followed for t60_ms > 0 by an exponentially decaying
/// random tail reaching -60 dB at t60_ms. Sources are spread evenly over
/// `angle_spread_deg` with a small seeded jitter.
ImpulseResponseSet synth_irs(std::size_t channels, std::size_t sources, double t60_ms,
                             double angle_spread_deg, std::uint64_t seed,
                             int sample_rate_hz = 8000);

struct MixtureScene {
  std::vector<TimeSignal> dry;     // one mono signal per source
  ImpulseResponseSet irs;
  TimeSignal observed;             // M channels
  std::vector<TimeSignal> images;  // per source, M channels

  std::size_t sources() const { return dry.size(); }
  std::size_t channels() const { return observed.channel_count(); }
};

/// images[n][m] = dry[n] * ir(n, m) truncated to the dry length and rounded
/// to float32; observed[m] accumulates the images in float32 in source order.
MixtureScene mix(std::vector<TimeSignal> dry, ImpulseResponseSet irs);

struct SceneParams {
  std::size_t sources = 2;
  std::size_t channels = 2;
  int sample_rate_hz = 8000;
  double duration_s = 20.0;
  double t60_ms = 150.0;
  double angle_spread_deg = 60.0;
  std::uint64_t seed = 0;
  std::vector<DryKind> kinds{DryKind::tonal, DryKind::percussive};

  void validate() const;
};

/// Synthesizes dry sources and IRs, mixes them, and rescales the dry
/// signals so the observation peaks at 0.9 or below.
MixtureScene generate_scene(const SceneParams &params);

/// Writes dry_<n>.wav, ir_<n>.wav, image_<n>.wav (M channels),
/// observed.wav (all float32) and scene.txt into `dir`. Returns the manifest
/// path.
std::string write_scene(const MixtureScene &scene, const SceneParams &params,
                        const std::string &dir);

/// Loads a scene from its manifest. WAV paths in the manifest are resolved
/// relative to the manifest's directory.
MixtureScene read_scene(const std::string &manifest_path, SceneParams *params = nullptr);

}  // namespace posm

#endif  // POSM_SIMULATE_H_
