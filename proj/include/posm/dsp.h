// include/posm/dsp.h

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

#ifndef POSM_DSP_H_
#define POSM_DSP_H_

#include <cstddef>
#include <string>
#include <vector>

#include "posm/types.h"

namespace posm {

enum class WindowKind { hamming, hann };

WindowKind parse_window_kind(const std::string &name);
std::string to_string(WindowKind kind);

/// Analysis/synthesis parameters. Defaults are a 512 ms Hamming window with
/// 256 ms hop at 8 kHz.
struct StftConfig {
  std::size_t window_length_samples = 4096;
  std::size_t hop_samples = 2048;
  WindowKind window_kind = WindowKind::hamming;
  int sample_rate_hz = 8000;

  void validate() const;
  std::size_t freq_count() const { return window_length_samples / 2 + 1; }
  /// Frames produced for a signal of `length` samples, including the
  /// window-length zero padding on both ends.
  std::size_t frame_count(std::size_t length) const;
};

/// Symmetric window of the given length.
std::vector<double> make_window(WindowKind kind, std::size_t length);

/// Onesided STFT, shape (channels x window/2+1 x frames). The signal is
/// zero-padded by one window length at both ends.
SpectroTensor stft(const TimeSignal &signal, const StftConfig &cfg);

/// Weighted overlap-add inverse of stft(): the analysis window is reused for
/// synthesis and the sum is divided by the squared-window envelope.
TimeSignal istft(const SpectroTensor &spec, const StftConfig &cfg,
                 std::size_t length_samples);

/// Onesided DFT of x zero-padded to n_fft (n_fft/2+1 bins, no scaling).
std::vector<Complex> rfft(const std::vector<double> &x, std::size_t n_fft);

/// Full linear convolution, length a.size() + b.size() - 1.
std::vector<double> fft_convolve(const std::vector<double> &a,
                                 const std::vector<double> &b);

}  // namespace posm

#endif  // POSM_DSP_H_
