// src/dsp.cc

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

#include "posm/dsp.h"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace posm {

namespace {

// FFTW planning is not thread-safe; execution on new-array plans is.
std::mutex &planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    time_ = static_cast<double *>(fftw_malloc(sizeof(double) * n));
    freq_ = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1)));
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), time_, freq_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq_, time_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(time_);
    fftw_free(freq_);
  }
  RealFft(const RealFft &) = delete;
  RealFft &operator=(const RealFft &) = delete;

  double *time() { return time_; }
  Complex *freq() { return reinterpret_cast<Complex *>(freq_); }
  void forward() { fftw_execute(forward_); }
  // Unnormalized: returns n times the inverse DFT.
  void backward() { fftw_execute(backward_); }
  std::size_t size() const { return n_; }

 private:
  std::size_t n_;
  double *time_ = nullptr;
  fftw_complex *freq_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace

WindowKind parse_window_kind(const std::string &name) {
  if (name == "hamming") return WindowKind::hamming;
  if (name == "hann") return WindowKind::hann;
  throw InvalidArgument("unknown window kind: " + name);
}

std::string to_string(WindowKind kind) {
  return kind == WindowKind::hamming ? "hamming" : "hann";
}

void TimeSignal::validate() const {
  if (channels.empty()) throw InvalidArgument("signal has no channels");
  for (const auto &ch : channels)
    if (ch.size() != channels[0].size())
      throw InvalidArgument("signal channels differ in length");
  if (sample_rate_hz <= 0) throw InvalidArgument("sample rate must be positive");
}

TimeSignal TimeSignal::channel(std::size_t m) const {
  if (m >= channels.size()) throw InvalidArgument("channel index out of range");
  TimeSignal out;
  out.channels = {channels[m]};
  out.sample_rate_hz = sample_rate_hz;
  return out;
}

void StftConfig::validate() const {
  if (window_length_samples == 0 || hop_samples == 0 || sample_rate_hz <= 0)
    throw InvalidArgument("stft: window, hop and sample rate must be positive");
  if (window_length_samples % 2 != 0)
    throw InvalidArgument("stft: window length must be even");
  if (hop_samples > window_length_samples)
    throw InvalidArgument("stft: hop exceeds window length");
}

std::size_t StftConfig::frame_count(std::size_t length) const {
  // Smallest J with (J-1)*hop + W >= length + 2W.
  const std::size_t span = length + window_length_samples;
  return (span + hop_samples - 1) / hop_samples + 1;
}

std::vector<double> make_window(WindowKind kind, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (length < 2) return w;
  const double denom = static_cast<double>(length - 1);
  for (std::size_t t = 0; t < length; ++t) {
    const double c = std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / denom);
    w[t] = kind == WindowKind::hamming ? 0.54 - 0.46 * c : 0.5 - 0.5 * c;
  }
  return w;
}

SpectroTensor stft(const TimeSignal &signal, const StftConfig &cfg) {
  cfg.validate();
  signal.validate();
  const std::size_t win = cfg.window_length_samples;
  const std::size_t length = signal.length();
  if (length < win) throw InvalidArgument("stft: input too short");

  const std::size_t n_freq = cfg.freq_count();
  const std::size_t n_frames = cfg.frame_count(length);
  const auto window = make_window(cfg.window_kind, win);
  SpectroTensor out(signal.channel_count(), n_freq, n_frames);
  RealFft fft(win);

  for (std::size_t m = 0; m < signal.channel_count(); ++m) {
    const auto &x = signal.channels[m];
    for (std::size_t j = 0; j < n_frames; ++j) {
      // Frame j covers padded samples [j*hop, j*hop + win); padded index p
      // maps to original sample p - win.
      const std::size_t start = j * cfg.hop_samples;
      for (std::size_t t = 0; t < win; ++t) {
        const std::size_t p = start + t;
        const double v = (p >= win && p - win < length) ? x[p - win] : 0.0;
        fft.time()[t] = v * window[t];
      }
      fft.forward();
      for (std::size_t i = 0; i < n_freq; ++i) out(m, i, j) = fft.freq()[i];
    }
  }
  return out;
}

TimeSignal istft(const SpectroTensor &spec, const StftConfig &cfg,
                 std::size_t length_samples) {
  cfg.validate();
  const std::size_t win = cfg.window_length_samples;
  if (spec.freqs() != cfg.freq_count())
    throw InvalidArgument("istft: frequency count does not match window length");
  if (spec.frames() != cfg.frame_count(length_samples))
    throw InvalidArgument("istft: frame count does not match requested length");
  if (spec.slots() == 0) throw InvalidArgument("istft: no channels");

  const auto window = make_window(cfg.window_kind, win);
  const std::size_t padded = (spec.frames() - 1) * cfg.hop_samples + win;

  std::vector<double> envelope(padded, 0.0);
  for (std::size_t j = 0; j < spec.frames(); ++j)
    for (std::size_t t = 0; t < win; ++t)
      envelope[j * cfg.hop_samples + t] += window[t] * window[t];

  TimeSignal out(spec.slots(), length_samples, cfg.sample_rate_hz);
  RealFft fft(win);
  std::vector<double> acc(padded);
  const double inv_n = 1.0 / static_cast<double>(win);
  for (std::size_t m = 0; m < spec.slots(); ++m) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t j = 0; j < spec.frames(); ++j) {
      for (std::size_t i = 0; i < spec.freqs(); ++i) fft.freq()[i] = spec(m, i, j);
      // DC and Nyquist bins of a real frame are real.
      fft.freq()[0] = fft.freq()[0].real();
      fft.freq()[spec.freqs() - 1] = fft.freq()[spec.freqs() - 1].real();
      fft.backward();
      const std::size_t start = j * cfg.hop_samples;
      for (std::size_t t = 0; t < win; ++t)
        acc[start + t] += fft.time()[t] * inv_n * window[t];
    }
    auto &y = out.channels[m];
    for (std::size_t t = 0; t < length_samples; ++t) {
      const double e = envelope[t + win];
      y[t] = e > 1e-12 ? acc[t + win] / e : 0.0;
    }
  }
  return out;
}

std::vector<Complex> rfft(const std::vector<double> &x, std::size_t n_fft) {
  if (n_fft == 0 || x.size() > n_fft) throw InvalidArgument("rfft: bad transform size");
  RealFft fft(n_fft);
  for (std::size_t t = 0; t < n_fft; ++t) fft.time()[t] = t < x.size() ? x[t] : 0.0;
  fft.forward();
  return {fft.freq(), fft.freq() + n_fft / 2 + 1};
}

std::vector<double> fft_convolve(const std::vector<double> &a,
                                 const std::vector<double> &b) {
  if (a.empty() || b.empty()) throw InvalidArgument("fft_convolve: empty input");
  const std::size_t out_len = a.size() + b.size() - 1;
  std::size_t n = 1;
  while (n < out_len) n <<= 1;
  RealFft fa(n);
  RealFft fb(n);
  for (std::size_t t = 0; t < n; ++t) {
    fa.time()[t] = t < a.size() ? a[t] : 0.0;
    fb.time()[t] = t < b.size() ? b[t] : 0.0;
  }
  fa.forward();
  fb.forward();
  for (std::size_t k = 0; k < n / 2 + 1; ++k) fa.freq()[k] *= fb.freq()[k];
  fa.backward();
  std::vector<double> out(out_len);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t t = 0; t < out_len; ++t) out[t] = fa.time()[t] * inv_n;
  return out;
}

}  // namespace posm
