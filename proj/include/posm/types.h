// include/posm/types.h

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

#ifndef POSM_TYPES_H_
#define POSM_TYPES_H_

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace posm {

using Complex = std::complex<double>;

// Error categories map onto the CLI exit codes: InvalidArgument -> 2,
// IoError -> 3, NumericalError -> 4.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Dense row-major real matrix.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  double *row(std::size_t r) { return data_.data() + r * cols_; }
  const double *row(std::size_t r) const { return data_.data() + r * cols_; }

  std::vector<double> &data() { return data_; }
  const std::vector<double> &data() const { return data_; }

  bool same_shape(const RealMatrix &other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const RealMatrix &, const RealMatrix &) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Complex time-frequency data indexed (slot, freq, frame). A slot is a
/// channel for observations and a source for separated signals.
class SpectroTensor {
 public:
  SpectroTensor() = default;
  SpectroTensor(std::size_t slots, std::size_t freqs, std::size_t frames)
      : slots_(slots), freqs_(freqs), frames_(frames),
        data_(slots * freqs * frames) {}

  std::size_t slots() const { return slots_; }
  std::size_t freqs() const { return freqs_; }
  std::size_t frames() const { return frames_; }

  Complex &operator()(std::size_t n, std::size_t i, std::size_t j) {
    return data_[(n * freqs_ + i) * frames_ + j];
  }
  const Complex &operator()(std::size_t n, std::size_t i, std::size_t j) const {
    return data_[(n * freqs_ + i) * frames_ + j];
  }

  std::vector<Complex> &data() { return data_; }
  const std::vector<Complex> &data() const { return data_; }

  bool same_shape(const SpectroTensor &other) const {
    return slots_ == other.slots_ && freqs_ == other.freqs_ &&
           frames_ == other.frames_;
  }

  /// |.| of one slot as an (freq x frame) matrix.
  RealMatrix magnitude(std::size_t n) const;
  /// |.|^2 of one slot as an (freq x frame) matrix.
  RealMatrix power(std::size_t n) const;

 private:
  std::size_t slots_ = 0;
  std::size_t freqs_ = 0;
  std::size_t frames_ = 0;
  std::vector<Complex> data_;
};

/// Multichannel real signal, channel-major.
struct TimeSignal {
  std::vector<std::vector<double>> channels;
  int sample_rate_hz = 8000;

  TimeSignal() = default;
  TimeSignal(std::size_t n_channels, std::size_t length, int rate)
      : channels(n_channels, std::vector<double>(length, 0.0)),
        sample_rate_hz(rate) {}

  std::size_t channel_count() const { return channels.size(); }
  std::size_t length() const { return channels.empty() ? 0 : channels[0].size(); }

  /// Throws InvalidArgument when channels differ in length or none exist.
  void validate() const;

  TimeSignal channel(std::size_t m) const;
};

}  // namespace posm

#endif  // POSM_TYPES_H_
