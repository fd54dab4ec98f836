// include/posm/estimators.h

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

#ifndef POSM_ESTIMATORS_H_
#define POSM_ESTIMATORS_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "posm/model.h"
#include "posm/types.h"

namespace posm {

/// Maps a magnitude spectrogram (freq x frame) of the current separated
/// source to a standard-deviation field of the same shape, entries >= 0.
class VarianceEstimator {
 public:
  virtual ~VarianceEstimator() = default;
  virtual RealMatrix estimate(const RealMatrix &magnitude) const = 0;
};

enum class Corruption { none, band_swap, smear };

Corruption parse_corruption(const std::string &name);
std::string to_string(Corruption c);

/// Returns a stored magnitude spectrogram regardless of its input, standing
/// in for a perfectly (or, once corrupted, imperfectly) trained network.
class OracleEstimator : public VarianceEstimator {
 public:
  explicit OracleEstimator(RealMatrix ground_truth,
                           Corruption corruption = Corruption::none,
                           double corruption_strength = 0.0)
      : truth_(std::move(ground_truth)), corruption_(corruption),
        strength_(corruption_strength) {}

  RealMatrix estimate(const RealMatrix &magnitude) const override;

  const RealMatrix &ground_truth() const { return truth_; }
  Corruption corruption() const { return corruption_; }
  double corruption_strength() const { return strength_; }

 private:
  RealMatrix truth_;
  Corruption corruption_;
  double strength_;
};

/// band_swap cycles a `strength` fraction of frequency rows among
/// themselves. smear spreads each frame's spectrum with a triangular kernel
/// of half-width ceil(16 * strength) bins, mass-preserving at the edges.
OracleEstimator corrupt_oracle(const OracleEstimator &est, Corruption kind, double strength,
                               std::uint64_t seed);

/// Serves precomputed variances; the estimate is their square root.
class FileEstimator : public VarianceEstimator {
 public:
  explicit FileEstimator(VarianceField variance) : variance_(std::move(variance)) {}
  RealMatrix estimate(const RealMatrix &magnitude) const override;

 private:
  VarianceField variance_;
};

/// Per-frame feedforward estimator: input I -> ReLU(H) -> ReLU(H) ->
/// softplus(I). Parameters live in one flat vector in declaration order
/// W1 (H x I), b1, W2 (H x H), b2, W3 (I x H), b3.
class ToyEstimator : public VarianceEstimator {
 public:
  ToyEstimator(std::size_t input_dim, std::size_t hidden);

  static ToyEstimator random(std::size_t input_dim, std::size_t hidden, std::uint64_t seed);

  RealMatrix estimate(const RealMatrix &magnitude) const override;

  std::size_t input_dim() const { return input_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t parameter_count() const { return params_.size(); }
  std::vector<double> &parameters() { return params_; }
  const std::vector<double> &parameters() const { return params_; }

  /// Frame loss (sum over bins) against `target` magnitudes; when `grad`
  /// is non-null the parameter gradient is accumulated into it.
  double frame_loss(std::span<const double> input, std::span<const double> target,
                    double delta, std::vector<double> *grad) const;

  /// Rounds every parameter to float32 precision (the on-disk precision).
  void round_to_float();

  /// "PSM2" magic, u32 I, u32 H, then float32 parameters little-endian.
  void save(const std::string &path) const;
  static ToyEstimator load(const std::string &path);

 private:
  void forward(std::span<const double> input, std::vector<double> &h1, std::vector<double> &h2,
               std::vector<double> &z) const;

  std::size_t input_;
  std::size_t hidden_;
  std::vector<double> params_;
};

/// Sum over cells of q - log q - 1, q = (|s|^2 + delta) / (sigma^2 + delta).
double training_loss(const RealMatrix &sigma_hat, const RealMatrix &target_mag, double delta);

struct TrainConfig {
  double delta = 1e-5;
  std::size_t epochs = 100;
  std::size_t batch_size = 16;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

/// Frames of a noisy magnitude input and the clean target magnitude, both
/// (freq x frame).
struct TrainingPair {
  RealMatrix noisy;
  RealMatrix clean;
};

struct TrainResult {
  ToyEstimator estimator;
  /// Mean per-frame loss over the training set; entry 0 is before training,
  /// entry e after epoch e.
  std::vector<double> loss_curve;
};

/// Mini-batch Adam on the mean per-frame loss. Returned parameters are
/// rounded to float32 so they survive save/load unchanged.
TrainResult train_toy(ToyEstimator est, const std::vector<TrainingPair> &pairs,
                      const TrainConfig &cfg);

/// Mean per-frame loss of `est` over all frames of `pairs`.
double mean_frame_loss(const ToyEstimator &est, const std::vector<TrainingPair> &pairs,
                       double delta);

}  // namespace posm

#endif  // POSM_ESTIMATORS_H_
