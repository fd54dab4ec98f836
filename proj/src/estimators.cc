// src/estimators.cc

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

#include "posm/estimators.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>

#include "posm/audio_io.h"

namespace posm {

Corruption parse_corruption(const std::string &name) {
  if (name == "none") return Corruption::none;
  if (name == "band_swap") return Corruption::band_swap;
  if (name == "smear") return Corruption::smear;
  throw InvalidArgument("unknown corruption kind: " + name);
}

std::string to_string(Corruption c) {
  switch (c) {
    case Corruption::none: return "none";
    case Corruption::band_swap: return "band_swap";
    case Corruption::smear: return "smear";
  }
  return "none";
}

namespace {

void check_shape(const RealMatrix &expected, const RealMatrix &input, const char *who) {
  if (!expected.same_shape(input))
    throw InvalidArgument(std::string(who) + ": input shape " + std::to_string(input.rows()) +
                          "x" + std::to_string(input.cols()) + " does not match estimator " +
                          std::to_string(expected.rows()) + "x" +
                          std::to_string(expected.cols()));
}

constexpr double kMaxSmearBins = 16.0;

}  // namespace

RealMatrix OracleEstimator::estimate(const RealMatrix &magnitude) const {
  check_shape(truth_, magnitude, "oracle estimator");
  return truth_;
}

OracleEstimator corrupt_oracle(const OracleEstimator &est, Corruption kind, double strength,
                               std::uint64_t seed) {
  if (!(strength >= 0.0 && strength <= 1.0))
    throw InvalidArgument("corruption strength must lie in [0, 1]");
  const RealMatrix &src = est.ground_truth();
  RealMatrix out = src;
  const std::size_t n_freq = src.rows();
  const std::size_t n_frames = src.cols();

  if (kind == Corruption::band_swap) {
    std::vector<std::size_t> rows(n_freq);
    std::iota(rows.begin(), rows.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto k = static_cast<std::size_t>(std::lround(strength * static_cast<double>(n_freq)));
    // Cycle the selected rows so every one of them moves.
    if (k >= 2)
      for (std::size_t s = 0; s < k; ++s) {
        const std::size_t to = rows[s];
        const std::size_t from = rows[(s + 1) % k];
        std::copy(src.row(from), src.row(from) + n_frames, out.row(to));
      }
  } else if (kind == Corruption::smear) {
    const auto half = static_cast<long>(std::ceil(strength * kMaxSmearBins));
    if (half > 0) {
      std::vector<double> kernel(2 * half + 1);
      for (long d = -half; d <= half; ++d)
        kernel[d + half] = static_cast<double>(half + 1 - std::labs(d));
      const long n = static_cast<long>(n_freq);
      std::fill(out.data().begin(), out.data().end(), 0.0);
      for (long i = 0; i < n; ++i) {
        // Kernel renormalized over in-range targets keeps each frame's mass.
        double norm = 0.0;
        for (long d = -half; d <= half; ++d)
          if (i + d >= 0 && i + d < n) norm += kernel[d + half];
        for (long d = -half; d <= half; ++d) {
          if (i + d < 0 || i + d >= n) continue;
          const double w = kernel[d + half] / norm;
          for (std::size_t j = 0; j < n_frames; ++j)
            out(static_cast<std::size_t>(i + d), j) += w * src(static_cast<std::size_t>(i), j);
        }
      }
    }
  }
  return OracleEstimator(std::move(out), kind, strength);
}

RealMatrix FileEstimator::estimate(const RealMatrix &magnitude) const {
  check_shape(variance_.r, magnitude, "file estimator");
  RealMatrix sigma(variance_.r.rows(), variance_.r.cols());
  for (std::size_t k = 0; k < sigma.size(); ++k) sigma.data()[k] = std::sqrt(variance_.r.data()[k]);
  return sigma;
}

// ---------------------------------------------------------------------------
// Toy estimator

namespace {

double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }
double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

struct Layout {
  std::size_t w1, b1, w2, b2, w3, b3, total;
  Layout(std::size_t in, std::size_t h) {
    w1 = 0;
    b1 = w1 + h * in;
    w2 = b1 + h;
    b2 = w2 + h * h;
    w3 = b2 + h;
    b3 = w3 + in * h;
    total = b3 + in;
  }
};

// out = W x + b for a (rows x cols) row-major W.
void affine(const double *w, const double *b, std::span<const double> x, std::size_t rows,
            std::vector<double> &out) {
  out.resize(rows);
  const std::size_t cols = x.size();
  for (std::size_t r = 0; r < rows; ++r) {
    const double *wr = w + r * cols;
    double s = b[r];
    for (std::size_t c = 0; c < cols; ++c) s += wr[c] * x[c];
    out[r] = s;
  }
}

}  // namespace

ToyEstimator::ToyEstimator(std::size_t input_dim, std::size_t hidden)
    : input_(input_dim), hidden_(hidden), params_(Layout(input_dim, hidden).total, 0.0) {
  if (input_dim == 0 || hidden == 0) throw InvalidArgument("toy estimator: dims must be >= 1");
}

ToyEstimator ToyEstimator::random(std::size_t input_dim, std::size_t hidden, std::uint64_t seed) {
  ToyEstimator est(input_dim, hidden);
  const Layout l(input_dim, hidden);
  std::mt19937_64 rng(seed);
  auto fill = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    for (std::size_t k = 0; k < count; ++k) est.params_[offset + k] = dist(rng);
  };
  fill(l.w1, hidden * input_dim, input_dim);
  fill(l.w2, hidden * hidden, hidden);
  fill(l.w3, input_dim * hidden, hidden);
  return est;
}

void ToyEstimator::forward(std::span<const double> input, std::vector<double> &h1,
                           std::vector<double> &h2, std::vector<double> &z) const {
  const Layout l(input_, hidden_);
  const double *p = params_.data();
  affine(p + l.w1, p + l.b1, input, hidden_, h1);
  for (auto &v : h1) v = std::max(v, 0.0);
  affine(p + l.w2, p + l.b2, h1, hidden_, h2);
  for (auto &v : h2) v = std::max(v, 0.0);
  affine(p + l.w3, p + l.b3, h2, input_, z);
}

RealMatrix ToyEstimator::estimate(const RealMatrix &magnitude) const {
  if (magnitude.rows() != input_)
    throw InvalidArgument("toy estimator: input has " + std::to_string(magnitude.rows()) +
                          " bins, expected " + std::to_string(input_));
  RealMatrix sigma(magnitude.rows(), magnitude.cols());
  std::vector<double> frame(input_), h1, h2, z;
  for (std::size_t j = 0; j < magnitude.cols(); ++j) {
    for (std::size_t i = 0; i < input_; ++i) frame[i] = magnitude(i, j);
    forward(frame, h1, h2, z);
    for (std::size_t i = 0; i < input_; ++i) sigma(i, j) = softplus(z[i]);
  }
  return sigma;
}

double ToyEstimator::frame_loss(std::span<const double> input, std::span<const double> target,
                                double delta, std::vector<double> *grad) const {
  if (input.size() != input_ || target.size() != input_)
    throw InvalidArgument("toy estimator: frame size mismatch");
  std::vector<double> h1, h2, z;
  forward(input, h1, h2, z);

  double loss = 0.0;
  std::vector<double> dz(input_);
  for (std::size_t i = 0; i < input_; ++i) {
    const double sigma = softplus(z[i]);
    const double den = sigma * sigma + delta;
    const double q = (target[i] * target[i] + delta) / den;
    loss += q - std::log(q) - 1.0;
    // d/dsigma (q - log q - 1) = -(q - 1) * 2 sigma / (sigma^2 + delta)
    dz[i] = -(q - 1.0) * 2.0 * sigma / den * sigmoid(z[i]);
  }
  if (!grad) return loss;

  const Layout l(input_, hidden_);
  auto &g = *grad;
  if (g.size() != params_.size()) g.assign(params_.size(), 0.0);
  const double *p = params_.data();

  std::vector<double> dh2(hidden_, 0.0);
  for (std::size_t r = 0; r < input_; ++r) {
    g[l.b3 + r] += dz[r];
    double *gw = g.data() + l.w3 + r * hidden_;
    const double *w = p + l.w3 + r * hidden_;
    for (std::size_t c = 0; c < hidden_; ++c) {
      gw[c] += dz[r] * h2[c];
      dh2[c] += dz[r] * w[c];
    }
  }
  for (std::size_t c = 0; c < hidden_; ++c)
    if (h2[c] <= 0.0) dh2[c] = 0.0;

  std::vector<double> dh1(hidden_, 0.0);
  for (std::size_t r = 0; r < hidden_; ++r) {
    g[l.b2 + r] += dh2[r];
    double *gw = g.data() + l.w2 + r * hidden_;
    const double *w = p + l.w2 + r * hidden_;
    for (std::size_t c = 0; c < hidden_; ++c) {
      gw[c] += dh2[r] * h1[c];
      dh1[c] += dh2[r] * w[c];
    }
  }
  for (std::size_t c = 0; c < hidden_; ++c)
    if (h1[c] <= 0.0) dh1[c] = 0.0;

  for (std::size_t r = 0; r < hidden_; ++r) {
    if (dh1[r] == 0.0) continue;
    g[l.b1 + r] += dh1[r];
    double *gw = g.data() + l.w1 + r * input_;
    for (std::size_t c = 0; c < input_; ++c) gw[c] += dh1[r] * input[c];
  }
  return loss;
}

void ToyEstimator::round_to_float() {
  for (auto &v : params_) v = static_cast<double>(static_cast<float>(v));
}

void ToyEstimator::save(const std::string &path) const {
  std::vector<unsigned char> out = {'P', 'S', 'M', '2'};
  le::put_u32(out, static_cast<std::uint32_t>(input_));
  le::put_u32(out, static_cast<std::uint32_t>(hidden_));
  for (double v : params_) le::put_f32(out, static_cast<float>(v));
  le::write_file(path, out);
}

ToyEstimator ToyEstimator::load(const std::string &path) {
  const auto bytes = le::read_file(path);
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "PSM2", 4) != 0)
    throw IoError("not a PSM2 estimator file: " + path);
  const std::uint32_t in = le::get_u32(bytes.data() + 4);
  const std::uint32_t h = le::get_u32(bytes.data() + 8);
  if (in == 0 || h == 0) throw IoError("estimator file has zero dimensions: " + path);
  ToyEstimator est(in, h);
  if (bytes.size() != 12 + 4 * est.params_.size())
    throw IoError("estimator file size does not match its dimensions: " + path);
  for (std::size_t k = 0; k < est.params_.size(); ++k)
    est.params_[k] = le::get_f32(bytes.data() + 12 + 4 * k);
  return est;
}

double training_loss(const RealMatrix &sigma_hat, const RealMatrix &target_mag, double delta) {
  if (!sigma_hat.same_shape(target_mag)) throw InvalidArgument("training_loss: shape mismatch");
  if (!(delta > 0.0)) throw InvalidArgument("training_loss: delta must be positive");
  double loss = 0.0;
  for (std::size_t k = 0; k < sigma_hat.size(); ++k) {
    const double s = target_mag.data()[k];
    const double sig = sigma_hat.data()[k];
    const double q = (s * s + delta) / (sig * sig + delta);
    loss += q - std::log(q) - 1.0;
  }
  return loss;
}

namespace {

struct FrameRef {
  const TrainingPair *pair;
  std::size_t frame;
};

std::vector<FrameRef> collect_frames(const ToyEstimator &est,
                                     const std::vector<TrainingPair> &pairs) {
  std::vector<FrameRef> frames;
  for (const auto &p : pairs) {
    if (!p.noisy.same_shape(p.clean)) throw InvalidArgument("training pair shapes differ");
    if (p.noisy.rows() != est.input_dim())
      throw InvalidArgument("training pair bin count does not match estimator input");
    for (std::size_t j = 0; j < p.noisy.cols(); ++j) frames.push_back({&p, j});
  }
  if (frames.empty()) throw InvalidArgument("empty training set");
  return frames;
}

void column(const RealMatrix &m, std::size_t j, std::vector<double> &out) {
  out.resize(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = m(i, j);
}

}  // namespace

double mean_frame_loss(const ToyEstimator &est, const std::vector<TrainingPair> &pairs,
                       double delta) {
  const auto frames = collect_frames(est, pairs);
  std::vector<double> x, s;
  double total = 0.0;
  for (const auto &f : frames) {
    column(f.pair->noisy, f.frame, x);
    column(f.pair->clean, f.frame, s);
    total += est.frame_loss(x, s, delta, nullptr);
  }
  return total / static_cast<double>(frames.size());
}

TrainResult train_toy(ToyEstimator est, const std::vector<TrainingPair> &pairs,
                      const TrainConfig &cfg) {
  if (!(cfg.delta > 0.0)) throw InvalidArgument("train: delta must be positive");
  if (cfg.batch_size == 0) throw InvalidArgument("train: batch size must be positive");
  auto frames = collect_frames(est, pairs);

  TrainResult result{est, {}};
  result.loss_curve.push_back(mean_frame_loss(est, pairs, cfg.delta));

  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kAdamEps = 1e-8;
  const std::size_t n_params = est.parameter_count();
  std::vector<double> m1(n_params, 0.0), m2(n_params, 0.0), grad(n_params);
  std::vector<double> x, s;
  std::mt19937_64 rng(cfg.seed);
  std::size_t step = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(frames.begin(), frames.end(), rng);
    for (std::size_t start = 0; start < frames.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(frames.size(), start + cfg.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t b = start; b < end; ++b) {
        column(frames[b].pair->noisy, frames[b].frame, x);
        column(frames[b].pair->clean, frames[b].frame, s);
        est.frame_loss(x, s, cfg.delta, &grad);
      }
      const double inv_b = 1.0 / static_cast<double>(end - start);
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      auto &p = est.parameters();
      for (std::size_t k = 0; k < n_params; ++k) {
        const double g = grad[k] * inv_b;
        m1[k] = kBeta1 * m1[k] + (1.0 - kBeta1) * g;
        m2[k] = kBeta2 * m2[k] + (1.0 - kBeta2) * g * g;
        p[k] -= cfg.learning_rate * (m1[k] / c1) / (std::sqrt(m2[k] / c2) + kAdamEps);
      }
    }
    result.loss_curve.push_back(mean_frame_loss(est, pairs, cfg.delta));
  }
  est.round_to_float();
  result.estimator = std::move(est);
  return result;
}

}  // namespace posm
