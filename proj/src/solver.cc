// src/solver.cc

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

#include "posm/solver.h"

#include <cmath>

#include "posm/parallel.h"

namespace posm {

SolverMode parse_solver_mode(const std::string &name) {
  if (name == "ilrma") return SolverMode::ilrma;
  if (name == "idlma") return SolverMode::idlma;
  if (name == "posm") return SolverMode::posm;
  throw InvalidArgument("unknown mode: " + name);
}

std::string to_string(SolverMode mode) {
  switch (mode) {
    case SolverMode::ilrma: return "ilrma";
    case SolverMode::idlma: return "idlma";
    case SolverMode::posm: return "posm";
  }
  return "posm";
}

void SolverConfig::validate() const {
  if (outer_iters == 0 || inner_iters == 0)
    throw InvalidArgument("iteration counts must be positive");
  if (n_bases == 0) throw InvalidArgument("number of bases must be positive");
  if (!(eps > 0.0)) throw InvalidArgument("eps must be positive");
  effective_weights().validate();
}

PosmWeights SolverConfig::effective_weights() const {
  switch (mode) {
    case SolverMode::ilrma: return {1.0, 0.0};
    case SolverMode::idlma: return {0.0, 1.0};
    case SolverMode::posm: return weights;
  }
  return weights;
}

SpectroTensor demix(const DemixingStack &w, const SpectroTensor &x) {
  const std::size_t n_src = w.sources();
  if (w.freqs() != x.freqs() || w.w[0].cols() != x.slots())
    throw InvalidArgument("demix: demixing stack does not match observation");
  SpectroTensor y(n_src, x.freqs(), x.frames());
  for (std::size_t i = 0; i < x.freqs(); ++i) {
    const auto &wi = w.w[i];
    for (std::size_t n = 0; n < n_src; ++n)
      for (std::size_t m = 0; m < x.slots(); ++m) {
        const Complex c = wi(n, m);
        for (std::size_t j = 0; j < x.frames(); ++j) y(n, i, j) += c * x(m, i, j);
      }
  }
  return y;
}

double compute_cost(const DemixingStack &w, const SpectroTensor &x,
                    const std::vector<VarianceField> &r_nmf,
                    const std::vector<VarianceField> &r_dnn, const PosmWeights &weights) {
  weights.validate();
  const std::size_t n_src = w.sources();
  const double a = weights.alpha;
  const double b = weights.beta;
  if ((a > 0.0 && r_nmf.size() != n_src) || (b > 0.0 && r_dnn.size() != n_src))
    throw InvalidArgument("compute_cost: variance fields missing for a weighted expert");

  const std::size_t n_freq = x.freqs();
  const std::size_t n_frames = x.frames();
  const SpectroTensor y = demix(w, x);
  std::vector<double> per_freq(n_freq, 0.0);
  parallel_for(n_freq, [&](std::size_t i) {
    const double det = std::abs(determinant(w.w[i]));
    if (!(det >= 1e-300)) throw NumericalError("compute_cost: degenerate demixing matrix");
    double s = 0.0;
    for (std::size_t n = 0; n < n_src; ++n)
      for (std::size_t j = 0; j < n_frames; ++j) {
        double p = 0.0;
        if (a > 0.0) p += a / r_nmf[n].r(i, j);
        if (b > 0.0) p += b / r_dnn[n].r(i, j);
        s += -std::log(p) + p * std::norm(y(n, i, j));
      }
    per_freq[i] = s - 2.0 * static_cast<double>(n_frames) * std::log(det);
  });
  double total = 0.0;
  for (double v : per_freq) total += v;
  return total;
}

double compute_cost(const SeparationState &state, const SpectroTensor &x,
                    const SolverConfig &cfg) {
  return compute_cost(state.w, x, state.r_nmf, state.r_dnn, cfg.effective_weights());
}

namespace {

// t_ik *= sqrt(sum_j v_kj num_ij / sum_j v_kj den_ij)
void scale_basis(RealMatrix &t, const RealMatrix &v, const RealMatrix &num,
                 const RealMatrix &den) {
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const double *ni = num.row(i);
    const double *di = den.row(i);
    for (std::size_t k = 0; k < t.cols(); ++k) {
      const double *vk = v.row(k);
      double sn = 0.0, sd = 0.0;
      for (std::size_t j = 0; j < v.cols(); ++j) {
        sn += vk[j] * ni[j];
        sd += vk[j] * di[j];
      }
      t(i, k) = std::max(t(i, k) * std::sqrt(sn / sd), kNmfFloor);
    }
  }
}

// v_kj *= sqrt(sum_i t_ik num_ij / sum_i t_ik den_ij)
void scale_activation(RealMatrix &v, const RealMatrix &t, const RealMatrix &num,
                      const RealMatrix &den) {
  const std::size_t n_bases = v.rows();
  const std::size_t n_frames = v.cols();
  RealMatrix sn(n_bases, n_frames), sd(n_bases, n_frames);
  for (std::size_t i = 0; i < t.rows(); ++i) {
    const double *ni = num.row(i);
    const double *di = den.row(i);
    for (std::size_t k = 0; k < n_bases; ++k) {
      const double tik = t(i, k);
      double *snk = sn.row(k);
      double *sdk = sd.row(k);
      for (std::size_t j = 0; j < n_frames; ++j) {
        snk[j] += tik * ni[j];
        sdk[j] += tik * di[j];
      }
    }
  }
  for (std::size_t k = 0; k < n_bases; ++k)
    for (std::size_t j = 0; j < n_frames; ++j)
      v(k, j) = std::max(v(k, j) * std::sqrt(sn(k, j) / sd(k, j)), kNmfFloor);
}

void check_nmf_shapes(const NmfModel &nmf, const RealMatrix &power) {
  if (nmf.basis.rows() != power.rows() || nmf.activation.cols() != power.cols() ||
      nmf.basis.cols() != nmf.activation.rows())
    throw InvalidArgument("nmf update: factor shapes do not match the spectrogram");
}

// Builds the numerator |y|^2 / r^2 and denominator weights for one half-step.
// With r_dnn == nullptr the denominator is 1 / r (plain IS-NMF).
void half_step_terms(const NmfModel &nmf, const RealMatrix &power, const VarianceField *r_dnn,
                     const PosmWeights &weights, RealMatrix &num, RealMatrix &den) {
  const VarianceField r = nmf_variance(nmf);
  num = RealMatrix(power.rows(), power.cols());
  den = RealMatrix(power.rows(), power.cols());
  if (r_dnn == nullptr) {
    for (std::size_t k = 0; k < power.size(); ++k) {
      const double rk = r.r.data()[k];
      num.data()[k] = power.data()[k] / (rk * rk);
      den.data()[k] = 1.0 / rk;
    }
    return;
  }
  const VarianceField combined = combine_posm(r, *r_dnn, weights);
  for (std::size_t k = 0; k < power.size(); ++k) {
    const double rk = r.r.data()[k];
    const double inv_r2 = 1.0 / (rk * rk);
    num.data()[k] = power.data()[k] * inv_r2;
    den.data()[k] = combined.r.data()[k] * inv_r2;
  }
}

}  // namespace

void update_nmf_ilrma(NmfModel &nmf, const RealMatrix &power) {
  check_nmf_shapes(nmf, power);
  RealMatrix num, den;
  half_step_terms(nmf, power, nullptr, {}, num, den);
  scale_basis(nmf.basis, nmf.activation, num, den);
  half_step_terms(nmf, power, nullptr, {}, num, den);
  scale_activation(nmf.activation, nmf.basis, num, den);
}

void update_nmf_posm(NmfModel &nmf, const RealMatrix &power, const VarianceField &r_dnn,
                     const PosmWeights &weights) {
  check_nmf_shapes(nmf, power);
  if (weights.beta > 0.0 && !r_dnn.r.same_shape(power))
    throw InvalidArgument("nmf update: estimator variance shape mismatch");
  RealMatrix num, den;
  half_step_terms(nmf, power, &r_dnn, weights, num, den);
  scale_basis(nmf.basis, nmf.activation, num, den);
  half_step_terms(nmf, power, &r_dnn, weights, num, den);
  scale_activation(nmf.activation, nmf.basis, num, den);
}

void ip_update(DemixingStack &w, const SpectroTensor &x,
               const std::vector<VarianceField> &r_tilde) {
  const std::size_t n_src = w.sources();
  const std::size_t n_ch = x.slots();
  const std::size_t n_frames = x.frames();
  if (n_src != n_ch) throw InvalidArgument("ip_update: only the determined case is supported");
  if (w.freqs() != x.freqs() || r_tilde.size() != n_src)
    throw InvalidArgument("ip_update: shape mismatch");
  for (const auto &f : r_tilde)
    if (f.r.rows() != x.freqs() || f.r.cols() != n_frames)
      throw InvalidArgument("ip_update: variance shape mismatch");

  parallel_for(x.freqs(), [&](std::size_t i) {
    ComplexMatrix &wi = w.w[i];
    for (std::size_t n = 0; n < n_src; ++n) {
      // U_in = (1/J) sum_j x_ij x_ij^H / r_ijn
      ComplexMatrix u(n_ch, n_ch);
      for (std::size_t j = 0; j < n_frames; ++j) {
        const double inv_r = 1.0 / r_tilde[n].r(i, j);
        for (std::size_t a = 0; a < n_ch; ++a) {
          const Complex xa = x(a, i, j) * inv_r;
          for (std::size_t b = 0; b < n_ch; ++b) u(a, b) += xa * std::conj(x(b, i, j));
        }
      }
      u *= 1.0 / static_cast<double>(n_frames);

      std::vector<Complex> e(n_ch, 0.0);
      e[n] = 1.0;
      std::vector<Complex> wn;
      try {
        wn = solve(wi * u, e);
      } catch (const NumericalError &) {
        const double loading = 1e-12 * u.trace().real() / static_cast<double>(n_ch);
        for (std::size_t a = 0; a < n_ch; ++a) u(a, a) += loading;
        try {
          wn = solve(wi * u, e);
        } catch (const NumericalError &) {
          throw NumericalError("ip_update: singular system at frequency " + std::to_string(i));
        }
      }
      // w <- w / sqrt(w^H U w), with w^H U w summed as (1/J) sum_j |w^H x_ij|^2 / r_ijn:
      // nonnegative terms, so no cancellation when U is close to rank one.
      double quad = 0.0;
      for (std::size_t j = 0; j < n_frames; ++j) {
        Complex yj = 0.0;
        for (std::size_t a = 0; a < n_ch; ++a) yj += std::conj(wn[a]) * x(a, i, j);
        quad += std::norm(yj) / r_tilde[n].r(i, j);
      }
      const double scale = 1.0 / std::sqrt(quad / static_cast<double>(n_frames));
      for (std::size_t a = 0; a < n_ch; ++a) wi(n, a) = std::conj(wn[a] * scale);
    }
    if (!wi.all_finite()) throw NumericalError("ip_update: non-finite demixing matrix");
  });
}

SpectroTensor projection_back(const SpectroTensor &y, const DemixingStack &w,
                              std::size_t ref_channel) {
  const std::size_t n_src = w.sources();
  if (y.slots() != n_src || y.freqs() != w.freqs())
    throw InvalidArgument("projection_back: shape mismatch");
  if (ref_channel >= w.w[0].cols()) throw InvalidArgument("projection_back: bad reference channel");
  SpectroTensor out = y;
  for (std::size_t i = 0; i < y.freqs(); ++i) {
    std::vector<Complex> e(n_src, 0.0);
    e[ref_channel] = 1.0;
    const ComplexMatrix wt = w.w[i].transpose();
    const auto d = solve_with_loading(wt, e, 1e-12 * wt.max_abs(), "projection_back");
    for (std::size_t n = 0; n < n_src; ++n)
      for (std::size_t j = 0; j < y.frames(); ++j) out(n, i, j) *= d[n];
  }
  return out;
}

SeparationState separate(const SpectroTensor &x, const SolverConfig &cfg,
                         const std::vector<const VarianceEstimator *> &estimators,
                         const IterationObserver &observer) {
  cfg.validate();
  const std::size_t n_src = x.slots();
  const std::size_t n_freq = x.freqs();
  const std::size_t n_frames = x.frames();
  if (n_src == 0 || n_freq == 0 || n_frames == 0) throw InvalidArgument("separate: empty input");
  if (cfg.ref_channel >= n_src) throw InvalidArgument("separate: reference channel out of range");
  const bool uses_estimator = cfg.mode != SolverMode::ilrma;
  const bool uses_nmf = cfg.mode != SolverMode::idlma;
  if (uses_estimator) {
    if (estimators.size() != n_src)
      throw InvalidArgument("separate: need one estimator per source (" + std::to_string(n_src) +
                            "), got " + std::to_string(estimators.size()));
    for (const auto *e : estimators)
      if (e == nullptr) throw InvalidArgument("separate: null estimator");
  }
  const PosmWeights weights = cfg.effective_weights();

  SeparationState state;
  state.w = DemixingStack::identity(n_freq, n_src);
  for (std::size_t n = 0; n < n_src; ++n) {
    state.nmf.push_back(NmfModel::random(n_freq, n_frames, cfg.n_bases,
                                         cfg.seed * 0x9E3779B97F4A7C15ULL + n));
    state.r_nmf.push_back(nmf_variance(state.nmf[n]));
  }
  state.r_tilde = state.r_nmf;
  state.y = x;  // W = I
  SpectroTensor y_raw = x;

  const std::size_t n_outer = uses_estimator ? cfg.outer_iters : 1;
  const std::size_t n_inner =
      uses_estimator ? cfg.inner_iters : cfg.outer_iters * cfg.inner_iters;
  std::size_t iteration = 0;

  for (std::size_t l = 0; l < n_outer; ++l) {
    if (uses_estimator) {
      state.r_dnn.resize(n_src);
      for (std::size_t n = 0; n < n_src; ++n) {
        const RealMatrix sigma = estimators[n]->estimate(state.y.magnitude(n));
        if (sigma.rows() != n_freq || sigma.cols() != n_frames)
          throw InvalidArgument("separate: estimator output shape mismatch");
        state.r_dnn[n] = floor_variance(sigma, cfg.eps);
        state.r_tilde[n] = combine_posm(state.r_nmf[n], state.r_dnn[n], weights);
      }
    }
    for (std::size_t lp = 0; lp < n_inner; ++lp) {
      if (uses_nmf) {
        for (std::size_t n = 0; n < n_src; ++n) {
          const RealMatrix power = y_raw.power(n);
          if (cfg.mode == SolverMode::ilrma)
            update_nmf_ilrma(state.nmf[n], power);
          else
            update_nmf_posm(state.nmf[n], power, state.r_dnn[n], weights);
          state.r_nmf[n] = nmf_variance(state.nmf[n]);
          state.r_tilde[n] = uses_estimator
                                 ? combine_posm(state.r_nmf[n], state.r_dnn[n], weights)
                                 : state.r_nmf[n];
        }
      }
      ip_update(state.w, x, state.r_tilde);
      y_raw = demix(state.w, x);
      state.y = projection_back(y_raw, state.w, cfg.ref_channel);
      state.cost_trace.push_back(compute_cost(state, x, cfg));
      ++iteration;
      if (observer) observer({iteration, l + 1, lp + 1, state});
    }
  }
  return state;
}

}  // namespace posm
