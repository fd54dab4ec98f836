// src/eval.cc

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

#include "posm/eval.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "posm/keyvalue.h"

namespace posm {

namespace {

constexpr double kSdrCap = 100.0;

double dot(const double *a, const double *b, std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += a[k] * b[k];
  return s;
}

double si_sdr_n(const double *est, const double *ref, std::size_t n) {
  const double ref_energy = dot(ref, ref, n);
  if (!(ref_energy > 0.0)) throw InvalidArgument("si_sdr: zero reference");
  const double scale = dot(est, ref, n) / ref_energy;
  double target = 0.0, residual = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = scale * ref[k];
    const double e = est[k] - s;
    target += s * s;
    residual += e * e;
  }
  if (residual < 1e-20 * target) return kSdrCap;
  if (!(target > 0.0)) return -kSdrCap;
  return std::min(kSdrCap, 10.0 * std::log10(target / residual));
}

}  // namespace

double si_sdr(const std::vector<double> &estimate, const std::vector<double> &reference) {
  if (estimate.size() != reference.size()) throw InvalidArgument("si_sdr: length mismatch");
  return si_sdr_n(estimate.data(), reference.data(), estimate.size());
}

double SdrReport::mean_improvement() const {
  if (si_sdr_improvement_db.empty()) return 0.0;
  return std::accumulate(si_sdr_improvement_db.begin(), si_sdr_improvement_db.end(), 0.0) /
         static_cast<double>(si_sdr_improvement_db.size());
}

SdrReport evaluate_scene(const MixtureScene &scene, const std::vector<TimeSignal> &separated,
                         std::size_t ref_channel) {
  const std::size_t n_src = scene.sources();
  if (separated.size() != n_src)
    throw InvalidArgument("evaluate_scene: separated count does not match source count");
  if (n_src > 8) throw InvalidArgument("evaluate_scene: permutation search limited to 8 sources");
  if (ref_channel >= scene.channels()) throw InvalidArgument("evaluate_scene: bad reference channel");

  std::size_t len = scene.observed.length();
  for (const auto &s : separated) {
    if (s.channel_count() != 1) throw InvalidArgument("evaluate_scene: estimates must be mono");
    len = std::min(len, s.length());
  }
  for (const auto &img : scene.images) len = std::min(len, img.length());
  if (len == 0) throw InvalidArgument("evaluate_scene: empty signals");

  SdrReport report;
  for (const auto &s : separated) report.trimmed_samples += s.length() - len;
  report.trimmed_samples += scene.observed.length() - len;

  // sdr[n][e]: reference n against estimate e.
  std::vector<std::vector<double>> sdr(n_src, std::vector<double>(n_src));
  std::vector<double> baseline(n_src);
  const double *mixture = scene.observed.channels[ref_channel].data();
  for (std::size_t n = 0; n < n_src; ++n) {
    const double *ref = scene.images[n].channels[ref_channel].data();
    baseline[n] = si_sdr_n(mixture, ref, len);
    for (std::size_t e = 0; e < n_src; ++e)
      sdr[n][e] = si_sdr_n(separated[e].channels[0].data(), ref, len);
  }

  std::vector<std::size_t> perm(n_src);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_total = -std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t n = 0; n < n_src; ++n) total += sdr[n][perm[n]];
    if (total > best_total) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  report.permutation = best;
  for (std::size_t n = 0; n < n_src; ++n) {
    report.si_sdr_db.push_back(sdr[n][best[n]]);
    report.si_sdr_improvement_db.push_back(sdr[n][best[n]] - baseline[n]);
  }
  return report;
}

std::string trace_to_csv(const std::vector<double> &cost_trace,
                         const std::vector<SdrReport> &reports, std::size_t n_sources) {
  std::string out = "iteration,cost";
  for (std::size_t n = 0; n < n_sources; ++n) out += ",sdr_improvement_src" + std::to_string(n + 1);
  out += "\n";
  for (std::size_t it = 0; it < cost_trace.size(); ++it) {
    out += std::to_string(it + 1) + "," + format_double(cost_trace[it]);
    for (std::size_t n = 0; n < n_sources; ++n) {
      out += ",";
      if (it < reports.size() && n < reports[it].si_sdr_improvement_db.size())
        out += format_double(reports[it].si_sdr_improvement_db[n]);
      else
        out += "nan";
    }
    out += "\n";
  }
  return out;
}

}  // namespace posm
