// src/simulate.cc

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

#include "posm/simulate.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "posm/audio_io.h"
#include "posm/dsp.h"
#include "posm/keyvalue.h"

namespace posm {

namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSoundSpeed = 343.0;
constexpr double kMicSpacing = 0.04;
constexpr double kPeak = 0.9;
constexpr long kSincHalfWidth = 8;
constexpr long kDirectDelay = 12;
constexpr double kTailLevel = 0.08;

void normalize_peak(std::vector<double> &x, double peak) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  if (m > 0.0)
    for (auto &v : x) v = static_cast<float>(v * (peak / m));
}

std::vector<double> tonal(std::size_t n, double fs, std::mt19937_64 &rng) {
  std::vector<double> x(n, 0.0);
  std::uniform_real_distribution<double> note_len(0.25, 0.6);
  std::uniform_int_distribution<int> degree(0, 14);
  static constexpr int kScale[] = {0, 2, 4, 5, 7, 9, 11};
  std::size_t start = 0;
  while (start < n) {
    const auto len = static_cast<std::size_t>(note_len(rng) * fs);
    const int d = degree(rng);
    const int semis = kScale[d % 7] + 12 * (d / 7);
    const double f0 = 110.0 * std::pow(2.0, semis / 12.0);
    const double vib_rate = 5.0;
    double phase = 0.0;
    for (std::size_t t = 0; t < len && start + t < n; ++t) {
      const double time = static_cast<double>(t) / fs;
      const double f = f0 * (1.0 + 0.005 * std::sin(kTwoPi * vib_rate * time));
      phase += kTwoPi * f / fs;
      const double env = std::min(1.0, time / 0.02) * std::exp(-2.5 * time);
      double s = 0.0;
      for (int h = 1; h <= 8; ++h) {
        if (f0 * h >= fs / 2) break;
        s += std::exp(-0.35 * (h - 1)) * std::sin(h * phase);
      }
      x[start + t] = env * s;
    }
    start += len;
  }
  return x;
}

std::vector<double> percussive(std::size_t n, double fs, std::mt19937_64 &rng) {
  std::vector<double> x(n, 0.0);
  std::exponential_distribution<double> gap(2.0);  // hits per second
  std::uniform_real_distribution<double> decay(0.008, 0.02);
  std::uniform_real_distribution<double> level(0.5, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  double when = gap(rng);
  while (when * fs < static_cast<double>(n)) {
    const auto t0 = static_cast<std::size_t>(when * fs);
    const double tau = decay(rng) * fs;
    const double a = level(rng);
    double lp = 0.0;
    for (std::size_t t = 0; t0 + t < n && static_cast<double>(t) < 12.0 * tau; ++t) {
      lp = 0.6 * lp + 0.4 * noise(rng);
      x[t0 + t] += a * std::exp(-static_cast<double>(t) / tau) * lp;
    }
    when += 0.05 + gap(rng);
  }
  return x;
}

std::vector<double> noise_band(std::size_t n, double fs, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> centre(300.0, 1500.0);
  std::normal_distribution<double> noise(0.0, 1.0);
  // RBJ band-pass biquad, Q = 2.
  const double w0 = kTwoPi * centre(rng) / fs;
  const double alpha = std::sin(w0) / 4.0;
  const double a0 = 1.0 + alpha;
  const double b0 = alpha / a0, b2 = -alpha / a0;
  const double a1 = -2.0 * std::cos(w0) / a0, a2 = (1.0 - alpha) / a0;
  std::vector<double> x(n);
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double in = noise(rng);
    const double y = b0 * in + b2 * x2 - a1 * y1 - a2 * y2;
    x2 = x1;
    x1 = in;
    y2 = y1;
    y1 = y;
    const double drift = 0.6 + 0.4 * std::sin(kTwoPi * 0.25 * static_cast<double>(t) / fs);
    x[t] = y * drift;
  }
  return x;
}

std::vector<double> synth_sweep(std::size_t n, double fs, std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> period(1.5, 3.0);
  std::vector<double> x(n, 0.0);
  double phase = 0.0;
  std::size_t start = 0;
  while (start < n) {
    const double seg = period(rng);
    const auto len = static_cast<std::size_t>(seg * fs);
    const bool up = (rng() & 1u) != 0;
    for (std::size_t t = 0; t < len && start + t < n; ++t) {
      const double u = static_cast<double>(t) / static_cast<double>(len);
      const double f = 80.0 * std::pow(10.0, up ? u : 1.0 - u);  // 80..800 Hz
      phase += kTwoPi * f / fs;
      double s = 0.0;
      for (int h = 1; h <= 6; ++h) {
        if (f * h >= fs / 2) break;
        s += std::sin(h * phase) / h;
      }
      x[start + t] = s;
    }
    start += len;
  }
  return x;
}

}  // namespace

DryKind parse_dry_kind(const std::string &name) {
  if (name == "tonal") return DryKind::tonal;
  if (name == "percussive") return DryKind::percussive;
  if (name == "noise_band") return DryKind::noise_band;
  if (name == "synth_sweep") return DryKind::synth_sweep;
  throw InvalidArgument("unknown source kind: " + name);
}

std::string to_string(DryKind kind) {
  switch (kind) {
    case DryKind::tonal: return "tonal";
    case DryKind::percussive: return "percussive";
    case DryKind::noise_band: return "noise_band";
    case DryKind::synth_sweep: return "synth_sweep";
  }
  return "tonal";
}

TimeSignal synth_dry(DryKind kind, double duration_s, int sample_rate_hz, std::uint64_t seed) {
  if (!(duration_s > 0.0)) throw InvalidArgument("synth_dry: duration must be positive");
  if (sample_rate_hz <= 0) throw InvalidArgument("synth_dry: sample rate must be positive");
  const double fs = sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * fs));
  std::mt19937_64 rng(seed);
  std::vector<double> x;
  switch (kind) {
    case DryKind::tonal: x = tonal(n, fs, rng); break;
    case DryKind::percussive: x = percussive(n, fs, rng); break;
    case DryKind::noise_band: x = noise_band(n, fs, rng); break;
    case DryKind::synth_sweep: x = synth_sweep(n, fs, rng); break;
  }
  normalize_peak(x, kPeak);
  TimeSignal out;
  out.channels = {std::move(x)};
  out.sample_rate_hz = sample_rate_hz;
  return out;
}

ImpulseResponseSet synth_irs(std::size_t channels, std::size_t sources, double t60_ms,
                             double angle_spread_deg, std::uint64_t seed, int sample_rate_hz) {
  if (channels == 0 || sources == 0) throw InvalidArgument("synth_irs: need channels and sources");
  if (!(t60_ms >= 0.0)) throw InvalidArgument("synth_irs: t60 must be >= 0");
  if (sample_rate_hz <= 0) throw InvalidArgument("synth_irs: sample rate must be positive");
  const double fs = sample_rate_hz;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-2.0, 2.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  ImpulseResponseSet irs;
  irs.n_sources = sources;
  irs.n_channels = channels;
  irs.sample_rate_hz = sample_rate_hz;

  std::vector<double> mic_x(channels), mic_dir(channels);
  for (std::size_t m = 0; m < channels; ++m) {
    const double u = channels == 1 ? 0.0
                                   : static_cast<double>(m) / static_cast<double>(channels - 1) - 0.5;
    mic_x[m] = u * kMicSpacing * static_cast<double>(channels - 1);
    mic_dir[m] = 90.0 * u;  // -45 .. +45 deg
  }

  const double t60_samples = t60_ms * 1e-3 * fs;
  const auto tail = static_cast<std::size_t>(std::ceil(1.5 * t60_samples));
  const std::size_t length = static_cast<std::size_t>(kDirectDelay + kSincHalfWidth + 2) + tail;

  for (std::size_t n = 0; n < sources; ++n) {
    const double u = sources == 1 ? 0.0
                                  : static_cast<double>(n) / static_cast<double>(sources - 1) - 0.5;
    const double theta = std::clamp(u * angle_spread_deg + jitter(rng), -60.0, 60.0);
    irs.source_angles_deg.push_back(theta);
  }
  irs.taps.assign(sources * channels, {});

  for (std::size_t n = 0; n < sources; ++n) {
    const double theta = irs.source_angles_deg[n] * std::numbers::pi / 180.0;
    for (std::size_t m = 0; m < channels; ++m) {
      const double gain =
          0.6 + 0.4 * std::cos(theta - mic_dir[m] * std::numbers::pi / 180.0);
      const double delay = kDirectDelay + mic_x[m] * std::sin(theta) / kSoundSpeed * fs;
      std::vector<double> h(length, 0.0);
      for (long k = 0; k < static_cast<long>(length); ++k) {
        const double d = static_cast<double>(k) - delay;
        if (std::abs(d) > kSincHalfWidth) continue;
        const double sinc = d == 0.0 ? 1.0 : std::sin(std::numbers::pi * d) / (std::numbers::pi * d);
        const double win = 0.5 + 0.5 * std::cos(std::numbers::pi * d / (kSincHalfWidth + 1));
        h[static_cast<std::size_t>(k)] = gain * sinc * win;
      }
      if (t60_samples > 0.0) {
        const auto first = static_cast<std::size_t>(std::ceil(delay)) + 2;
        for (std::size_t k = first; k < length; ++k) {
          const double age = static_cast<double>(k) - delay;
          const double env = kTailLevel * gain * std::exp(-3.0 * std::log(10.0) * age / t60_samples);
          h[k] += std::clamp(env * noise(rng), -0.5 * gain, 0.5 * gain);
        }
      }
      for (auto &v : h) v = static_cast<float>(v);
      irs.at(n, m) = std::move(h);
    }
  }
  return irs;
}

namespace {

// Direct form for short filters (exact for unit impulses), FFT otherwise.
std::vector<double> convolve(const std::vector<double> &x, const std::vector<double> &h) {
  if (h.size() > 64) return fft_convolve(x, h);
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (h[k] == 0.0) continue;
    for (std::size_t t = 0; t < x.size(); ++t) y[t + k] += h[k] * x[t];
  }
  return y;
}

}  // namespace

MixtureScene mix(std::vector<TimeSignal> dry, ImpulseResponseSet irs) {
  if (dry.empty()) throw InvalidArgument("mix: no sources");
  if (dry.size() != irs.n_sources) throw InvalidArgument("mix: source count does not match IRs");
  if (irs.taps.size() != irs.n_sources * irs.n_channels)
    throw InvalidArgument("mix: impulse response set is incomplete");
  const std::size_t len = dry[0].length();
  for (const auto &d : dry) {
    if (d.channel_count() != 1) throw InvalidArgument("mix: dry sources must be mono");
    if (d.length() != len) throw InvalidArgument("mix: dry sources differ in length");
  }
  const int rate = dry[0].sample_rate_hz;
  MixtureScene scene;
  scene.observed = TimeSignal(irs.n_channels, len, rate);
  std::vector<std::vector<float>> acc(irs.n_channels, std::vector<float>(len, 0.0f));
  for (std::size_t n = 0; n < dry.size(); ++n) {
    TimeSignal image(irs.n_channels, len, rate);
    for (std::size_t m = 0; m < irs.n_channels; ++m) {
      const auto conv = convolve(dry[n].channels[0], irs.at(n, m));
      for (std::size_t t = 0; t < len; ++t) {
        const float v = static_cast<float>(conv[t]);
        image.channels[m][t] = v;
        acc[m][t] += v;
      }
    }
    scene.images.push_back(std::move(image));
  }
  for (std::size_t m = 0; m < irs.n_channels; ++m)
    for (std::size_t t = 0; t < len; ++t) scene.observed.channels[m][t] = acc[m][t];
  scene.dry = std::move(dry);
  scene.irs = std::move(irs);
  return scene;
}

void SceneParams::validate() const {
  if (sources == 0 || channels == 0) throw InvalidArgument("scene: need sources and channels");
  if (sources != channels)
    throw InvalidArgument("scene: only determined scenes (sources == channels) are supported");
  if (!(duration_s > 0.0)) throw InvalidArgument("scene: duration must be positive");
  if (!(t60_ms >= 0.0)) throw InvalidArgument("scene: t60 must be >= 0");
  if (sample_rate_hz <= 0) throw InvalidArgument("scene: sample rate must be positive");
  if (kinds.empty()) throw InvalidArgument("scene: no source kinds given");
}

MixtureScene generate_scene(const SceneParams &params) {
  params.validate();
  std::vector<TimeSignal> dry;
  for (std::size_t n = 0; n < params.sources; ++n) {
    const DryKind kind = params.kinds[n % params.kinds.size()];
    dry.push_back(synth_dry(kind, params.duration_s, params.sample_rate_hz,
                            params.seed * 7919 + 101 * n + 1));
  }
  auto irs = synth_irs(params.channels, params.sources, params.t60_ms, params.angle_spread_deg,
                       params.seed * 7919 + 17, params.sample_rate_hz);
  MixtureScene scene = mix(dry, irs);
  double peak = 0.0;
  for (const auto &ch : scene.observed.channels)
    for (double v : ch) peak = std::max(peak, std::abs(v));
  if (peak > kPeak) {
    const double s = kPeak / peak;
    for (auto &d : dry)
      for (auto &v : d.channels[0]) v = static_cast<float>(v * s);
    scene = mix(std::move(dry), std::move(irs));
  }
  return scene;
}

namespace {

std::string join_kinds(const std::vector<DryKind> &kinds) {
  std::string out;
  for (std::size_t k = 0; k < kinds.size(); ++k) out += (k ? "," : "") + to_string(kinds[k]);
  return out;
}

std::vector<DryKind> split_kinds(const std::string &text) {
  std::vector<DryKind> kinds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) kinds.push_back(parse_dry_kind(item));
  return kinds;
}

}  // namespace

std::string write_scene(const MixtureScene &scene, const SceneParams &params,
                        const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  const int rate = scene.observed.sample_rate_hz;
  const std::size_t n_ch = scene.channels();

  KeyValueFile kv;
  kv.set("format", std::string("posm-scene-1"));
  kv.set("sources", static_cast<std::uint64_t>(scene.sources()));
  kv.set("channels", static_cast<std::uint64_t>(n_ch));
  kv.set("sample_rate_hz", static_cast<std::int64_t>(rate));
  kv.set("duration_s", params.duration_s);
  kv.set("t60_ms", params.t60_ms);
  kv.set("angle_spread_deg", params.angle_spread_deg);
  kv.set("seed", params.seed);
  kv.set("kinds", join_kinds(params.kinds));

  auto put = [&](const std::string &name, const TimeSignal &sig) {
    write_wav(sig, {rate, sig.channel_count(), SampleFormat::float32}, (fs::path(dir) / name).string());
  };
  put("observed.wav", scene.observed);
  kv.set("observed", std::string("observed.wav"));
  for (std::size_t n = 0; n < scene.sources(); ++n) {
    const std::string id = std::to_string(n + 1);
    put("dry_" + id + ".wav", scene.dry[n]);
    put("image_" + id + ".wav", scene.images[n]);
    TimeSignal ir(n_ch, scene.irs.at(n, 0).size(), rate);
    for (std::size_t m = 0; m < n_ch; ++m) ir.channels[m] = scene.irs.at(n, m);
    put("ir_" + id + ".wav", ir);
    kv.set("dry_" + id, "dry_" + id + ".wav");
    kv.set("image_" + id, "image_" + id + ".wav");
    kv.set("ir_" + id, "ir_" + id + ".wav");
    kv.set("angle_deg_" + id, scene.irs.source_angles_deg[n]);
  }
  const std::string manifest = (fs::path(dir) / "scene.txt").string();
  kv.save(manifest);
  return manifest;
}

MixtureScene read_scene(const std::string &manifest_path, SceneParams *params) {
  const KeyValueFile kv = KeyValueFile::load(manifest_path);
  const fs::path base = fs::path(manifest_path).parent_path();
  auto resolve = [&](const std::string &key) {
    const fs::path p(kv.get(key));
    return (p.is_absolute() ? p : base / p).string();
  };
  const auto n_src = static_cast<std::size_t>(kv.get_uint("sources"));
  const auto n_ch = static_cast<std::size_t>(kv.get_uint("channels"));

  MixtureScene scene;
  scene.observed = read_wav(resolve("observed"));
  if (scene.observed.channel_count() != n_ch)
    throw IoError(manifest_path + ": observed WAV channel count does not match manifest");
  scene.irs.n_sources = n_src;
  scene.irs.n_channels = n_ch;
  scene.irs.sample_rate_hz = scene.observed.sample_rate_hz;
  scene.irs.taps.assign(n_src * n_ch, {});
  for (std::size_t n = 0; n < n_src; ++n) {
    const std::string id = std::to_string(n + 1);
    scene.dry.push_back(read_wav(resolve("dry_" + id)));
    scene.images.push_back(read_wav(resolve("image_" + id)));
    const TimeSignal ir = read_wav(resolve("ir_" + id));
    if (ir.channel_count() != n_ch || scene.images.back().channel_count() != n_ch)
      throw IoError(manifest_path + ": image/IR channel count does not match manifest");
    for (std::size_t m = 0; m < n_ch; ++m) scene.irs.at(n, m) = ir.channels[m];
    scene.irs.source_angles_deg.push_back(
        kv.has("angle_deg_" + id) ? kv.get_double("angle_deg_" + id) : 0.0);
  }
  if (params) {
    params->sources = n_src;
    params->channels = n_ch;
    params->sample_rate_hz = scene.observed.sample_rate_hz;
    params->duration_s = kv.get_double("duration_s");
    params->t60_ms = kv.get_double("t60_ms");
    params->angle_spread_deg = kv.get_double("angle_spread_deg");
    params->seed = kv.get_uint("seed");
    params->kinds = split_kinds(kv.get("kinds"));
  }
  return scene;
}

}  // namespace posm
