// src/cli.cc

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

#include "posm/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "posm/audio_io.h"
#include "posm/dsp.h"
#include "posm/estimators.h"
#include "posm/eval.h"
#include "posm/experiment.h"
#include "posm/keyvalue.h"
#include "posm/parallel.h"
#include "posm/simulate.h"
#include "posm/solver.h"

namespace posm {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split(const std::string &text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<double> parse_doubles(const std::string &text, const char *what) {
  std::vector<double> out;
  for (const auto &item : split(text, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw InvalidArgument(std::string("bad number in ") + what + ": " + item);
    }
  }
  return out;
}

std::vector<DryKind> parse_kinds(const std::string &text) {
  std::vector<DryKind> kinds;
  for (const auto &item : split(text, ',')) kinds.push_back(parse_dry_kind(item));
  if (kinds.empty()) throw InvalidArgument("no source kinds given");
  return kinds;
}

void ensure_dir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

// Options shared by the commands that run the separator.
struct StftArgs {
  std::size_t window = 4096;
  std::size_t hop = 2048;
  std::string window_kind = "hamming";

  void add(CLI::App &app) {
    app.add_option("--window", window, "STFT window length in samples");
    app.add_option("--hop", hop, "STFT hop in samples");
    app.add_option("--window-kind", window_kind, "hamming or hann");
  }
  StftConfig resolve(int rate) const {
    StftConfig cfg{window, hop, parse_window_kind(window_kind), rate};
    cfg.validate();
    return cfg;
  }
  void record(KeyValueFile &kv) const {
    kv.set("window", static_cast<std::uint64_t>(window));
    kv.set("hop", static_cast<std::uint64_t>(hop));
    kv.set("window-kind", window_kind);
  }
};

struct SolverArgs {
  std::size_t k = 20;
  std::size_t outer = 10;
  std::size_t inner = 10;
  double eps = 0.1;
  std::size_t ref = 1;

  void add(CLI::App &app) {
    app.add_option("--k", k, "NMF bases per source");
    app.add_option("--outer", outer, "estimator refreshes (L)");
    app.add_option("--inner", inner, "NMF/demixing updates per refresh (L')");
    app.add_option("--eps", eps, "floor on estimator variances");
    app.add_option("--ref", ref, "reference channel (1-based)");
  }
  SolverConfig resolve(SolverMode mode, double alpha, double beta, std::uint64_t seed) const {
    if (ref == 0) throw InvalidArgument("--ref is 1-based");
    SolverConfig cfg;
    cfg.outer_iters = outer;
    cfg.inner_iters = inner;
    cfg.n_bases = k;
    cfg.eps = eps;
    cfg.weights = {alpha, beta};
    cfg.ref_channel = ref - 1;
    cfg.seed = seed;
    cfg.mode = mode;
    cfg.validate();
    return cfg;
  }
  void record(KeyValueFile &kv) const {
    kv.set("k", static_cast<std::uint64_t>(k));
    kv.set("outer", static_cast<std::uint64_t>(outer));
    kv.set("inner", static_cast<std::uint64_t>(inner));
    kv.set("eps", eps);
    kv.set("ref", static_cast<std::uint64_t>(ref));
  }
};

struct SceneArgs {
  std::size_t sources = 2;
  std::size_t channels = 2;
  int rate = 8000;
  double duration = 20.0;
  double t60 = 150.0;
  double spread = 60.0;
  std::string kinds = "tonal,percussive";

  void add(CLI::App &app) {
    app.add_option("--sources", sources, "number of sources");
    app.add_option("--channels", channels, "number of microphones");
    app.add_option("--rate", rate, "sample rate in Hz");
    app.add_option("--duration", duration, "scene duration in seconds");
    app.add_option("--t60", t60, "reverberation time in ms");
    app.add_option("--spread", spread, "angular spread of the sources in degrees");
    app.add_option("--kinds", kinds, "comma-separated source kinds");
  }
  SceneParams resolve(std::uint64_t seed) const {
    SceneParams p;
    p.sources = sources;
    p.channels = channels;
    p.sample_rate_hz = rate;
    p.duration_s = duration;
    p.t60_ms = t60;
    p.angle_spread_deg = spread;
    p.seed = seed;
    p.kinds = parse_kinds(kinds);
    p.validate();
    return p;
  }
  void record(KeyValueFile &kv) const {
    kv.set("sources", static_cast<std::uint64_t>(sources));
    kv.set("channels", static_cast<std::uint64_t>(channels));
    kv.set("rate", static_cast<std::int64_t>(rate));
    kv.set("duration", duration);
    kv.set("t60", t60);
    kv.set("spread", spread);
    kv.set("kinds", kinds);
  }
};

// ---------------------------------------------------------------------------
// Estimator specs: oracle:<scene>, oracle-corrupt:<scene>:<kind>:<strength>,
// file:<vars.psm1>, mlp:<a.psm2>[,<b.psm2>...]

struct EstimatorBundle {
  std::vector<std::unique_ptr<VarianceEstimator>> owned;

  std::vector<const VarianceEstimator *> pointers() const {
    std::vector<const VarianceEstimator *> out;
    for (const auto &e : owned) out.push_back(e.get());
    return out;
  }
};

EstimatorBundle build_estimators(const std::string &spec, std::size_t n_src,
                                 const StftConfig &stft_cfg, std::size_t ref_channel,
                                 std::uint64_t seed) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw InvalidArgument("bad estimator spec: " + spec);
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  EstimatorBundle bundle;

  if (kind == "oracle" || kind == "oracle-corrupt") {
    std::string manifest = rest;
    Corruption corruption = Corruption::none;
    double strength = 0.0;
    if (kind == "oracle-corrupt") {
      const auto c2 = rest.rfind(':');
      const auto c1 = c2 == std::string::npos ? c2 : rest.rfind(':', c2 - 1);
      if (c1 == std::string::npos || c2 == std::string::npos)
        throw InvalidArgument("expected oracle-corrupt:<scene>:<kind>:<strength>");
      manifest = rest.substr(0, c1);
      corruption = parse_corruption(rest.substr(c1 + 1, c2 - c1 - 1));
      strength = parse_doubles(rest.substr(c2 + 1), "corruption strength").at(0);
    }
    const MixtureScene scene = read_scene(manifest);
    if (scene.sources() != n_src)
      throw InvalidArgument("oracle scene has " + std::to_string(scene.sources()) +
                            " sources, observation has " + std::to_string(n_src));
    for (auto &o : make_oracles(scene, stft_cfg, ref_channel, corruption, strength, seed))
      bundle.owned.push_back(std::make_unique<OracleEstimator>(std::move(o)));
  } else if (kind == "file") {
    auto fields = read_variance_file(rest);
    if (fields.size() != n_src)
      throw InvalidArgument("variance file holds " + std::to_string(fields.size()) +
                            " sources, expected " + std::to_string(n_src));
    for (auto &f : fields) bundle.owned.push_back(std::make_unique<FileEstimator>(std::move(f)));
  } else if (kind == "mlp") {
    const auto paths = split(rest, ',');
    if (paths.size() != n_src)
      throw InvalidArgument("mlp estimator needs " + std::to_string(n_src) + " comma-separated files");
    for (const auto &p : paths)
      bundle.owned.push_back(std::make_unique<ToyEstimator>(ToyEstimator::load(p)));
  } else {
    throw InvalidArgument("unknown estimator kind: " + kind);
  }
  return bundle;
}

// ---------------------------------------------------------------------------

struct SeparateArgs {
  std::string input, scene, mode = "posm", estimator, out;
  double alpha = 0.5;
  double beta = -1.0;  // negative: 1 - alpha
  std::uint64_t seed = 0;
  StftArgs stft;
  SolverArgs solver;
};

int cmd_separate(const SeparateArgs &a, std::ostream &out, std::ostream &err) {
  if (a.input.empty() == a.scene.empty())
    throw InvalidArgument("give exactly one of --input or --scene");
  if (a.out.empty()) throw InvalidArgument("--out is required");
  const SolverMode mode = parse_solver_mode(a.mode);
  const double beta = a.beta < 0.0 ? 1.0 - a.alpha : a.beta;
  const SolverConfig cfg = a.solver.resolve(mode, a.alpha, beta, a.seed);

  std::unique_ptr<MixtureScene> scene;
  TimeSignal observed;
  if (!a.scene.empty()) {
    scene = std::make_unique<MixtureScene>(read_scene(a.scene));
    observed = scene->observed;
  } else {
    observed = read_wav(a.input);
  }
  const std::size_t n_src = observed.channel_count();
  const StftConfig stft_cfg = a.stft.resolve(observed.sample_rate_hz);
  if (cfg.ref_channel >= n_src) throw InvalidArgument("--ref exceeds the channel count");

  EstimatorBundle bundle;
  if (mode == SolverMode::ilrma) {
    if (!a.estimator.empty()) err << "warning: --estimator is ignored in ilrma mode\n";
  } else {
    if (a.estimator.empty()) throw InvalidArgument("--estimator is required for mode " + a.mode);
    bundle = build_estimators(a.estimator, n_src, stft_cfg, cfg.ref_channel, a.seed);
  }

  const SpectroTensor x = stft(observed, stft_cfg);
  std::vector<SdrReport> reports;
  SeparationState state;
  try {
    state = separate(x, cfg, bundle.pointers(), [&](const IterationView &view) {
      if (!scene) return;
      const TimeSignal y = istft(view.state.y, stft_cfg, observed.length());
      reports.push_back(evaluate_scene(*scene, split_channels(y), cfg.ref_channel));
    });
  } catch (const NumericalError &e) {
    throw NumericalError(std::string("separate failed: ") + e.what());
  }

  ensure_dir(a.out);
  const TimeSignal y = istft(state.y, stft_cfg, observed.length());
  std::size_t clipped = 0;
  for (std::size_t n = 0; n < n_src; ++n) {
    const std::string path = (fs::path(a.out) / ("src_" + std::to_string(n + 1) + ".wav")).string();
    clipped += write_wav(y.channel(n), {observed.sample_rate_hz, 1, SampleFormat::float32}, path);
  }
  if (clipped > 0) err << "warning: " << clipped << " output samples clipped\n";
  write_text((fs::path(a.out) / "trace.csv").string(), trace_to_csv(state.cost_trace, reports, n_src));

  KeyValueFile kv;
  kv.set("command", std::string("separate"));
  if (!a.input.empty()) kv.set("input", a.input);
  if (!a.scene.empty()) kv.set("scene", a.scene);
  kv.set("mode", a.mode);
  kv.set("alpha", a.alpha);
  kv.set("beta", beta);
  if (!a.estimator.empty()) kv.set("estimator", a.estimator);
  kv.set("seed", a.seed);
  a.solver.record(kv);
  a.stft.record(kv);
  kv.set("out", a.out);
  kv.save((fs::path(a.out) / "run_manifest.txt").string());

  out << "separated " << n_src << " sources in " << state.cost_trace.size()
      << " iterations; final cost " << format_double(state.cost_trace.back()) << "\n";
  if (!reports.empty()) {
    out << "final SI-SDR improvement (dB):";
    for (double v : reports.back().si_sdr_improvement_db) out << " " << std::fixed << std::setprecision(2) << v;
    out << std::defaultfloat << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string out;
  std::uint64_t seed = 0;
  SceneArgs scene;
};

int cmd_simulate(const SimulateArgs &a, std::ostream &out) {
  if (a.out.empty()) throw InvalidArgument("--out is required");
  const SceneParams params = a.scene.resolve(a.seed);
  const MixtureScene scene = generate_scene(params);
  const std::string manifest = write_scene(scene, params, a.out);
  out << manifest << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string out, scenes_list;
  std::size_t scenes = 2;
  std::uint64_t seed = 1000;
  std::size_t hidden = 64;
  std::size_t epochs = 50;
  std::size_t batch = 16;
  double lr = 1e-3;
  double delta = 1e-5;
  std::size_t ref = 1;
  StftArgs stft;
  SceneArgs scene;
};

int cmd_train(const TrainArgs &a, std::ostream &out) {
  if (a.out.empty()) throw InvalidArgument("--out is required");
  if (a.ref == 0) throw InvalidArgument("--ref is 1-based");
  std::vector<MixtureScene> scenes;
  if (!a.scenes_list.empty()) {
    for (const auto &p : split(a.scenes_list, ',')) scenes.push_back(read_scene(p));
  } else {
    for (std::size_t s = 0; s < a.scenes; ++s) scenes.push_back(generate_scene(a.scene.resolve(a.seed + s)));
  }
  if (scenes.empty()) throw InvalidArgument("no training data");
  const std::size_t n_src = scenes[0].sources();
  const StftConfig stft_cfg = a.stft.resolve(scenes[0].observed.sample_rate_hz);
  const std::size_t ref = a.ref - 1;
  if (ref >= scenes[0].channels()) throw InvalidArgument("--ref exceeds the channel count");

  ensure_dir(a.out);
  TrainConfig cfg{a.delta, a.epochs, a.batch, a.lr, a.seed};
  std::vector<std::vector<double>> curves;
  for (std::size_t n = 0; n < n_src; ++n) {
    std::vector<TrainingPair> pairs;
    for (const auto &sc : scenes) {
      if (sc.sources() != n_src) throw InvalidArgument("training scenes differ in source count");
      pairs.push_back({stft(sc.observed.channel(ref), stft_cfg).magnitude(0),
                       stft(sc.images[n].channel(ref), stft_cfg).magnitude(0)});
    }
    const auto init = ToyEstimator::random(stft_cfg.freq_count(), a.hidden, a.seed * 31 + n);
    cfg.seed = a.seed * 131 + n;
    TrainResult result = train_toy(init, pairs, cfg);
    result.estimator.save((fs::path(a.out) / ("est_" + std::to_string(n + 1) + ".psm2")).string());
    curves.push_back(std::move(result.loss_curve));
    out << "source " << n + 1 << ": loss " << format_double(curves.back().front()) << " -> "
        << format_double(curves.back().back()) << "\n";
  }

  std::string csv = "epoch";
  for (std::size_t n = 0; n < n_src; ++n) csv += ",loss_src" + std::to_string(n + 1);
  csv += "\n";
  for (std::size_t e = 0; e < curves[0].size(); ++e) {
    csv += std::to_string(e);
    for (const auto &c : curves) csv += "," + format_double(c[e]);
    csv += "\n";
  }
  write_text((fs::path(a.out) / "loss_curve.csv").string(), csv);

  KeyValueFile kv;
  kv.set("command", std::string("train"));
  if (!a.scenes_list.empty()) kv.set("scene", a.scenes_list);
  kv.set("scenes", static_cast<std::uint64_t>(a.scenes));
  kv.set("seed", a.seed);
  kv.set("hidden", static_cast<std::uint64_t>(a.hidden));
  kv.set("epochs", static_cast<std::uint64_t>(a.epochs));
  kv.set("batch", static_cast<std::uint64_t>(a.batch));
  kv.set("lr", a.lr);
  kv.set("delta", a.delta);
  kv.set("ref", static_cast<std::uint64_t>(a.ref));
  a.stft.record(kv);
  a.scene.record(kv);
  kv.set("out", a.out);
  kv.save((fs::path(a.out) / "run_manifest.txt").string());
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string out, scenes_list;
  std::size_t scenes = 5;
  std::uint64_t seed = 0;
  std::string alphas = "0.5,0.1,0.01,0.001,0.0001,1e-05";
  std::string corruption = "band_swap";
  double strength = 0.5;
  StftArgs stft;
  SolverArgs solver;
  SceneArgs scene;
};

struct BenchRow {
  std::string mode;
  double alpha;
  std::vector<double> cost;
  std::vector<double> improvement;
};

int cmd_bench(const BenchArgs &a, std::ostream &out) {
  if (a.out.empty()) throw InvalidArgument("--out is required");
  const auto alphas = parse_doubles(a.alphas, "--alphas");
  for (double al : alphas)
    if (!(al >= 0.0 && al <= 1.0)) throw InvalidArgument("--alphas must lie in [0, 1]");
  const Corruption corruption = parse_corruption(a.corruption);
  const auto manifests = split(a.scenes_list, ',');
  const std::size_t n_scenes = manifests.empty() ? a.scenes : manifests.size();
  if (n_scenes == 0) throw InvalidArgument("no scenes to benchmark");
  if (!manifests.empty()) {
    for (const auto &m : manifests)
      if (!fs::exists(m)) throw IoError("scene manifest not found: " + m);
  }

  std::vector<std::vector<BenchRow>> results(n_scenes);
  parallel_for(n_scenes, [&](std::size_t s) {
    const std::uint64_t scene_seed = a.seed + s;
    const MixtureScene scene =
        manifests.empty() ? generate_scene(a.scene.resolve(scene_seed)) : read_scene(manifests[s]);
    const StftConfig stft_cfg = a.stft.resolve(scene.observed.sample_rate_hz);
    const auto oracles = make_oracles(scene, stft_cfg, a.solver.ref - 1, corruption, a.strength,
                                      scene_seed * 31 + 7);
    const auto ptrs = as_pointers(oracles);
    auto run = [&](SolverMode mode, double alpha) {
      const SolverConfig cfg = a.solver.resolve(mode, alpha, 1.0 - alpha, scene_seed);
      TracedRun r = run_traced(scene, stft_cfg, cfg, ptrs);
      const PosmWeights w = cfg.effective_weights();
      results[s].push_back({to_string(mode), w.alpha, r.state.cost_trace, r.mean_improvement()});
    };
    run(SolverMode::ilrma, 1.0);
    run(SolverMode::idlma, 0.0);
    for (double al : alphas) run(SolverMode::posm, al);
  });

  ensure_dir(a.out);
  std::string long_csv = "scene,mode,alpha,iteration,cost,sdr_improvement\n";
  std::string summary = "scene,mode,alpha,final_sdr_improvement,peak_sdr_improvement\n";
  for (std::size_t s = 0; s < n_scenes; ++s)
    for (const auto &row : results[s]) {
      const std::string prefix = std::to_string(s + 1) + "," + row.mode + "," + format_double(row.alpha);
      for (std::size_t it = 0; it < row.cost.size(); ++it)
        long_csv += prefix + "," + std::to_string(it + 1) + "," + format_double(row.cost[it]) + "," +
                    format_double(row.improvement[it]) + "\n";
      summary += prefix + "," + format_double(row.improvement.back()) + "," +
                 format_double(*std::max_element(row.improvement.begin(), row.improvement.end())) +
                 "\n";
    }
  write_text((fs::path(a.out) / "bench_long.csv").string(), long_csv);
  write_text((fs::path(a.out) / "bench_summary.csv").string(), summary);

  KeyValueFile kv;
  kv.set("command", std::string("bench"));
  if (!a.scenes_list.empty()) kv.set("scene", a.scenes_list);
  kv.set("scenes", static_cast<std::uint64_t>(a.scenes));
  kv.set("seed", a.seed);
  kv.set("alphas", a.alphas);
  kv.set("corruption", a.corruption);
  kv.set("strength", a.strength);
  a.solver.record(kv);
  a.stft.record(kv);
  a.scene.record(kv);
  kv.set("out", a.out);
  kv.save((fs::path(a.out) / "run_manifest.txt").string());

  out << std::left << std::setw(8) << "mode" << std::setw(10) << "alpha"
      << "mean final SI-SDR improvement (dB)\n";
  for (std::size_t r = 0; r < results[0].size(); ++r) {
    double mean = 0.0;
    for (std::size_t s = 0; s < n_scenes; ++s) mean += results[s][r].improvement.back();
    mean /= static_cast<double>(n_scenes);
    out << std::setw(8) << results[0][r].mode << std::setw(10) << format_double(results[0][r].alpha)
        << std::fixed << std::setprecision(3) << mean << std::defaultfloat << "\n";
  }
  return kExitOk;
}

// Prepends `--key value` pairs from the file named by --config so that
// explicit flags, which come later, take precedence.
std::vector<std::string> expand_config(const std::vector<std::string> &args) {
  std::string config;
  for (std::size_t k = 0; k + 1 < args.size(); ++k)
    if (args[k] == "--config") config = args[k + 1];
  if (config.empty()) return args;
  const KeyValueFile kv = KeyValueFile::load(config);
  std::vector<std::string> out(args.begin(), args.begin() + std::min<std::size_t>(2, args.size()));
  for (const auto &[key, value] : kv.entries()) {
    if (key == "command") continue;
    out.push_back("--" + key);
    out.push_back(value);
  }
  for (std::size_t k = 2; k < args.size(); ++k) out.push_back(args[k]);
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string> &raw_args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Determined multichannel source separation (ILRMA, IDLMA, PoSM-IDLMA)", "posm"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  std::string config;
  auto add_config = [&](CLI::App *sub) {
    sub->add_option("--config", config, "key = value file; explicit flags override it");
  };

  SeparateArgs sep;
  auto *separate_cmd = app.add_subcommand("separate", "separate a multichannel mixture");
  separate_cmd->add_option("--input", sep.input, "mixture WAV");
  separate_cmd->add_option("--scene", sep.scene, "scene manifest (enables SI-SDR tracing)");
  separate_cmd->add_option("--mode", sep.mode, "ilrma, idlma or posm");
  separate_cmd->add_option("--alpha", sep.alpha, "NMF expert weight");
  separate_cmd->add_option("--beta", sep.beta, "estimator expert weight (default 1 - alpha)");
  separate_cmd->add_option("--estimator", sep.estimator,
                           "oracle:<scene> | oracle-corrupt:<scene>:<kind>:<strength> | "
                           "file:<vars.psm1> | mlp:<a.psm2>,<b.psm2>");
  separate_cmd->add_option("--seed", sep.seed, "initialization seed");
  separate_cmd->add_option("--out", sep.out, "output directory");
  sep.solver.add(*separate_cmd);
  sep.stft.add(*separate_cmd);
  add_config(separate_cmd);

  SimulateArgs sim;
  auto *simulate_cmd = app.add_subcommand("simulate", "generate a synthetic mixture scene");
  simulate_cmd->add_option("--out", sim.out, "output directory");
  simulate_cmd->add_option("--seed", sim.seed, "generator seed");
  sim.scene.add(*simulate_cmd);
  add_config(simulate_cmd);

  TrainArgs tr;
  auto *train_cmd = app.add_subcommand("train", "train per-source toy variance estimators");
  train_cmd->add_option("--out", tr.out, "output directory");
  train_cmd->add_option("--scene", tr.scenes_list, "comma-separated scene manifests");
  train_cmd->add_option("--scenes", tr.scenes, "number of generated training scenes");
  train_cmd->add_option("--seed", tr.seed, "seed for data and initialization");
  train_cmd->add_option("--hidden", tr.hidden, "hidden units per layer");
  train_cmd->add_option("--epochs", tr.epochs, "training epochs");
  train_cmd->add_option("--batch", tr.batch, "mini-batch size in frames");
  train_cmd->add_option("--lr", tr.lr, "learning rate");
  train_cmd->add_option("--delta", tr.delta, "loss stabilizer");
  train_cmd->add_option("--ref", tr.ref, "reference channel (1-based)");
  tr.stft.add(*train_cmd);
  tr.scene.add(*train_cmd);
  add_config(train_cmd);

  BenchArgs bench;
  auto *bench_cmd = app.add_subcommand("bench", "compare ilrma, idlma and posm over seeded scenes");
  bench_cmd->add_option("--out", bench.out, "output directory");
  bench_cmd->add_option("--scene", bench.scenes_list, "comma-separated scene manifests");
  bench_cmd->add_option("--scenes", bench.scenes, "number of generated scenes");
  bench_cmd->add_option("--seed", bench.seed, "base seed");
  bench_cmd->add_option("--alphas", bench.alphas, "comma-separated posm alpha sweep (beta = 1 - alpha)");
  bench_cmd->add_option("--corruption", bench.corruption, "oracle corruption: none, band_swap, smear");
  bench_cmd->add_option("--strength", bench.strength, "oracle corruption strength in [0, 1]");
  bench.solver.add(*bench_cmd);
  bench.stft.add(*bench_cmd);
  bench.scene.add(*bench_cmd);
  add_config(bench_cmd);

  try {
    std::vector<std::string> args;
    try {
      args = expand_config(raw_args);
    } catch (const IoError &e) {
      err << "error: " << e.what() << "\n";
      return kExitIo;
    }
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();  // program name
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidArgument &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (separate_cmd->parsed()) return cmd_separate(sep, out, err);
    if (simulate_cmd->parsed()) return cmd_simulate(sim, out);
    if (train_cmd->parsed()) return cmd_train(tr, out);
    if (bench_cmd->parsed()) return cmd_bench(bench, out);
  } catch (const InvalidArgument &e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError &e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericalError &e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace posm
