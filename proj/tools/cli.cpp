/* Copyright 2026 The MRRN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "cli.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "mrrn/bench.hpp"
#include "mrrn/checkpoint.hpp"
#include "mrrn/complexity.hpp"
#include "mrrn/error.hpp"
#include "mrrn/gradsuite.hpp"
#include "mrrn/io.hpp"
#include "mrrn/linalg.hpp"
#include "mrrn/report.hpp"
#include "mrrn/sweep.hpp"
#include "mrrn/synth.hpp"
#include "mrrn/trainer.hpp"

namespace mrrn::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kSeedEnv = "MRRN_SEED";
const std::vector<std::string> kLevelNames = {"low", "mid", "high"};
const std::vector<std::string> kPoolNames = {"mean", "max"};

// Comma-separated list held as one string. Config files split such values
// into pieces; joining them back keeps both sources equivalent.
CLI::Option* AddListOption(CLI::App* app, const std::string& name, std::string& value,
                           const std::string& help) {
  return app->add_option(name, value, help)
      ->delimiter(',')
      ->multi_option_policy(CLI::MultiOptionPolicy::Join);
}

template <typename T>
std::vector<T> ParseList(const std::string& text, const std::string& flag) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    T v{};
    const char* end = item.data() + item.size();
    auto [ptr, ec] = std::from_chars(item.data(), end, v);
    if (ec != std::errc() || ptr != end || item.empty()) {
      throw ValidationError(flag + ": cannot parse '" + item + "' in '" + text + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(flag + ": empty list");
  return out;
}

std::vector<Level> ParseLevels(const std::string& text, const std::string& flag) {
  std::vector<Level> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(ParseLevel(item));
    } catch (const ValidationError& e) {
      throw ValidationError(flag + ": " + e.what());
    }
  }
  if (out.empty()) throw ValidationError(flag + ": empty list");
  return out;
}

// Flags shared by every command that trains a model.
struct TrainFlags {
  std::string level = "high";
  std::size_t layers = 3;
  std::size_t hidden = 1024;
  std::string pool = "mean";
  std::size_t epochs = 12;
  std::size_t batch = 28;
  double lr1 = 1e-5;
  double lr2 = 1e-6;
  std::size_t lr_drop_epoch = 8;
  double dropout = 0.5;
  std::uint64_t seed = 7;
  std::size_t clip_len = 30;
  std::size_t stride = 8;
  std::size_t max_clips = 20;
  CLI::Option* seed_opt = nullptr;

  void Add(CLI::App* app, bool capacity) {
    app->add_option("--level", level, "Feature level")->check(CLI::IsMember(kLevelNames));
    if (capacity) {
      app->add_option("--layers", layers, "Stacked SRU layers")->check(CLI::PositiveNumber);
      app->add_option("--hidden", hidden, "Hidden units per layer")
          ->check(CLI::PositiveNumber);
      app->add_option("--pool", pool, "Temporal pooling")->check(CLI::IsMember(kPoolNames));
    }
    app->add_option("--epochs", epochs, "Training epochs")->check(CLI::PositiveNumber);
    app->add_option("--batch", batch, "Clips per mini-batch")->check(CLI::PositiveNumber);
    app->add_option("--lr1", lr1, "Learning rate up to --lr-drop-epoch")
        ->check(CLI::PositiveNumber);
    app->add_option("--lr2", lr2, "Learning rate afterwards")->check(CLI::PositiveNumber);
    app->add_option("--lr-drop-epoch", lr_drop_epoch, "Last epoch trained at --lr1")
        ->check(CLI::PositiveNumber);
    app->add_option("--dropout", dropout, "Dropout between layers")
        ->check(CLI::Range(0.0, 0.999));
    seed_opt = app->add_option("--seed", seed,
                               "Seed for initialization, shuffling and dropout "
                               "(falls back to $MRRN_SEED)");
    app->add_option("--clip-len", clip_len, "Frames per clip")->check(CLI::PositiveNumber);
    app->add_option("--stride", stride, "Frames between clip starts")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-clips", max_clips, "Clips kept per video")
        ->check(CLI::PositiveNumber);
  }

  TrainConfig ToConfig() const {
    if (lr2 > lr1) throw ValidationError("--lr2 must not exceed --lr1");
    TrainConfig c;
    c.level = ParseLevel(level);
    c.layers = layers;
    c.hidden = hidden;
    c.pool = ParsePooling(pool);
    c.epochs = epochs;
    c.batch = batch;
    c.lr1 = lr1;
    c.lr2 = lr2;
    c.lr_drop_epoch = lr_drop_epoch;
    c.dropout = dropout;
    c.seed = seed;
    c.clips.clip_len = clip_len;
    c.clips.stride = stride;
    c.clips.max_clips = max_clips;
    c.Validate();
    return c;
  }
};

// Flag beats config file (both counted by CLI11), which beats the
// environment, which beats the built-in default.
void ApplySeedEnv(const CLI::Option* opt, std::uint64_t& seed) {
  if (opt == nullptr || opt->count() > 0) return;
  const char* env = std::getenv(kSeedEnv);
  if (env == nullptr || *env == '\0') return;
  const std::string text(env);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ValidationError(std::string(kSeedEnv) + ": cannot parse '" + text +
                          "' as an unsigned integer");
  }
  seed = v;
}

fs::path OutDir(const std::string& flag_value, const std::string& fallback) {
  return flag_value.empty() ? fs::path(fallback) : fs::path(flag_value);
}

DatasetManifest LoadDataManifest(const fs::path& data, const std::string& split) {
  const fs::path path = data / (split + ".jsonl");
  if (!fs::exists(path)) {
    throw IoError("--data: no " + split + ".jsonl in " + data.string());
  }
  return LoadManifest(path);
}

void PrintEpoch(std::ostream& out, const TrainState& s) {
  for (const auto& row : s.history) {
    if (row.epoch != s.epoch) continue;
    out << fmt::format("epoch {:>2} {:<5} loss {:.4f} acc {:.4f} lr {:g}\n", row.epoch,
                       row.split, row.loss, row.accuracy, row.lr);
  }
  out.flush();
}

// Keys whose values differ between two serialized configs.
std::vector<std::string> ConfigDiff(const TrainConfig& a, const TrainConfig& b) {
  auto lines = [](const TrainConfig& c) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(c.Serialize());
    std::string line;
    while (std::getline(ss, line)) {
      const auto eq = line.find('=');
      if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
  };
  const auto ka = lines(a), kb = lines(b);
  std::vector<std::string> diff;
  for (const auto& [k, v] : ka) {
    auto it = kb.find(k);
    if (it == kb.end() || it->second != v) diff.push_back(k);
  }
  return diff;
}

// ---- synth -----------------------------------------------------------------

struct SynthCmd {
  SynthConfig cfg;
  std::string noise = "1.5,1.25,1.0";
  std::string levels = "low,mid,high";
  std::string out = "out/synth";
  CLI::Option* seed_opt = nullptr;

  void Add(CLI::App* app) {
    app->add_option("--out", out, "Dataset directory");
    app->add_option("--classes", cfg.num_classes, "Number of classes")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1000}));
    app->add_option("--clips", cfg.train_per_class, "Training videos per class")
        ->check(CLI::PositiveNumber);
    app->add_option("--test-clips", cfg.test_per_class, "Test videos per class")
        ->check(CLI::PositiveNumber);
    app->add_option("--frames", cfg.frames, "Frames per video")->check(CLI::PositiveNumber);
    app->add_option("--latent", cfg.latent, "Latent state width")
        ->check(CLI::PositiveNumber);
    app->add_option("--stay-prob", cfg.stay_prob, "Chance a frame repeats its state")
        ->check(CLI::Range(0.0, 0.999));
    AddListOption(app, "--noise", noise, "Gaussian noise std for low,mid,high");
    AddListOption(app, "--levels", levels, "Levels to write");
    seed_opt = app->add_option("--seed", cfg.seed, "Dataset seed (falls back to $MRRN_SEED)");
  }

  int Run(std::ostream& os) {
    ApplySeedEnv(seed_opt, cfg.seed);
    const auto n = ParseList<double>(noise, "--noise");
    if (n.size() != 3) throw ValidationError("--noise: expected low,mid,high");
    std::copy(n.begin(), n.end(), cfg.noise.begin());
    cfg.levels = ParseLevels(levels, "--levels");
    cfg.Validate();
    const SynthOutput res = WriteSynthDataset(cfg, out);
    os << fmt::format("wrote {} train and {} test videos ({} classes) to {}\n",
                      res.train.entries.size(), res.test.entries.size(), cfg.num_classes,
                      out);
    return kExitOk;
  }
};

// ---- train -----------------------------------------------------------------

struct TrainCmd {
  TrainFlags flags;
  std::string data = "out/synth";
  std::string out;
  bool resume = false;
  bool no_test = false;

  void Add(CLI::App* app) {
    app->add_option("--data", data, "Directory holding train.jsonl and test.jsonl");
    app->add_option("--out", out, "Output directory [out/train_<level>]");
    flags.Add(app, true);
    app->add_flag("--resume", resume, "Continue from <out>/checkpoint.mrrn");
    app->add_flag("--no-test", no_test, "Skip the per-epoch test evaluation");
  }

  int Run(std::ostream& os) {
    ApplySeedEnv(flags.seed_opt, flags.seed);
    const TrainConfig cfg = flags.ToConfig();
    const fs::path dir = OutDir(out, "out/train_" + flags.level);
    const fs::path ckpt = dir / "checkpoint.mrrn";

    const LoadedSplit train = LoadSplit(LoadDataManifest(data, "train"), cfg.level);
    std::optional<LoadedSplit> test;
    if (!no_test && fs::exists(fs::path(data) / "test.jsonl")) {
      test = LoadSplit(LoadDataManifest(data, "test"), cfg.level);
      if (test->classes != train.classes) {
        throw ValidationError("--data: train and test class lists differ");
      }
    }

    TrainState state;
    if (resume) {
      if (!fs::exists(ckpt)) throw ValidationError("--resume: no checkpoint at " + ckpt.string());
      state = LoadCheckpoint(ckpt);
      TrainConfig prior = state.config;
      prior.epochs = cfg.epochs;
      const auto diff = ConfigDiff(prior, cfg);
      if (!diff.empty()) {
        std::string keys;
        for (const auto& k : diff) keys += (keys.empty() ? "" : ", ") + k;
        throw ValidationError("--resume: checkpoint was trained with different " + keys);
      }
      if (state.model.num_classes() != train.classes.size() ||
          state.model.stack.input != train.dim()) {
        throw ValidationError("--resume: checkpoint does not match the dataset shape");
      }
      state.config.epochs = cfg.epochs;
      os << fmt::format("resuming after epoch {}\n", state.epoch);
    } else {
      state = InitTrainState(cfg, train.dim(), train.classes.size());
    }

    os << fmt::format("training {} level: {} videos, backend {}\n", flags.level, train.size(),
                      linalg::BackendName());
    TrainHooks hooks;
    hooks.on_epoch = [&](const TrainState& s) {
      SaveCheckpoint(ckpt, s);
      WriteFileAtomic(dir / "history.csv", HistoryCsv(s.history));
      PrintEpoch(os, s);
    };
    Train(state, train, test ? &*test : nullptr, hooks);
    SaveCheckpoint(ckpt, state);
    WriteFileAtomic(dir / "history.csv", HistoryCsv(state.history));
    WriteFileAtomic(dir / "config.txt", state.config.Serialize());
    os << fmt::format("wrote {} and {}\n", (dir / "history.csv").string(), ckpt.string());
    return kExitOk;
  }
};

// ---- eval ------------------------------------------------------------------

struct EvalCmd {
  std::string checkpoint = "out/train_high/checkpoint.mrrn";
  std::string data = "out/synth";
  std::string split = "test";
  std::string out;
  std::size_t batch = 64;

  void Add(CLI::App* app) {
    app->add_option("--checkpoint", checkpoint, "Checkpoint written by train");
    app->add_option("--data", data, "Directory holding the split manifest");
    app->add_option("--split", split, "Manifest to score")
        ->check(CLI::IsMember({"train", "test"}));
    app->add_option("--out", out, "Output directory [out/eval_<level>]");
    app->add_option("--batch", batch, "Clips per forward pass")->check(CLI::PositiveNumber);
  }

  int Run(std::ostream& os) {
    const TrainState state = LoadCheckpoint(checkpoint);
    const DatasetManifest manifest = LoadDataManifest(data, split);
    if (manifest.num_classes() != state.model.num_classes()) {
      throw ValidationError(fmt::format("--checkpoint: model has {} classes, manifest {}",
                                        state.model.num_classes(), manifest.num_classes()));
    }
    const LoadedSplit s = LoadSplit(manifest, state.config.level);
    const EvalResult r = Evaluate(state.model, s, state.config.clips, batch);
    const fs::path dir = OutDir(out, "out/eval_" + std::string(LevelName(state.config.level)));
    WriteEvaluation(dir, r);
    os << fmt::format("{} {}: accuracy {:.4f} loss {:.4f} over {} videos -> {}\n", r.level,
                      split, r.accuracy, r.loss, r.videos.size(), dir.string());
    return kExitOk;
  }
};

// ---- fuse ------------------------------------------------------------------

struct FuseCmd {
  std::string high = "out/eval_high";
  std::string mid = "out/eval_mid";
  std::string low = "out/eval_low";
  std::string weights = "0.7,0.2,0.1";
  std::string out = "out/fused";

  void Add(CLI::App* app) {
    app->add_option("--high", high, "High-level evaluation directory");
    app->add_option("--mid", mid, "Mid-level evaluation directory");
    app->add_option("--low", low, "Low-level evaluation directory");
    AddListOption(app, "--weights", weights, "Fusion weights for high,mid,low");
    app->add_option("--out", out, "Output directory");
  }

  int Run(std::ostream& os) {
    FusionWeights w;
    try {
      w = FusionWeights::Parse(weights);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string("--weights: ") + e.what());
    }
    const EvalResult h = ReadEvaluation(high), m = ReadEvaluation(mid), l = ReadEvaluation(low);
    const EvalResult fused = FuseEvaluations(h, m, l, w);
    for (const auto& v : fused.videos) {
      if (!v.prediction.OnSimplex()) {
        throw NumericError("fused prediction for '" + v.video_id + "' is not a distribution");
      }
    }
    WriteEvaluation(out, fused);
    std::string summary = "level,accuracy\n";
    for (const EvalResult* r : {&h, &m, &l, &fused}) {
      summary += fmt::format("{},{}\n", r->level, r->accuracy);
      os << fmt::format("{:<6} accuracy {:.4f}\n", r->level, r->accuracy);
    }
    WriteFileAtomic(fs::path(out) / "fusion.csv", summary);
    return kExitOk;
  }
};

// ---- sweep -----------------------------------------------------------------

struct SweepCmd {
  TrainFlags flags;
  std::string data = "out/synth";
  std::string out = "out/sweep";
  std::string grid = "capacity";
  std::string hidden = "256,512,1024";
  std::string layers = "3,4,5";
  std::string pool = "mean";
  std::string levels = "low,mid,high";
  std::size_t pool_hidden = 1024;
  std::size_t pool_layers = 3;

  void Add(CLI::App* app) {
    app->add_option("--data", data, "Directory holding train.jsonl and test.jsonl");
    app->add_option("--out", out, "Output directory");
    app->add_option("--grid", grid, "capacity: hidden x layers; pooling: level x pool")
        ->check(CLI::IsMember({"capacity", "pooling"}));
    AddListOption(app, "--hidden", hidden, "Hidden sizes of the capacity grid");
    AddListOption(app, "--layers", layers, "Layer counts of the capacity grid");
    app->add_option("--pool", pool, "Pooling of the capacity grid")
        ->check(CLI::IsMember(kPoolNames));
    AddListOption(app, "--levels", levels, "Levels of the pooling grid");
    app->add_option("--pool-hidden", pool_hidden, "Hidden size of the pooling grid")
        ->check(CLI::PositiveNumber);
    app->add_option("--pool-layers", pool_layers, "Layer count of the pooling grid")
        ->check(CLI::PositiveNumber);
    flags.Add(app, false);
  }

  int Run(std::ostream& os) {
    ApplySeedEnv(flags.seed_opt, flags.seed);
    flags.pool = pool;
    TrainConfig base = flags.ToConfig();
    auto progress = [&](const SweepRow& r) {
      os << fmt::format("hidden {} layers {} level {} pool {}: {}\n", r.hidden, r.layers,
                        LevelName(r.level), PoolingName(r.pool),
                        r.accuracy ? fmt::format("{:.4f}", *r.accuracy) : "failed: " + r.error);
      os.flush();
    };
    std::vector<SweepRow> rows;
    std::string table;
    fs::path table_path;
    if (grid == "capacity") {
      const auto hs = ParseList<std::size_t>(hidden, "--hidden");
      const auto ls = ParseList<std::size_t>(layers, "--layers");
      const DatasetManifest train_m = LoadDataManifest(data, "train");
      const DatasetManifest test_m = LoadDataManifest(data, "test");
      const LoadedSplit train = LoadSplit(train_m, base.level);
      const LoadedSplit test = LoadSplit(test_m, base.level);
      rows = SweepCapacity(base, train, test, hs, ls, progress);
      table = CapacityCsv(rows);
      table_path = fs::path(out) / "capacity.csv";
    } else {
      base.hidden = pool_hidden;
      base.layers = pool_layers;
      std::map<Level, LevelData> by_level;
      for (Level level : ParseLevels(levels, "--levels")) {
        by_level[level] = {LoadSplit(LoadDataManifest(data, "train"), level),
                           LoadSplit(LoadDataManifest(data, "test"), level)};
      }
      rows = SweepPooling(base, by_level, progress);
      table = PoolingCsv(rows);
      table_path = fs::path(out) / "pooling.csv";
    }
    WriteFileAtomic(table_path, table);
    const std::string errors = SweepErrors(rows);
    const fs::path errors_path = fs::path(out) / (grid + "_errors.txt");
    if (!errors.empty()) {
      WriteFileAtomic(errors_path, errors);
    } else {
      fs::remove(errors_path);
    }
    os << table;
    return kExitOk;
  }
};

// ---- complexity ------------------------------------------------------------

struct ComplexityCmd {
  std::vector<std::string> archs;
  std::string out = "out/complexity";

  void Add(CLI::App* app) {
    app->add_option("--arch", archs,
                    "Architecture files; bare names (with or without .arch) also "
                    "resolve against the bundled data/arch directory")
        ->required();
    app->add_option("--out", out, "Output directory");
  }

  // Tries the name as given, then with ".arch", then both in the bundled
  // directory.
  static fs::path Resolve(const std::string& name) {
    std::vector<fs::path> candidates = {name};
    if (fs::path(name).extension() != ".arch") candidates.push_back(name + ".arch");
#ifdef MRRN_ARCH_DIR
    if (fs::path(name).is_relative()) {
      const std::size_t n = candidates.size();
      for (std::size_t i = 0; i < n; ++i) {
        candidates.push_back(fs::path(MRRN_ARCH_DIR) / candidates[i]);
      }
    }
#endif
    for (const auto& c : candidates) {
      if (fs::is_regular_file(c)) return c;
    }
    throw IoError("--arch: no such file " + name);
  }

  int Run(std::ostream& os) {
    std::vector<ArchDescription> loaded;
    for (const auto& a : archs) loaded.push_back(LoadArch(Resolve(a)));
    const std::string csv = ComplexityReport(loaded);
    WriteFileAtomic(fs::path(out) / "complexity.csv", csv);
    os << csv;
    return kExitOk;
  }
};

// ---- bench -----------------------------------------------------------------

struct BenchCmd {
  BenchConfig cfg;
  std::string cell = "both";
  std::string out = "out/bench";
  CLI::Option* seed_opt = nullptr;

  void Add(CLI::App* app) {
    app->add_option("--cell", cell, "Cell to time")->check(CLI::IsMember({"sru", "lstm", "both"}));
    app->add_option("--steps", cfg.steps, "Sequence length T")->check(CLI::PositiveNumber);
    app->add_option("--batch", cfg.batch, "Batch size")->check(CLI::PositiveNumber);
    app->add_option("--hidden", cfg.hidden, "Hidden units")->check(CLI::PositiveNumber);
    app->add_option("--repeats", cfg.repeats, "Timed repeats")->check(CLI::PositiveNumber);
    app->add_option("--warmup", cfg.warmup, "Untimed warm-up runs");
    seed_opt = app->add_option("--seed", cfg.seed, "Input and weight seed (falls back to $MRRN_SEED)");
    app->add_option("--out", out, "Output directory");
  }

  int Run(std::ostream& os) {
    ApplySeedEnv(seed_opt, cfg.seed);
    std::vector<CellKind> cells;
    if (cell != "lstm") cells.push_back(CellKind::kSru);
    if (cell != "sru") cells.push_back(CellKind::kLstm);
    std::string csv = std::string(kBenchCsvHeader) + "\n";
    for (CellKind k : cells) {
      BenchConfig c = cfg;
      c.cell = k;
      const BenchResult r = ThroughputBench(c);
      csv += BenchCsvRow(r) + "\n";
      os << fmt::format("{:<4} median {:.3f} ms, {:.0f} steps/s\n", CellKindName(k),
                        r.median_ms, r.steps_per_s);
    }
    WriteFileAtomic(fs::path(out) / "bench.csv", csv);
    return kExitOk;
  }
};

// ---- gradcheck -------------------------------------------------------------

struct GradCheckCmd {
  GradSuiteOptions opts;
  std::string out = "out/gradcheck";
  CLI::Option* seed_opt = nullptr;

  void Add(CLI::App* app) {
    app->add_option("--trials", opts.trials, "Random draws per operation")
        ->check(CLI::PositiveNumber);
    app->add_option("--max-dim", opts.max_dim, "Largest batch, input, hidden or class count")
        ->check(CLI::Range(std::size_t{2}, std::size_t{64}));
    app->add_option("--max-steps", opts.max_steps, "Longest sequence")
        ->check(CLI::PositiveNumber);
    app->add_option("--eps", opts.eps, "Central-difference step")->check(CLI::Range(1e-5, 1e-2));
    app->add_option("--tol", opts.tol, "Relative error tolerance")->check(CLI::PositiveNumber);
    seed_opt = app->add_option("--seed", opts.seed, "Draw seed (falls back to $MRRN_SEED)");
    app->add_option("--out", out, "Output directory");
  }

  int Run(std::ostream& os) {
    ApplySeedEnv(seed_opt, opts.seed);
    const auto cases = RunGradSuite(opts);
    WriteFileAtomic(fs::path(out) / "gradcheck.csv", GradSuiteCsv(cases));
    std::size_t failed = 0;
    for (const auto& c : cases) {
      os << fmt::format("{:<18} trial {} {:<36} max rel error {:.2e} {}\n", c.op, c.trial,
                        c.dims, c.report.max_rel_error, c.report.pass ? "ok" : "FAIL");
      failed += c.report.pass ? 0 : 1;
    }
    if (failed > 0) {
      throw Error(fmt::format("gradcheck: {} of {} cases exceed --tol {}", failed, cases.size(),
                              opts.tol));
    }
    return kExitOk;
  }
};

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Residual recurrent networks over frame features", "mrrn");
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file with one [section] per subcommand");
  app.allow_config_extras(CLI::config_extras_mode::error);

  SynthCmd synth;
  TrainCmd train;
  EvalCmd eval;
  FuseCmd fuse;
  SweepCmd sweep;
  ComplexityCmd complexity;
  BenchCmd bench;
  GradCheckCmd gradcheck;
  std::vector<std::pair<CLI::App*, std::function<int(std::ostream&)>>> commands;
  auto add = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    cmd.Add(sub);
    commands.emplace_back(sub, [&cmd](std::ostream& os) { return cmd.Run(os); });
  };
  add("synth", "Write a seeded synthetic dataset", synth);
  add("train", "Train one level's model", train);
  add("eval", "Score a checkpoint on a split", eval);
  add("fuse", "Fuse three per-level evaluations", fuse);
  add("sweep", "Train over a grid of configurations", sweep);
  add("complexity", "Count MACs and parameters of architectures", complexity);
  add("bench", "Time recurrent layers", bench);
  add("gradcheck", "Check gradients against finite differences", gradcheck);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  for (auto& [sub, run] : commands) {
    if (!sub->parsed()) continue;
    try {
      return run(out);
    } catch (const ValidationError& e) {
      err << "error: " << e.what() << "\n";
      return kExitValidation;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  return kExitValidation;
}

}  // namespace mrrn::cli
