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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <cstdio>
#include <cstring>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "mrrn/clips.hpp"
#include "mrrn/error.hpp"
#include "mrrn/features.hpp"
#include "mrrn/io.hpp"
#include "mrrn/manifest.hpp"
#include "mrrn/preprocess.hpp"
#include "mrrn/synth.hpp"

namespace mrrn {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("mrrn_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Tensor RandomFrames(std::size_t t, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> n;
  Tensor x({t, d});
  for (float& v : x.data()) v = n(rng);
  return x;
}

std::vector<std::size_t> Iota(std::size_t begin, std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), begin);
  return v;
}

// ---- clips -----------------------------------------------------------------

TEST(SplitClips, ThirtyFramesGiveOneClip) {
  auto clips = SplitClips(30);
  ASSERT_EQ(clips.size(), 1u);
  EXPECT_EQ(clips[0].frames, Iota(0, 30));
}

TEST(SplitClips, FortySixFramesStartAtZeroEightSixteen) {
  auto clips = SplitClips(46);
  ASSERT_EQ(clips.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(clips[i].frames, Iota(8 * i, 30));
}

TEST(SplitClips, ShortVideoLoops) {
  auto clips = SplitClips(20, {}, "v");
  ASSERT_EQ(clips.size(), 1u);
  std::vector<std::size_t> want = Iota(0, 20);
  for (std::size_t i = 0; i < 10; ++i) want.push_back(i);
  EXPECT_EQ(clips[0].frames, want);
  EXPECT_EQ(clips[0].video_id, "v");
}

TEST(SplitClips, LongVideoCappedAtTwenty) {
  EXPECT_EQ(ExpectedClipCount(200), 20u);
  EXPECT_EQ(SplitClips(200).size(), 20u);
  EXPECT_EQ(SplitClips(200).back().frames.front(), 19u * 8);
}

TEST(SplitClips, ZeroFramesRejected) {
  EXPECT_THROW(SplitClips(0), ValidationError);
  EXPECT_THROW(SplitClips(10, {0, 8, 20}), ValidationError);
}

TEST(SplitClips, ClosedFormCountForEveryLengthUpTo400) {
  for (std::size_t n = 1; n <= 400; ++n) {
    const std::size_t want =
        n < 30 ? 1 : std::min<std::size_t>(20, std::max<std::size_t>(1, (n - 30) / 8 + 1));
    const auto clips = SplitClips(n);
    ASSERT_EQ(clips.size(), want) << n;
    ASSERT_EQ(ExpectedClipCount(n), want) << n;
    for (const auto& c : clips) {
      ASSERT_EQ(c.frames.size(), 30u);
      for (std::size_t f : c.frames) ASSERT_LT(f, n);
    }
  }
}

TEST(SplitClips, CustomProtocol) {
  ClipProtocol p{4, 3, 2};
  auto clips = SplitClips(20, p);
  ASSERT_EQ(clips.size(), 2u);
  EXPECT_EQ(clips[1].frames, Iota(3, 4));
}

// ---- preprocess ------------------------------------------------------------

TEST(SpatialAverage, OneByOneCopiesChannels) {
  Tensor a = Tensor::FromList({3, 1, 1}, {1, -2, 5});
  EXPECT_EQ(SpatialAverage(a), Tensor::FromList({3}, {1, -2, 5}));
}

TEST(SpatialAverage, TwoByTwoPlane) {
  Tensor a = Tensor::FromList({1, 2, 2}, {1, 2, 3, 4});
  EXPECT_FLOAT_EQ(SpatialAverage(a)[0], 2.5f);
}

TEST(SpatialAverage, ConstantTensor) {
  Tensor a = Tensor::Full({4, 7, 7}, 0.3f);
  const Tensor avg = SpatialAverage(a);
  for (float v : avg.data()) EXPECT_FLOAT_EQ(v, 0.3f);
}

TEST(SpatialAverage, IsLinear) {
  Tensor a = RandomFrames(256, 14 * 14, 1).Reshaped({256, 14, 14});
  Tensor b = RandomFrames(256, 14 * 14, 2).Reshaped({256, 14, 14});
  Tensor sum = a;
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += b[i];
  const Tensor sa = SpatialAverage(a), sb = SpatialAverage(b), ss = SpatialAverage(sum);
  for (std::size_t c = 0; c < 256; ++c) EXPECT_NEAR(ss[c], sa[c] + sb[c], 1e-6);
}

TEST(SpatialAverage, RejectsNonCHW) {
  EXPECT_THROW(SpatialAverage(Tensor({3, 4})), ShapeError);
}

TEST(Normalize, ImageNetConstants) {
  Tensor f = Tensor::Full({3, 2, 2}, 0.485f);
  Tensor n = NormalizeFrame(f, kImageNetMean, kImageNetStd);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(n[i], 0.f, 1e-7);
  Tensor ones = Tensor::Full({3, 1, 1}, 1.0f);
  EXPECT_NEAR(NormalizeFrame(ones, kImageNetMean, kImageNetStd)[2], (1 - 0.406) / 0.225, 1e-5);
  EXPECT_NEAR(NormalizeFrame(ones, kImageNetMean, kImageNetStd)[2], 2.64, 5e-3);
}

TEST(Normalize, UnitStatisticsAreIdentity) {
  Tensor f = Tensor::FromList({2, 1, 2}, {0.1f, 0.9f, 0.5f, 0.0f});
  const std::array<float, 2> zero = {0, 0}, one = {1, 1};
  EXPECT_EQ(NormalizeFrame(f, zero, one), f);
}

TEST(Normalize, RejectsZeroStdAndOutOfRange) {
  Tensor f = Tensor::Full({3, 2, 2}, 0.5f);
  const std::array<float, 3> bad = {0.2f, 0.f, 0.2f};
  EXPECT_THROW(NormalizeFrame(f, kImageNetMean, bad), ValidationError);
  EXPECT_THROW(NormalizeFrame(Tensor::Full({3, 1, 1}, 1.5f), kImageNetMean, kImageNetStd),
               ValidationError);
}

Tensor Ramp(std::size_t c, std::size_t h, std::size_t w) {
  Tensor f({c, h, w});
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<float>(i % 1000) / 1000.f;
  return f;
}

TEST(CropFlip, CenterCropOffset) {
  auto r = CropFlip(Ramp(3, 256, 256), CropMode::kTest, 0);
  EXPECT_EQ(r.top, 16u);
  EXPECT_EQ(r.left, 16u);
  EXPECT_FALSE(r.flipped);
  EXPECT_EQ(r.frame.shape(), (Shape{3, 224, 224}));
  EXPECT_EQ(r.frame.at(0, 0), Ramp(3, 256, 256)[16 * 256 + 16]);
}

TEST(CropFlip, TrainModeDeterministicPerSeed) {
  Tensor f = Ramp(3, 256, 300);
  auto a = CropFlip(f, CropMode::kTrain, 5), b = CropFlip(f, CropMode::kTrain, 5);
  EXPECT_EQ(a.frame, b.frame);
  EXPECT_EQ(a.top, b.top);
  EXPECT_EQ(a.left, b.left);
  std::set<std::pair<std::size_t, std::size_t>> offsets;
  std::size_t flips = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto r = CropFlip(f, CropMode::kTrain, s);
    EXPECT_LE(r.top, 32u);
    EXPECT_LE(r.left, 76u);
    offsets.insert({r.top, r.left});
    flips += r.flipped;
  }
  EXPECT_GT(offsets.size(), 100u);
  EXPECT_GT(flips, 60u);
  EXPECT_LT(flips, 140u);
}

TEST(CropFlip, ForcedFlipTwiceRestoresCrop) {
  Tensor f = Ramp(3, 256, 256);
  CropOptions force;
  force.force_flip = true;
  auto flipped = CropFlip(f, CropMode::kTrain, 3, force);
  CropOptions keep;
  keep.force_flip = false;
  auto plain = CropFlip(f, CropMode::kTrain, 3, keep);
  EXPECT_TRUE(flipped.flipped);
  EXPECT_NE(flipped.frame, plain.frame);
  EXPECT_EQ(HorizontalFlip(flipped.frame), plain.frame);
  EXPECT_EQ(HorizontalFlip(HorizontalFlip(plain.frame)), plain.frame);
}

TEST(CropFlip, UndersizedRejected) {
  EXPECT_THROW(CropFlip(Ramp(3, 200, 256), CropMode::kTest, 0), ValidationError);
}

// ---- feature files ---------------------------------------------------------

TEST(FeatureFile, RoundTripIsBitwiseForEveryLevel) {
  const fs::path dir = TempDir("features");
  for (Level level : kAllLevels) {
    FeatureSequence seq{level, RandomFrames(30, LevelDim(level), 3)};
    seq.frames[7] = -0.0f;
    seq.frames[8] = std::numeric_limits<float>::denorm_min();
    const fs::path p = dir / (std::string(LevelName(level)) + ".mrrn");
    WriteFeatures(p, seq);
    const FeatureSequence back = ReadFeatures(p);
    EXPECT_EQ(back.level, level);
    ASSERT_EQ(back.frames.shape(), seq.frames.shape());
    EXPECT_EQ(std::memcmp(back.frames.data().data(), seq.frames.data().data(),
                          seq.frames.size() * 4),
              0);
    EXPECT_EQ(EncodeFeatures(back), EncodeFeatures(seq));
    EXPECT_EQ(fs::file_size(p), kFeatureHeaderBytes + 30 * LevelDim(level) * 4);
  }
  fs::remove_all(dir);
}

TEST(FeatureFile, HeaderLayout) {
  FeatureSequence seq{Level::kMid, RandomFrames(2, 256, 1)};
  const auto bytes = EncodeFeatures(seq);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "MRRN");
  EXPECT_EQ(bytes[4] | (bytes[5] << 8), 1);
  EXPECT_EQ(bytes[6], 1);
  EXPECT_EQ(bytes[7], 0);
  EXPECT_EQ(bytes[8], 2);
  EXPECT_EQ(bytes[12] | (bytes[13] << 8), 256);
}

std::string DecodeError(std::vector<std::uint8_t> bytes) {
  try {
    DecodeFeatures(bytes, "f.mrrn");
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

TEST(FeatureFile, CorruptionsRejectedWithOffsets) {
  const auto good = EncodeFeatures({Level::kLow, RandomFrames(3, 128, 2)});
  auto bad_magic = good;
  bad_magic[1] = 'X';
  EXPECT_NE(DecodeError(bad_magic).find("byte 0: bad magic"), std::string::npos);
  auto bad_version = good;
  bad_version[4] = 9;
  EXPECT_NE(DecodeError(bad_version).find("byte 4: unsupported version 9"), std::string::npos);
  auto bad_level = good;
  bad_level[6] = 1;  // mid needs 256 wide
  EXPECT_NE(DecodeError(bad_level).find("byte 12: dim 128 does not match mid"),
            std::string::npos)
      << DecodeError(bad_level);
  bad_level[6] = 7;
  EXPECT_NE(DecodeError(bad_level).find("byte 6: bad level"), std::string::npos);
  auto reserved = good;
  reserved[7] = 1;
  EXPECT_NE(DecodeError(reserved).find("byte 7"), std::string::npos);

  auto truncated = good;
  truncated.resize(good.size() - 5);
  const std::string t = DecodeError(truncated);
  EXPECT_NE(t.find("expected " + std::to_string(good.size()) + " bytes, actual " +
                   std::to_string(good.size() - 5)),
            std::string::npos)
      << t;
  auto trailing = good;
  trailing.push_back(0);
  EXPECT_NE(DecodeError(trailing).find("trailing"), std::string::npos);
  EXPECT_NE(DecodeError({'M', 'R'}).find("truncated header"), std::string::npos);

  auto nan = good;
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + kFeatureHeaderBytes + 8, &q, 4);
  EXPECT_NE(DecodeError(nan).find("non-finite"), std::string::npos);
}

TEST(FeatureFile, LevelWidthMismatchRejectedOnWrite) {
  FeatureSequence seq{Level::kHigh, RandomFrames(3, 256, 1)};
  EXPECT_THROW(EncodeFeatures(seq), ShapeError);
}

TEST(FeatureFile, MissingFileIsIoError) {
  EXPECT_THROW(ReadFeatures("/nonexistent/x.mrrn"), IoError);
}

TEST(Levels, NamesAndWidths) {
  EXPECT_EQ(LevelDim(Level::kLow), 128u);
  EXPECT_EQ(LevelDim(Level::kMid), 256u);
  EXPECT_EQ(LevelDim(Level::kHigh), 512u);
  for (Level l : kAllLevels) EXPECT_EQ(ParseLevel(LevelName(l)), l);
  EXPECT_THROW(ParseLevel("top"), ValidationError);
}

// ---- manifest --------------------------------------------------------------

TEST(Manifest, SaveLoadRoundTrip) {
  const fs::path dir = TempDir("manifest");
  DatasetManifest m;
  m.classes = {"walk", "run"};
  m.entries.push_back({"a", 0, 40, {{Level::kHigh, "f/a.high.mrrn"}}});
  m.entries.push_back({"b", 1, 12, {{Level::kHigh, "f/b.high.mrrn"}, {Level::kLow, "f/b.low"}}});
  SaveManifest(dir / "train.jsonl", m);
  const DatasetManifest back = LoadManifest(dir / "train.jsonl");
  EXPECT_EQ(back.classes, m.classes);
  ASSERT_EQ(back.entries.size(), 2u);
  EXPECT_EQ(back.entries[1].video_id, "b");
  EXPECT_EQ(back.entries[1].num_frames, 12u);
  EXPECT_EQ(back.entries[1].paths.at(Level::kLow), "f/b.low");
  EXPECT_EQ(back.FeaturePath(back.entries[0], Level::kHigh), dir / "f/a.high.mrrn");
  fs::remove_all(dir);
}

TEST(Manifest, ErrorsNameTheLine) {
  const fs::path dir = TempDir("manifest_bad");
  WriteFileAtomic(dir / "classes.txt", std::string("x\ny\n"));
  WriteFileAtomic(dir / "m.jsonl",
                  std::string("{\"video_id\":\"a\",\"label\":0,\"num_frames\":3,\"paths\":{}}\n"
                              "{\"video_id\":\"b\",\"label\":5,\"num_frames\":3,\"paths\":{}}\n"));
  try {
    LoadManifest(dir / "m.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("label"), std::string::npos) << e.what();
  }
  WriteFileAtomic(dir / "m.jsonl", std::string("{\"video_id\":\"a\",\"label\":0,\"num_frames\":3,"
                                               "\"paths\":{}}\n{oops\n"));
  try {
    LoadManifest(dir / "m.jsonl");
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  fs::remove_all(dir);
}

TEST(Manifest, DuplicateIdsRejected) {
  DatasetManifest m;
  m.classes = {"a", "b"};
  m.entries = {{"v", 0, 3, {}}, {"v", 1, 3, {}}};
  EXPECT_THROW(m.Validate(), ValidationError);
}

TEST(Manifest, MissingFeatureFilesListedExhaustively) {
  const fs::path dir = TempDir("manifest_missing");
  DatasetManifest m;
  m.root = dir;
  m.classes = {"a", "b"};
  for (int i = 0; i < 3; ++i) {
    m.entries.push_back({"v" + std::to_string(i), 0, 3,
                         {{Level::kHigh, "v" + std::to_string(i) + ".mrrn"}}});
  }
  WriteFeatures(dir / "v1.mrrn", {Level::kHigh, RandomFrames(3, 512, 1)});
  try {
    RequireFeatureFiles(m, Level::kHigh);
    FAIL();
  } catch (const IoError& e) {
    const std::string w = e.what();
    EXPECT_NE(w.find("v0.mrrn"), std::string::npos) << w;
    EXPECT_NE(w.find("v2.mrrn"), std::string::npos) << w;
    EXPECT_EQ(w.find("v1.mrrn"), std::string::npos) << w;
  }
  fs::remove_all(dir);
}

// ---- synthetic data --------------------------------------------------------

SynthConfig SmallSynth() {
  SynthConfig c;
  c.train_per_class = 6;
  c.test_per_class = 2;
  c.frames = 12;
  return c;
}

std::vector<std::uint8_t> Slurp(const fs::path& p) { return ReadFileBytes(p); }

TEST(Synth, SameSeedSameFiles) {
  const fs::path a = TempDir("synth_a"), b = TempDir("synth_b");
  WriteSynthDataset(SmallSynth(), a);
  WriteSynthDataset(SmallSynth(), b);
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a);
    ASSERT_TRUE(fs::exists(b / rel)) << rel;
    EXPECT_EQ(Slurp(e.path()), Slurp(b / rel)) << rel;
    ++files;
  }
  // Two manifests, classes.txt, and one file per video per level.
  EXPECT_EQ(files, 3u + 5 * (6 + 2) * 3);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Synth, DifferentSeedsDiffer) {
  SynthConfig a = SmallSynth(), b = SmallSynth();
  b.seed = 8;
  EXPECT_NE(SynthSplit(a, Split::kTrain, Level::kHigh).sequences[0],
            SynthSplit(b, Split::kTrain, Level::kHigh).sequences[0]);
}

TEST(Synth, FilesMatchInMemorySplit) {
  const fs::path dir = TempDir("synth_mem");
  const SynthConfig c = SmallSynth();
  const SynthOutput out = WriteSynthDataset(c, dir);
  const InMemorySplit mem = SynthSplit(c, Split::kTest, Level::kMid);
  ASSERT_EQ(out.test.entries.size(), mem.sequences.size());
  for (std::size_t i = 0; i < mem.sequences.size(); ++i) {
    const auto& e = out.test.entries[i];
    EXPECT_EQ(e.label, mem.labels[i]);
    EXPECT_EQ(ReadFeatures(out.test.FeaturePath(e, Level::kMid)).frames, mem.sequences[i]);
  }
  EXPECT_EQ(LoadManifest(out.train_manifest).classes.size(), 5u);
  fs::remove_all(dir);
}

TEST(Synth, NoiselessClassesDiffer) {
  SynthConfig c = SmallSynth();
  c.noise = {0, 0, 0};
  const auto v0 = SynthStates(c, Split::kTrain, 0, 0);
  const auto v1 = SynthStates(c, Split::kTrain, 1, 0);
  EXPECT_NE(SynthFeatures(c, v0, Level::kHigh, 1).frames,
            SynthFeatures(c, v1, Level::kHigh, 1).frames);
}

TEST(Synth, EveryClassVisitsStatesUniformly) {
  // Each class's cycle covers all states, so state counts alone carry no
  // label information.
  SynthConfig c;
  c.frames = 7 * 4;
  ASSERT_EQ(c.num_states(), 7u);
  for (std::size_t k = 0; k < c.num_classes; ++k) {
    const auto v = SynthStates(c, Split::kTrain, k, 3);
    std::vector<int> counts(7, 0);
    for (std::size_t s : v.states) ++counts[s];
    for (int n : counts) EXPECT_EQ(n, 4) << "class " << k;
    for (std::size_t t = 1; t < v.states.size(); ++t) {
      EXPECT_EQ(v.states[t], (v.states[t - 1] + k + 1) % 7);
    }
  }
}

TEST(Synth, ValidationRejectsBadConfigs) {
  SynthConfig c;
  c.num_classes = 1;
  EXPECT_THROW(c.Validate(), ValidationError);
  c = {};
  c.noise[1] = -1;
  EXPECT_THROW(c.Validate(), ValidationError);
  c = {};
  c.levels.clear();
  EXPECT_THROW(c.Validate(), ValidationError);
}

// Multinomial logistic regression by full-batch gradient descent on
// standardized features. Returns test accuracy.
double ProbeAccuracy(const std::vector<std::vector<double>>& train,
                     const std::vector<std::size_t>& ytrain,
                     const std::vector<std::vector<double>>& test,
                     const std::vector<std::size_t>& ytest, std::size_t classes) {
  const std::size_t d = train[0].size(), n = train.size();
  std::vector<double> mean(d, 0), sd(d, 0);
  for (const auto& x : train)
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[j] / n;
  for (const auto& x : train)
    for (std::size_t j = 0; j < d; ++j) sd[j] += (x[j] - mean[j]) * (x[j] - mean[j]) / n;
  for (double& s : sd) s = std::sqrt(s) + 1e-9;
  auto standardize = [&](std::vector<std::vector<double>> xs) {
    for (auto& x : xs)
      for (std::size_t j = 0; j < d; ++j) x[j] = (x[j] - mean[j]) / sd[j];
    return xs;
  };
  const auto xs = standardize(train), xt = standardize(test);
  std::vector<double> w(d * classes, 0), b(classes, 0);
  auto logits = [&](const std::vector<double>& x) {
    std::vector<double> z(b);
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < classes; ++k) z[k] += x[j] * w[j * classes + k];
    return z;
  };
  const double lr = 0.5, l2 = 1e-3;
  for (int it = 0; it < 300; ++it) {
    std::vector<double> gw(d * classes, 0), gb(classes, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto z = logits(xs[i]);
      const double m = *std::max_element(z.begin(), z.end());
      double s = 0;
      for (double& v : z) s += (v = std::exp(v - m));
      for (std::size_t k = 0; k < classes; ++k) {
        const double g = z[k] / s - (k == ytrain[i]);
        gb[k] += g / n;
        for (std::size_t j = 0; j < d; ++j) gw[j * classes + k] += g * xs[i][j] / n;
      }
    }
    for (std::size_t q = 0; q < w.size(); ++q) w[q] -= lr * (gw[q] + l2 * w[q]);
    for (std::size_t k = 0; k < classes; ++k) b[k] -= lr * gb[k];
  }
  std::size_t correct = 0;
  for (std::size_t i = 0; i < xt.size(); ++i) {
    const auto z = logits(xt[i]);
    correct += static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin()) ==
               ytest[i];
  }
  return static_cast<double>(correct) / xt.size();
}

std::vector<double> MeanFeature(const Tensor& x) {
  const std::size_t t = x.dim(0), d = x.dim(1);
  std::vector<double> f(d, 0);
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < d; ++j) f[j] += x.at(i, j) / t;
  return f;
}

// Mean frame plus the mean of elementwise products of consecutive frames.
std::vector<double> LagFeature(const Tensor& x) {
  const std::size_t t = x.dim(0), d = x.dim(1);
  std::vector<double> f = MeanFeature(x);
  f.resize(2 * d, 0);
  for (std::size_t i = 0; i + 1 < t; ++i)
    for (std::size_t j = 0; j < d; ++j) f[d + j] += x.at(i, j) * x.at(i + 1, j) / (t - 1);
  return f;
}

InMemorySplit Shuffled(InMemorySplit s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (Tensor& x : s.sequences) {
    const std::size_t t = x.dim(0), d = x.dim(1);
    std::vector<std::size_t> perm(t);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Tensor y({t, d});
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = 0; j < d; ++j) y.at(i, j) = x.at(perm[i], j);
    x = y;
  }
  return s;
}

TEST(Synth, ShufflingFramesDestroysTheOrderSignal) {
  SynthConfig c;
  c.train_per_class = 120;
  c.test_per_class = 60;
  const auto train = SynthSplit(c, Split::kTrain, Level::kHigh);
  const auto test = SynthSplit(c, Split::kTest, Level::kHigh);
  const auto strain = Shuffled(train, 1), stest = Shuffled(test, 2);
  auto feats = [](const InMemorySplit& s, auto fn) {
    std::vector<std::vector<double>> out;
    for (const auto& x : s.sequences) out.push_back(fn(x));
    return out;
  };

  // Mean pooling cannot see order at all: the pooled features are the same
  // for ordered and shuffled frames, and they sit near chance.
  const auto mtrain = feats(train, MeanFeature), mstrain = feats(strain, MeanFeature);
  for (std::size_t i = 0; i < mtrain.size(); ++i) {
    for (std::size_t j = 0; j < mtrain[i].size(); ++j) {
      ASSERT_NEAR(mtrain[i][j], mstrain[i][j], 1e-9);
    }
  }
  const double mean_acc =
      ProbeAccuracy(mtrain, train.labels, feats(test, MeanFeature), test.labels, 5);
  EXPECT_LT(mean_acc, 0.35);

  // A probe that sees consecutive frames beats chance on ordered data and
  // falls back to chance once the frames are shuffled.
  const double ordered =
      ProbeAccuracy(feats(train, LagFeature), train.labels, feats(test, LagFeature),
                    test.labels, 5);
  const double shuffled =
      ProbeAccuracy(feats(strain, LagFeature), strain.labels, feats(stest, LagFeature),
                    stest.labels, 5);
  EXPECT_GT(ordered, 0.45);
  EXPECT_LT(shuffled, 0.35);
  EXPECT_GT(ordered - shuffled, 0.15);
  RecordProperty("mean_probe", std::to_string(mean_acc));
  RecordProperty("lag_probe_ordered", std::to_string(ordered));
  RecordProperty("lag_probe_shuffled", std::to_string(shuffled));
  std::printf("probe accuracy: mean %.3f, lag ordered %.3f, lag shuffled %.3f\n", mean_acc,
              ordered, shuffled);
}

// ---- byte io ---------------------------------------------------------------

TEST(ByteIo, TruncationReportsCounts) {
  ByteWriter w;
  w.U32(7);
  ByteReader r(w.bytes(), "buf");
  r.U16();
  try {
    r.U32();
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.offset(), 2u);
    EXPECT_NE(std::string(e.what()).find("expected 4 more bytes, 2 available"),
              std::string::npos)
        << e.what();
  }
}

TEST(ByteIo, AtomicWriteLeavesNoTemporary) {
  const fs::path dir = TempDir("atomic");
  WriteFileAtomic(dir / "sub" / "x.txt", std::string("hello"));
  EXPECT_EQ(ReadFileText(dir / "sub" / "x.txt"), "hello");
  EXPECT_FALSE(fs::exists(dir / "sub" / "x.txt.tmp"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace mrrn
