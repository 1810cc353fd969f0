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

#include <filesystem>
#include <fstream>

#include "mrrn/complexity.hpp"
#include "mrrn/error.hpp"

namespace mrrn {
namespace {

ArchDescription Conv(std::uint64_t m, std::uint64_t k, std::uint64_t ci, std::uint64_t co,
                     std::uint64_t repeat = 1) {
  ArchDescription a;
  a.name = "x";
  a.convs.push_back({m, k, ci, co, repeat});
  return a;
}

ArchDescription Resnet34() { return LoadArch(MRRN_ARCH_DIR "/resnet34.arch"); }

TEST(Complexity, WorkedExamples) {
  EXPECT_EQ(TimeComplexity(Conv(28, 3, 3, 8)), u128{169344});
  EXPECT_EQ(SpaceComplexity(Conv(28, 3, 3, 8)), u128{216});
  EXPECT_EQ(TimeComplexity(Conv(112, 7, 3, 64)), u128{118013952});
  EXPECT_EQ(SpaceComplexity(Conv(112, 7, 3, 64)), u128{9408});
}

TEST(Complexity, UnitLayers) {
  EXPECT_EQ(TimeComplexity(Conv(1, 1, 1, 1)), u128{1});
  EXPECT_EQ(SpaceComplexity(Conv(1, 1, 1, 1)), u128{1});
  EXPECT_EQ(TimeComplexity(Conv(5, 1, 1, 1)), u128{25});
  EXPECT_EQ(SpaceComplexity(Conv(5, 1, 1, 1)), u128{1});
}

TEST(Complexity, Resnet34Totals) {
  const ArchDescription a = Resnet34();
  EXPECT_EQ(a.name, "resnet34");
  EXPECT_EQ(SpaceComplexity(a), u128{21267648});
  EXPECT_EQ(TimeComplexity(a), u128{3663249408ULL});
}

TEST(Complexity, Resnet34PerStage) {
  // conv1, then stages 1..4 including their 1x1 shortcuts.
  const ArchDescription a = Resnet34();
  ASSERT_EQ(a.convs.size(), 11u);
  auto time = [&](std::size_t b, std::size_t e) {
    u128 t = 0;
    for (std::size_t i = b; i < e; ++i) t += ConvTime(a.convs[i]);
    return t;
  };
  EXPECT_EQ(time(0, 1), u128{118013952});
  EXPECT_EQ(time(1, 2), u128{693633024});
  EXPECT_EQ(time(2, 5), u128{873463808});
  EXPECT_EQ(time(5, 8), u128{1335885824});
  EXPECT_EQ(time(8, 11), u128{642252800});
}

TEST(Complexity, AdditiveOverLayers) {
  const ArchDescription a = Conv(14, 3, 16, 32), b = Conv(7, 1, 32, 8);
  const ArchDescription ab = ConcatArch(a, b, "ab");
  EXPECT_EQ(TimeComplexity(ab), TimeComplexity(a) + TimeComplexity(b));
  EXPECT_EQ(SpaceComplexity(ab), SpaceComplexity(a) + SpaceComplexity(b));
  EXPECT_EQ(TimeComplexity(Conv(14, 3, 16, 32, 5)), 5 * TimeComplexity(a));
}

TEST(Complexity, DoublingOutputChannelsDoubles) {
  for (std::uint64_t co : {1, 3, 64, 511}) {
    EXPECT_EQ(TimeComplexity(Conv(9, 3, 7, 2 * co)), 2 * TimeComplexity(Conv(9, 3, 7, co)));
    EXPECT_EQ(SpaceComplexity(Conv(9, 3, 7, 2 * co)), 2 * SpaceComplexity(Conv(9, 3, 7, co)));
  }
}

TEST(Complexity, RecurrentCounts) {
  RecurrentLayerSpec sru{CellKind::kSru, 512, 1024, 3, 30};
  EXPECT_EQ(RecurrentSpace(sru), u128{4 * 512 * 1024 + 2 * 3 * 1024 * 1024});
  EXPECT_EQ(RecurrentTime(sru), 30 * RecurrentSpace(sru));
  RecurrentLayerSpec same{CellKind::kSru, 64, 64, 1, 1};
  EXPECT_EQ(RecurrentSpace(same), u128{3 * 64 * 64});
  RecurrentLayerSpec lstm{CellKind::kLstm, 512, 1024, 3, 30};
  EXPECT_EQ(RecurrentSpace(lstm), u128{23068672});
  EXPECT_EQ(RecurrentTime(lstm), u128{692060160});
  const ArchDescription high = LoadArch(MRRN_ARCH_DIR "/rrn_high.arch");
  EXPECT_EQ(SpaceComplexity(high), u128{21267648 + 8388608});
  EXPECT_EQ(TimeComplexity(high), u128{3663249408ULL + 251658240});
}

TEST(Complexity, BeyondSixtyFourBits) {
  const ArchDescription big = Conv(1ULL << 20, 1ULL << 10, 1ULL << 16, 1ULL << 16);
  EXPECT_EQ(TimeComplexity(big), u128{1} << 92);
  EXPECT_EQ(ToString(u128{1} << 92), "4951760157141521099596496896");
  EXPECT_EQ(ToString(0), "0");
  const ArchDescription huge = Conv(1ULL << 40, 1ULL << 30, 1ULL << 30, 1ULL << 30);
  EXPECT_THROW(TimeComplexity(huge), ValidationError);
}

TEST(Complexity, ParseErrorsNameTheLine) {
  try {
    ParseArch("conv 1 1 1 1\nconv 2 3 x 4\n", "a", "a.arch");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("a.arch:2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(ParseArch("conv 0 1 1 1\n", "a", "s"), ValidationError);
  EXPECT_THROW(ParseArch("conv 1 1 1\n", "a", "s"), ValidationError);
  EXPECT_THROW(ParseArch("pool 2\n", "a", "s"), ValidationError);
  EXPECT_THROW(ParseArch("rnn gru 1 1 1 1\n", "a", "s"), ValidationError);
  EXPECT_THROW(ParseArch("conv 1 1 1 1 x0\n", "a", "s"), ValidationError);
  EXPECT_THROW(ParseArch("# nothing\n\n", "a", "s"), ValidationError);
  EXPECT_THROW(LoadArch("/nonexistent/q.arch"), IoError);
}

TEST(Complexity, ParseAcceptsCommentsAndRepeats) {
  const auto a = ParseArch("# c\n  conv 4 3 2 5 x3  # tail\n\nrnn lstm 8 4 2 10\n", "n", "s");
  ASSERT_EQ(a.convs.size(), 1u);
  EXPECT_EQ(a.convs[0].repeat, 3u);
  ASSERT_EQ(a.recurrent.size(), 1u);
  EXPECT_EQ(a.recurrent[0].cell, CellKind::kLstm);
}

TEST(Complexity, Report) {
  const std::vector<ArchDescription> archs = {Resnet34()};
  EXPECT_EQ(ComplexityReport(archs),
            "name,time_macs,space_params\nresnet34,3663249408,21267648\n");
  EXPECT_EQ(ComplexityReport({}), "name,time_macs,space_params\n");
}

}  // namespace
}  // namespace mrrn
