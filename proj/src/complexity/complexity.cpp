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

#include "mrrn/complexity.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "mrrn/error.hpp"
#include "mrrn/io.hpp"

namespace mrrn {

namespace {

u128 Mul(u128 a, u128 b) {
  u128 out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw ValidationError("complexity: count exceeds 128 bits");
  }
  return out;
}

u128 Add(u128 a, u128 b) {
  u128 out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw ValidationError("complexity: count exceeds 128 bits");
  }
  return out;
}

void Positive(const char* what, std::uint64_t v) {
  if (v == 0) throw ValidationError(std::string("complexity: ") + what + " must be >= 1");
}

}  // namespace

std::string ToString(u128 value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

void ConvLayerSpec::Validate() const {
  Positive("M", m);
  Positive("K", k);
  Positive("C_in", c_in);
  Positive("C_out", c_out);
  Positive("repeat", repeat);
}

void RecurrentLayerSpec::Validate() const {
  Positive("rnn input", input);
  Positive("rnn hidden", hidden);
  Positive("rnn layers", layers);
  Positive("rnn seqlen", seqlen);
}

void ArchDescription::Validate() const {
  if (convs.empty() && recurrent.empty()) {
    throw ValidationError("architecture '" + name + "' has no layers");
  }
  for (const auto& c : convs) c.Validate();
  for (const auto& r : recurrent) r.Validate();
}

u128 ConvSpace(const ConvLayerSpec& l) {
  l.Validate();
  return Mul(Mul(Mul(Mul(l.k, l.k), l.c_in), l.c_out), l.repeat);
}

u128 ConvTime(const ConvLayerSpec& l) {
  return Mul(Mul(l.m, l.m), ConvSpace(l));
}

u128 RecurrentSpace(const RecurrentLayerSpec& l) {
  l.Validate();
  u128 total = 0;
  for (std::uint64_t i = 0; i < l.layers; ++i) {
    const u128 in = i == 0 ? l.input : l.hidden;
    const u128 input_side = Mul(in, l.hidden);
    switch (l.cell) {
      case CellKind::kSru:
        total = Add(total, Mul(input_side, in == l.hidden ? 3 : 4));
        break;
      case CellKind::kLstm:
        total = Add(total, Add(Mul(input_side, 4), Mul(Mul(l.hidden, l.hidden), 4)));
        break;
    }
  }
  return total;
}

u128 RecurrentTime(const RecurrentLayerSpec& l) {
  return Mul(RecurrentSpace(l), l.seqlen);
}

u128 TimeComplexity(const ArchDescription& arch) {
  arch.Validate();
  u128 total = 0;
  for (const auto& c : arch.convs) total = Add(total, ConvTime(c));
  for (const auto& r : arch.recurrent) total = Add(total, RecurrentTime(r));
  return total;
}

u128 SpaceComplexity(const ArchDescription& arch) {
  arch.Validate();
  u128 total = 0;
  for (const auto& c : arch.convs) total = Add(total, ConvSpace(c));
  for (const auto& r : arch.recurrent) total = Add(total, RecurrentSpace(r));
  return total;
}

ArchDescription ConcatArch(const ArchDescription& a, const ArchDescription& b,
                           std::string name) {
  ArchDescription out{std::move(name), a.convs, a.recurrent};
  out.convs.insert(out.convs.end(), b.convs.begin(), b.convs.end());
  out.recurrent.insert(out.recurrent.end(), b.recurrent.begin(), b.recurrent.end());
  return out;
}

ArchDescription ParseArch(const std::string& text, const std::string& name,
                          const std::string& source) {
  ArchDescription arch;
  arch.name = name;
  std::istringstream in(text);
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    auto number = [&](const std::string& s, const char* field) {
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size() || v == 0) {
        throw ValidationError(where + field + " must be a positive integer, got '" + s + "'");
      }
      return v;
    };
    if (tok[0] == "conv") {
      if (tok.size() != 5 && tok.size() != 6) {
        throw ValidationError(where + "expected 'conv M K C_in C_out [xRepeat]'");
      }
      ConvLayerSpec c{number(tok[1], "M"), number(tok[2], "K"), number(tok[3], "C_in"),
                      number(tok[4], "C_out"), 1};
      if (tok.size() == 6) {
        if (tok[5].size() < 2 || tok[5][0] != 'x') {
          throw ValidationError(where + "repeat must look like x3, got '" + tok[5] + "'");
        }
        c.repeat = number(tok[5].substr(1), "repeat");
      }
      arch.convs.push_back(c);
    } else if (tok[0] == "rnn") {
      if (tok.size() != 6) {
        throw ValidationError(where + "expected 'rnn TYPE input hidden layers seqlen'");
      }
      RecurrentLayerSpec r;
      try {
        r.cell = ParseCellKind(tok[1]);
      } catch (const ValidationError& e) {
        throw ValidationError(where + e.what());
      }
      r.input = number(tok[2], "input");
      r.hidden = number(tok[3], "hidden");
      r.layers = number(tok[4], "layers");
      r.seqlen = number(tok[5], "seqlen");
      arch.recurrent.push_back(r);
    } else {
      throw ValidationError(where + "unknown layer kind '" + tok[0] + "'");
    }
  }
  if (arch.convs.empty() && arch.recurrent.empty()) {
    throw ValidationError(source + ": no layers");
  }
  return arch;
}

ArchDescription LoadArch(const std::filesystem::path& path) {
  return ParseArch(ReadFileText(path), path.stem().string(), path.string());
}

std::string ComplexityReport(std::span<const ArchDescription> archs) {
  std::string out = std::string(kComplexityHeader) + "\n";
  for (const auto& a : archs) {
    out += a.name + "," + ToString(TimeComplexity(a)) + "," + ToString(SpaceComplexity(a)) + "\n";
  }
  return out;
}

}  // namespace mrrn
