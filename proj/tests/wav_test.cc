// tests/wav_test.cc

// Copyright 2026  EmoAug authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <doctest.h>

#include "emoaug/wav.h"

using namespace emoaug;

namespace {

Waveform Sine(double freq, double dur, int sr = 16000, double amp = 0.5) {
  Waveform x;
  x.sample_rate = sr;
  x.samples.resize(static_cast<size_t>(dur * sr));
  for (size_t i = 0; i < x.samples.size(); ++i)
    x.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / sr);
  return x;
}

std::string TmpPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("wav round trip preserves samples to 16-bit precision") {
  Waveform x = Sine(440.0, 0.25);
  const std::string path = TmpPath("emoaug_wav_roundtrip.wav");
  SaveWaveform(path, x);
  Waveform y = LoadWaveform(path);
  REQUIRE(y.sample_rate == x.sample_rate);
  REQUIRE(y.NumSamples() == x.NumSamples());
  for (int64_t i = 0; i < x.NumSamples(); ++i)
    CHECK(y.samples[i] == doctest::Approx(x.samples[i]).epsilon(1e-3));
  std::filesystem::remove(path);
}

TEST_CASE("save clips out-of-range samples instead of wrapping") {
  Waveform x;
  x.samples = {1.5, -1.5, 0.0};
  const std::string path = TmpPath("emoaug_wav_clip.wav");
  SaveWaveform(path, x);
  Waveform y = LoadWaveform(path);
  CHECK(y.samples[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(y.samples[1] == doctest::Approx(-1.0).epsilon(1e-3));
  std::filesystem::remove(path);
}

TEST_CASE("load rejects missing and malformed files") {
  CHECK_THROWS_AS(LoadWaveform("/nonexistent/file.wav"), IoError);
  const std::string path = TmpPath("emoaug_wav_bogus.wav");
  {
    std::ofstream os(path, std::ios::binary);
    os << "this is not a wav file at all, not even close";
  }
  CHECK_THROWS_AS(LoadWaveform(path), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("resampling changes length proportionally and keeps content") {
  Waveform x = Sine(440.0, 0.5, 16000);
  Waveform y = ResampleWaveform(x, 8000);
  CHECK(std::llabs(y.NumSamples() - x.NumSamples() / 2) <= 1);
  CHECK(y.sample_rate == 8000);
  // Back up to 16 kHz: same duration within a sample.
  Waveform z = ResampleWaveform(y, 16000);
  CHECK(std::llabs(z.NumSamples() - x.NumSamples()) <= 2);
}

TEST_CASE("loader resamples a differing rate to the target") {
  Waveform x = Sine(440.0, 0.25, 8000);
  const std::string path = TmpPath("emoaug_wav_8k.wav");
  SaveWaveform(path, x);
  Waveform y = LoadWaveform(path);  // default target 16 kHz
  CHECK(y.sample_rate == 16000);
  CHECK(std::llabs(y.NumSamples() - 2 * x.NumSamples()) <= 2);
  WavLoadOptions strict;
  strict.allow_resample = false;
  CHECK_THROWS_AS(LoadWaveform(path, strict), FormatError);
  std::filesystem::remove(path);
}
