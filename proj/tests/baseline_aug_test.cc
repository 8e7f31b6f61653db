// tests/baseline_aug_test.cc

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
#include <numbers>

#include <doctest.h>

#include "emoaug/baseline_aug.h"
#include "emoaug/dsp.h"

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

}  // namespace

TEST_CASE("copypaste concatenates exactly: 16000 + 8000 -> 24000 samples") {
  Waveform a = Sine(300.0, 1.0);
  Waveform b = Sine(500.0, 0.5);
  Waveform c = CopyPaste(a, b);
  CHECK(c.NumSamples() == 24000);
  CHECK(c.samples[0] == a.samples[0]);
  CHECK(c.samples[16000] == b.samples[0]);
  // Order matters as a signal even though the label is shared.
  Waveform d = CopyPaste(b, a);
  CHECK(c.samples != d.samples);
  // Rate mismatch is a contract violation.
  Waveform e = Sine(300.0, 0.5, 8000);
  CHECK_THROWS_AS(CopyPaste(a, e), ContractError);
}

TEST_CASE("speed perturbation scales duration by 1/factor within one sample") {
  Waveform x = Sine(440.0, 1.0);
  SUBCASE("factor 1.0 is the identity") {
    Waveform y = SpeedPerturb(x, 1.0);
    CHECK(y.samples == x.samples);
  }
  SUBCASE("factor 0.9 lengthens") {
    Waveform y = SpeedPerturb(x, 0.9);
    CHECK(std::llabs(y.NumSamples() - 17778) <= 1);
  }
  SUBCASE("factor 1.1 shortens") {
    Waveform y = SpeedPerturb(x, 1.1);
    CHECK(std::llabs(y.NumSamples() - static_cast<int64_t>(16000 / 1.1)) <= 1);
  }
  SUBCASE("duration law across factors and lengths") {
    for (double f : {0.8, 0.9, 1.1, 1.25}) {
      for (double dur : {0.3, 0.7, 1.0}) {
        Waveform in = Sine(440.0, dur);
        Waveform out = SpeedPerturb(in, f);
        CHECK(std::llabs(out.NumSamples() -
                         std::llround(in.NumSamples() / f)) <= 1);
      }
    }
  }
  SUBCASE("pitch moves with the tempo (resampling-based change)") {
    Waveform y = SpeedPerturb(x, 1.1);
    CHECK(DominantFrequencyHz(y) == doctest::Approx(440.0 * 1.1).epsilon(0.02));
  }
}

TEST_CASE("+2 semitones moves a 220 Hz tone to about 246.9 Hz") {
  Waveform x = Sine(220.0, 1.0);
  Waveform y = PitchShift(x, 2);
  const double want = 220.0 * std::pow(2.0, 2.0 / 12.0);  // 246.94
  CHECK(DominantFrequencyHz(y) == doctest::Approx(want).epsilon(0.02));
  // Duration preserved within a hop.
  CHECK(std::llabs(y.NumSamples() - x.NumSamples()) <= 512);
}

TEST_CASE("-2 semitones lowers pitch; shift by 0 is the identity") {
  Waveform x = Sine(220.0, 1.0);
  Waveform y = PitchShift(x, -2);
  const double want = 220.0 * std::pow(2.0, -2.0 / 12.0);
  CHECK(DominantFrequencyHz(y) == doctest::Approx(want).epsilon(0.02));
  CHECK(PitchShift(x, 0).samples == x.samples);
}

TEST_CASE("-2 then +2 semitones round-trips duration and spectrum") {
  Waveform x = Sine(330.0, 0.8);
  Waveform y = PitchShift(PitchShift(x, -2), 2);
  CHECK(std::abs(y.DurationSeconds() - x.DurationSeconds()) < 0.1);
  CHECK(DominantFrequencyHz(y) == doctest::Approx(330.0).epsilon(0.02));
}

TEST_CASE("baseline config validation") {
  BaselineAugConfig cfg;
  cfg.method = "reverb";
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg = BaselineAugConfig();
  cfg.speed_factors = {0.9, -1.0};
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg = BaselineAugConfig();
  cfg.semitone_offsets = {24};
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
}
