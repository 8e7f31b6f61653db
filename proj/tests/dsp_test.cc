// tests/dsp_test.cc

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

TEST_CASE("center-free framing: 16000 samples, win 1024, hop 256 -> 59") {
  DspConfig cfg;
  CHECK(NumStftFrames(16000, cfg) == 59);
  // Closed form on a sweep of lengths.
  for (int64_t n : {1024, 1025, 1279, 1280, 20000, 12345}) {
    CHECK(NumStftFrames(n, cfg) == 1 + (n - cfg.win_length) / cfg.hop_length);
  }
  CHECK_THROWS_AS(NumStftFrames(1023, cfg), DataError);
}

TEST_CASE("fft inverts itself and matches the analytic DFT of a delta") {
  std::vector<std::complex<double>> a(8, {0.0, 0.0});
  a[1] = {1.0, 0.0};
  auto b = a;
  Fft(&b, false);
  // DFT of delta at n=1: X[k] = exp(-2*pi*i*k/8).
  for (int k = 0; k < 8; ++k) {
    const double phi = -2.0 * std::numbers::pi * k / 8.0;
    CHECK(b[k].real() == doctest::Approx(std::cos(phi)).epsilon(1e-12));
    CHECK(b[k].imag() == doctest::Approx(std::sin(phi)).epsilon(1e-12));
  }
  Fft(&b, true);
  for (int k = 0; k < 8; ++k) {
    CHECK(b[k].real() == doctest::Approx(a[k].real()).epsilon(1e-12));
    CHECK(b[k].imag() == doctest::Approx(a[k].imag()).epsilon(1e-12));
  }
}

TEST_CASE("istft(stft(x)) reconstructs the interior of the signal") {
  DspConfig cfg;
  Waveform x = Sine(523.25, 0.5);
  Waveform y = Istft(Stft(x, cfg), cfg);
  REQUIRE(y.NumSamples() >= 4 * cfg.hop_length);
  // Skip the first/last window where overlap-add coverage is partial.
  double err = 0.0;
  int64_t n = 0;
  for (int64_t i = cfg.win_length; i < y.NumSamples() - cfg.win_length; ++i) {
    err += std::abs(y.samples[i] - x.samples[i]);
    ++n;
  }
  CHECK(err / n < 1e-6);
}

TEST_CASE("silence maps to the log floor everywhere") {
  DspConfig cfg;
  Waveform x;
  x.samples.assign(16000, 0.0);
  MelSpectrogram m = ComputeMelSpectrogram(x, cfg);
  CHECK(m.NumFrames() == 59);
  CHECK(m.NumMels() == 80);
  CHECK(m.frames.minCoeff() == doctest::Approx(cfg.LogFloor()));
  CHECK(m.frames.maxCoeff() == doctest::Approx(cfg.LogFloor()));
}

TEST_CASE("a 440 Hz sine peaks in the mel band whose center is nearest 440") {
  DspConfig cfg;
  MelSpectrogram m = ComputeMelSpectrogram(Sine(440.0, 1.0), cfg);
  const auto centers = MelBandCenters(cfg);
  int expected = 0;
  for (size_t b = 1; b < centers.size(); ++b)
    if (std::abs(centers[b] - 440.0) < std::abs(centers[expected] - 440.0))
      expected = static_cast<int>(b);
  for (int64_t t = 1; t + 1 < m.NumFrames(); ++t) {
    Eigen::Index argmax;
    m.frames.row(t).maxCoeff(&argmax);
    CHECK(std::abs(static_cast<int>(argmax) - expected) <= 1);
  }
}

TEST_CASE("mel analysis is deterministic and monotone in amplitude") {
  DspConfig cfg;
  Waveform x = Sine(700.0, 0.3);
  MelSpectrogram a = ComputeMelSpectrogram(x, cfg);
  MelSpectrogram b = ComputeMelSpectrogram(x, cfg);
  CHECK(a.frames == b.frames);

  Waveform loud = x;
  for (auto& s : loud.samples) s *= 2.0;
  MelSpectrogram c = ComputeMelSpectrogram(loud, cfg);
  // Doubling amplitude never decreases any mel entry.
  CHECK(((c.frames - a.frames).array() >= -1e-12).all());
}

TEST_CASE("griffin-lim inversion keeps the dominant mel band") {
  DspConfig cfg;
  MelSpectrogram m = ComputeMelSpectrogram(Sine(440.0, 0.5), cfg);
  Waveform y = InvertMel(m, 60);
  MelSpectrogram m2 = ComputeMelSpectrogram(y, cfg);
  const int64_t t = m.NumFrames() / 2;
  Eigen::Index want, got;
  m.frames.row(t).maxCoeff(&want);
  m2.frames.row(std::min(t, m2.NumFrames() - 1)).maxCoeff(&got);
  CHECK(std::abs(static_cast<int>(want) - static_cast<int>(got)) <= 1);
  CHECK_THROWS_AS(InvertMel(m, 0), ContractError);
}

TEST_CASE("all-floor mel inverts to near silence") {
  DspConfig cfg;
  MelSpectrogram m;
  m.cfg = cfg;
  m.frames = Eigen::MatrixXd::Constant(40, cfg.n_mels, cfg.LogFloor());
  Waveform y = InvertMel(m, 30);
  double rms = 0.0;
  for (double s : y.samples) rms += s * s;
  rms = std::sqrt(rms / y.NumSamples());
  CHECK(rms < 1e-3);
}

TEST_CASE("phase-vocoder time stretch scales duration, preserves pitch") {
  DspConfig cfg;
  cfg.n_fft = 512;
  cfg.win_length = 512;
  cfg.hop_length = 128;
  Waveform x = Sine(440.0, 1.0);
  for (double rate : {0.5, 2.0}) {
    Waveform y = TimeStretch(x, rate, cfg);
    CHECK(std::abs(y.DurationSeconds() - x.DurationSeconds() / rate) < 0.1);
    CHECK(DominantFrequencyHz(y) == doctest::Approx(440.0).epsilon(0.02));
  }
}

TEST_CASE("dominant frequency measurement is accurate on pure tones") {
  for (double f : {110.0, 220.0, 1000.0, 3000.0}) {
    CHECK(DominantFrequencyHz(Sine(f, 0.5)) == doctest::Approx(f).epsilon(0.01));
  }
}

TEST_CASE("config validation rejects nonsense") {
  DspConfig cfg;
  cfg.hop_length = 0;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg = DspConfig();
  cfg.fmax = 9000.0;  // above Nyquist
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg = DspConfig();
  cfg.n_fft = 1000;  // not a power of two
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
}
