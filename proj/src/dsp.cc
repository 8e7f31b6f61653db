// src/dsp.cc

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

#include "emoaug/dsp.h"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace emoaug {

namespace {

constexpr double kPi = std::numbers::pi;

bool IsPowerOfTwo(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> HannWindow(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
  return w;
}

double HzToMel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double MelToHz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

double WrapPhase(double p) {
  p = std::fmod(p + kPi, 2.0 * kPi);
  if (p < 0) p += 2.0 * kPi;
  return p - kPi;
}

}  // namespace

double DspConfig::LogFloor() const { return std::log(log_floor_amp); }

void DspConfig::Validate() const {
  EMOAUG_CHECK(sample_rate > 0, ConfigError, "sample_rate must be positive");
  EMOAUG_CHECK(IsPowerOfTwo(n_fft), ConfigError, "n_fft must be a power of two");
  EMOAUG_CHECK(win_length > 0 && win_length <= n_fft, ConfigError,
               "win_length must be in (0, n_fft]");
  EMOAUG_CHECK(hop_length > 0 && hop_length <= win_length, ConfigError,
               "hop_length must be in (0, win_length]");
  EMOAUG_CHECK(n_mels >= 2, ConfigError, "n_mels must be >= 2");
  EMOAUG_CHECK(fmin >= 0 && fmax > fmin && fmax <= sample_rate / 2.0, ConfigError,
               "need 0 <= fmin < fmax <= Nyquist");
  EMOAUG_CHECK(log_floor_amp > 0, ConfigError, "log_floor_amp must be positive");
}

int64_t NumStftFrames(int64_t num_samples, const DspConfig& cfg) {
  EMOAUG_CHECK(num_samples >= cfg.win_length, DataError,
               "input shorter than one window: " << num_samples << " < "
                                                 << cfg.win_length);
  return 1 + (num_samples - cfg.win_length) / cfg.hop_length;
}

void Fft(std::vector<std::complex<double>>* a, bool inverse) {
  const size_t n = a->size();
  EMOAUG_CHECK(IsPowerOfTwo(static_cast<int>(n)), ContractError,
               "FFT length must be a power of two, got " << n);
  auto& v = *a;
  // Bit-reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(v[i], v[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = v[i + k];
        std::complex<double> t = v[i + k + len / 2] * w;
        v[i + k] = u + t;
        v[i + k + len / 2] = u - t;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    for (auto& c : v) c /= static_cast<double>(n);
  }
}

Eigen::MatrixXcd Stft(const Waveform& x, const DspConfig& cfg) {
  cfg.Validate();
  const int64_t t_frames = NumStftFrames(x.NumSamples(), cfg);
  const int n_bins = cfg.n_fft / 2 + 1;
  const auto window = HannWindow(cfg.win_length);
  Eigen::MatrixXcd spec(t_frames, n_bins);
  std::vector<std::complex<double>> frame(cfg.n_fft);
  for (int64_t t = 0; t < t_frames; ++t) {
    const int64_t off = t * cfg.hop_length;
    for (int i = 0; i < cfg.win_length; ++i)
      frame[i] = x.samples[off + i] * window[i];
    for (int i = cfg.win_length; i < cfg.n_fft; ++i) frame[i] = 0.0;
    Fft(&frame, false);
    for (int b = 0; b < n_bins; ++b) spec(t, b) = frame[b];
  }
  return spec;
}

Waveform Istft(const Eigen::MatrixXcd& spec, const DspConfig& cfg) {
  cfg.Validate();
  const int64_t t_frames = spec.rows();
  EMOAUG_CHECK(t_frames >= 1, ContractError, "empty spectrogram");
  EMOAUG_CHECK(spec.cols() == cfg.n_fft / 2 + 1, ShapeError,
               "bin count mismatch: " << spec.cols() << " vs "
                                      << cfg.n_fft / 2 + 1);
  const auto window = HannWindow(cfg.win_length);
  const int64_t n_out = (t_frames - 1) * cfg.hop_length + cfg.win_length;
  std::vector<double> y(n_out, 0.0), wsum(n_out, 0.0);
  std::vector<std::complex<double>> frame(cfg.n_fft);
  for (int64_t t = 0; t < t_frames; ++t) {
    for (int b = 0; b <= cfg.n_fft / 2; ++b) frame[b] = spec(t, b);
    for (int b = cfg.n_fft / 2 + 1; b < cfg.n_fft; ++b)
      frame[b] = std::conj(spec(t, cfg.n_fft - b));
    Fft(&frame, true);
    const int64_t off = t * cfg.hop_length;
    for (int i = 0; i < cfg.win_length; ++i) {
      y[off + i] += frame[i].real() * window[i];
      wsum[off + i] += window[i] * window[i];
    }
  }
  Waveform out;
  out.sample_rate = cfg.sample_rate;
  out.samples.resize(n_out);
  for (int64_t i = 0; i < n_out; ++i)
    out.samples[i] = wsum[i] > 1e-10 ? y[i] / wsum[i] : 0.0;
  return out;
}

Eigen::MatrixXd MelFilterbank(const DspConfig& cfg) {
  cfg.Validate();
  const int n_bins = cfg.n_fft / 2 + 1;
  const double mel_lo = HzToMel(cfg.fmin), mel_hi = HzToMel(cfg.fmax);
  std::vector<double> pts(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    pts[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));
  Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(cfg.n_mels, n_bins);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double lo = pts[m], c = pts[m + 1], hi = pts[m + 2];
    for (int b = 0; b < n_bins; ++b) {
      const double f = static_cast<double>(b) * cfg.sample_rate / cfg.n_fft;
      if (f <= lo || f >= hi) continue;
      fb(m, b) = f <= c ? (f - lo) / (c - lo) : (hi - f) / (hi - c);
    }
  }
  return fb;
}

std::vector<double> MelBandCenters(const DspConfig& cfg) {
  const double mel_lo = HzToMel(cfg.fmin), mel_hi = HzToMel(cfg.fmax);
  std::vector<double> centers(cfg.n_mels);
  for (int m = 0; m < cfg.n_mels; ++m)
    centers[m] = MelToHz(mel_lo + (mel_hi - mel_lo) * (m + 1) / (cfg.n_mels + 1));
  return centers;
}

MelSpectrogram ComputeMelSpectrogram(const Waveform& x, const DspConfig& cfg) {
  const Eigen::MatrixXcd spec = Stft(x, cfg);
  const Eigen::MatrixXd mag = spec.cwiseAbs();
  const Eigen::MatrixXd fb = MelFilterbank(cfg);
  Eigen::MatrixXd mel = mag * fb.transpose();  // T x M
  const double floor = cfg.log_floor_amp;
  MelSpectrogram out;
  out.cfg = cfg;
  out.frames = mel.unaryExpr(
      [floor](double v) { return std::log(std::max(v, floor)); });
  EMOAUG_CHECK(out.frames.allFinite(), DivergenceError,
               "non-finite mel entries");
  return out;
}

Waveform InvertMel(const MelSpectrogram& m, int n_iters) {
  EMOAUG_CHECK(n_iters >= 1, ContractError, "n_iters must be >= 1");
  const DspConfig& cfg = m.cfg;
  cfg.Validate();
  EMOAUG_CHECK(m.frames.rows() >= 1 && m.frames.cols() == cfg.n_mels, ShapeError,
               "bad mel shape " << m.frames.rows() << "x" << m.frames.cols());
  const Eigen::MatrixXd fb = MelFilterbank(cfg);
  // Moore-Penrose pseudo-inverse of the filterbank, negatives clamped.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(fb);
  const Eigen::MatrixXd pinv = cod.pseudoInverse();  // n_bins x n_mels
  const Eigen::MatrixXd mel_amp = m.frames.array().exp().matrix();
  Eigen::MatrixXd mag = (mel_amp * pinv.transpose()).cwiseMax(0.0);  // T x bins

  const int64_t t_frames = mag.rows();
  const int n_bins = static_cast<int>(mag.cols());
  // Deterministic zero-phase start.
  Eigen::MatrixXcd spec(t_frames, n_bins);
  for (int64_t t = 0; t < t_frames; ++t)
    for (int b = 0; b < n_bins; ++b) spec(t, b) = mag(t, b);

  Waveform y;
  for (int it = 0; it < n_iters; ++it) {
    y = Istft(spec, cfg);
    const Eigen::MatrixXcd est = Stft(y, cfg);
    const int64_t tt = std::min<int64_t>(t_frames, est.rows());
    for (int64_t t = 0; t < tt; ++t) {
      for (int b = 0; b < n_bins; ++b) {
        const double a = std::abs(est(t, b));
        spec(t, b) = a > 1e-12 ? est(t, b) / a * mag(t, b)
                               : std::complex<double>(mag(t, b), 0.0);
      }
    }
  }
  y = Istft(spec, cfg);
  return y;
}

Waveform TimeStretch(const Waveform& x, double rate, const DspConfig& cfg) {
  EMOAUG_CHECK(rate > 0, ContractError, "stretch rate must be positive");
  if (rate == 1.0) return x;
  DspConfig c = cfg;
  c.sample_rate = x.sample_rate;
  const Eigen::MatrixXcd spec = Stft(x, c);
  const int64_t t_in = spec.rows();
  EMOAUG_CHECK(t_in >= 2, DataError, "input too short for phase vocoder");
  const int n_bins = static_cast<int>(spec.cols());
  const int64_t t_out = static_cast<int64_t>(std::ceil((t_in - 1) / rate));

  std::vector<double> omega(n_bins);
  for (int b = 0; b < n_bins; ++b)
    omega[b] = 2.0 * kPi * c.hop_length * b / c.n_fft;

  Eigen::MatrixXcd out(t_out, n_bins);
  std::vector<double> phase(n_bins);
  for (int b = 0; b < n_bins; ++b) phase[b] = std::arg(spec(0, b));
  for (int64_t k = 0; k < t_out; ++k) {
    const double pos = k * rate;
    const int64_t i0 = std::min<int64_t>(static_cast<int64_t>(pos), t_in - 2);
    const double frac = pos - i0;
    for (int b = 0; b < n_bins; ++b) {
      const double a0 = std::abs(spec(i0, b)), a1 = std::abs(spec(i0 + 1, b));
      const double mag = (1.0 - frac) * a0 + frac * a1;
      out(k, b) = std::polar(mag, phase[b]);
      const double dphi =
          WrapPhase(std::arg(spec(i0 + 1, b)) - std::arg(spec(i0, b)) - omega[b]);
      phase[b] += omega[b] + dphi;
    }
  }
  return Istft(out, c);
}

double DominantFrequencyHz(const Waveform& x) {
  EMOAUG_CHECK(x.NumSamples() >= 16, DataError, "signal too short");
  size_t n = 1;
  while (n < x.samples.size() * 2) n <<= 1;
  if (n < 16384) n = 16384;
  std::vector<std::complex<double>> buf(n, 0.0);
  const auto w = HannWindow(static_cast<int>(x.samples.size()));
  for (size_t i = 0; i < x.samples.size(); ++i) buf[i] = x.samples[i] * w[i];
  Fft(&buf, false);
  size_t best = 1;
  double best_mag = 0.0;
  for (size_t b = 1; b + 1 < n / 2; ++b) {
    const double m = std::abs(buf[b]);
    if (m > best_mag) {
      best_mag = m;
      best = b;
    }
  }
  // Parabolic refinement on log magnitudes.
  const double l0 = std::log(std::abs(buf[best - 1]) + 1e-30);
  const double l1 = std::log(std::abs(buf[best]) + 1e-30);
  const double l2 = std::log(std::abs(buf[best + 1]) + 1e-30);
  const double denom = l0 - 2.0 * l1 + l2;
  const double delta = std::abs(denom) > 1e-12 ? 0.5 * (l0 - l2) / denom : 0.0;
  return (best + delta) * x.sample_rate / static_cast<double>(n);
}

}  // namespace emoaug
