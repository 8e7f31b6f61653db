// emoaug/dsp.h

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

#ifndef EMOAUG_DSP_H_
#define EMOAUG_DSP_H_

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "emoaug/wav.h"

namespace emoaug {

// Tacotron2-family analysis defaults at 16 kHz.
struct DspConfig {
  int sample_rate = 16000;
  int n_fft = 1024;
  int win_length = 1024;
  int hop_length = 256;
  int n_mels = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor_amp = 1e-5;  // entries clamped at log(log_floor_amp)

  double LogFloor() const;
  void Validate() const;
};

struct MelSpectrogram {
  // T x M matrix of natural-log mel magnitudes.
  Eigen::MatrixXd frames;
  DspConfig cfg;

  int64_t NumFrames() const { return frames.rows(); }
  int NumMels() const { return static_cast<int>(frames.cols()); }
};

// Center-free frame count: 1 + floor((n - win) / hop). Requires n >= win.
int64_t NumStftFrames(int64_t num_samples, const DspConfig& cfg);

// In-place radix-2 FFT (n must be a power of two); inverse divides by n.
void Fft(std::vector<std::complex<double>>* a, bool inverse);

// Complex STFT with a periodic Hann window, center-free framing.
// Result: T x (n_fft/2 + 1).
Eigen::MatrixXcd Stft(const Waveform& x, const DspConfig& cfg);

// Overlap-add inverse of Stft with squared-window normalization.
Waveform Istft(const Eigen::MatrixXcd& spec, const DspConfig& cfg);

// Triangular HTK-mel filterbank, rows = mel bands, cols = n_fft/2+1 bins.
Eigen::MatrixXd MelFilterbank(const DspConfig& cfg);

// Center frequency (Hz) of each mel band.
std::vector<double> MelBandCenters(const DspConfig& cfg);

// Log-mel analysis of a waveform. Throws DataError when the input is
// shorter than one window.
MelSpectrogram ComputeMelSpectrogram(const Waveform& x, const DspConfig& cfg);

// Griffin-Lim mel inversion: pseudo-inverse mel-to-linear mapping followed
// by iterative phase recovery. Bundled stand-in for a neural vocoder.
Waveform InvertMel(const MelSpectrogram& m, int n_iters = 60);

// Phase-vocoder time stretch: output duration = input duration / rate,
// pitch preserved.
Waveform TimeStretch(const Waveform& x, double rate, const DspConfig& cfg = {});

// Dominant frequency of a signal in Hz (FFT peak with parabolic refinement).
double DominantFrequencyHz(const Waveform& x);

}  // namespace emoaug

#endif  // EMOAUG_DSP_H_
