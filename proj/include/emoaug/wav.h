// emoaug/wav.h

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

#ifndef EMOAUG_WAV_H_
#define EMOAUG_WAV_H_

#include <string>
#include <vector>

#include "emoaug/common.h"

namespace emoaug {

struct Waveform {
  std::vector<double> samples;  // amplitudes in [-1, 1]
  int sample_rate = 16000;

  int64_t NumSamples() const { return static_cast<int64_t>(samples.size()); }
  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

struct WavLoadOptions {
  int target_sample_rate = 16000;
  bool allow_resample = true;   // resample to target rate when rates differ
  bool allow_downmix = true;    // average channels of multi-channel files
};

// Reads a 16-bit PCM WAV file. Stereo input is downmixed (or rejected when
// allow_downmix is off); a differing sample rate is linearly resampled when
// allow_resample is on, otherwise rejected.
Waveform LoadWaveform(const std::string& path, const WavLoadOptions& opts = {});

// Writes mono 16-bit PCM. Samples are clipped to [-1, 1].
void SaveWaveform(const std::string& path, const Waveform& x);

// Linear-interpolation resampling to a new rate.
Waveform ResampleWaveform(const Waveform& x, int new_rate);

}  // namespace emoaug

#endif  // EMOAUG_WAV_H_
