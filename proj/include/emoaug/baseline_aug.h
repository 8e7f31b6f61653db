// emoaug/baseline_aug.h

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

#ifndef EMOAUG_BASELINE_AUG_H_
#define EMOAUG_BASELINE_AUG_H_

#include <string>
#include <vector>

#include "emoaug/corpus.h"
#include "emoaug/wav.h"

namespace emoaug {

// Conventional comparison augmenters: same-emotion CopyPaste concatenation,
// resampling-based speed perturbation, and semitone pitch shifting.

struct BaselineAugConfig {
  std::string method = "speed";  // copypaste | speed | pitch
  std::vector<double> speed_factors = {0.9, 1.1};  // 1.0 would be identity
  std::vector<int> semitone_offsets = {-2, 2};

  void Validate() const;  // factors > 0; method from the closed set
};

// Concatenates two same-emotion waveforms with no gap. Sample rates must
// match; emotion agreement is the caller's contract (checked in the corpus
// driver below).
Waveform CopyPaste(const Waveform& a, const Waveform& b);

// Resampling-based tempo change: duration scales by 1/factor, pitch moves
// with it. factor == 1.0 returns the input unchanged.
Waveform SpeedPerturb(const Waveform& x, double factor);

// Pitch shift by a whole number of semitones, duration preserved
// (time-stretch then resample).
Waveform PitchShift(const Waveform& x, int semitones);

// Applies the configured baseline method across a manifest; writes WAVs to
// out_dir/wav and out_dir/augmented.jsonl. CopyPaste pairs each utterance
// with a random same-emotion partner (any speaker). Deterministic per seed.
std::vector<AugmentedRecord> RunBaselineAug(const Manifest& manifest,
                                            const BaselineAugConfig& cfg,
                                            uint64_t seed,
                                            const std::string& out_dir);

}  // namespace emoaug

#endif  // EMOAUG_BASELINE_AUG_H_
