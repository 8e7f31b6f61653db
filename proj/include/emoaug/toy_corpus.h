// emoaug/toy_corpus.h

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

#ifndef EMOAUG_TOY_CORPUS_H_
#define EMOAUG_TOY_CORPUS_H_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "emoaug/corpus.h"
#include "emoaug/wav.h"

namespace emoaug {

// Synthetic corpus with separable content/style ground truth. Content is a
// symbol string rendered as distinct tone complexes; style is a rate
// multiplier, an amplitude envelope, and a low base-pitch tone.

struct ToyStyle {
  double rate = 1.0;       // in [0.5, 2]; symbol duration = base_dur / rate
  int envelope_id = 0;     // 0 flat, 1 rising, 2 falling, 3 tremolo
  double base_pitch = 110; // Hz, low-band tone under the symbol stack
};

struct ToyUtteranceSpec {
  std::vector<int> content;  // symbols in [0, alphabet)
  ToyStyle style;
  std::string speaker;
  std::string emotion;
  std::string session;
  std::string utt_id;
};

struct ToyCorpusConfig {
  int alphabet = 12;
  double base_symbol_dur = 0.2;  // seconds at rate 1.0
  int sample_rate = 16000;
  int n_speakers = 4;
  int n_per_cell = 10;  // utterances per (speaker, emotion)
  // Optional per-emotion override of n_per_cell (order = kEmotions); used to
  // induce class imbalance. Empty = uniform.
  std::vector<int> per_emotion_counts;
  int n_sessions = 5;
  int min_symbols = 3;
  int max_symbols = 5;
  double symbol_amp = 0.45;
  double pitch_amp = 0.08;
};

// Fundamental frequency of a symbol's tone complex.
double ToySymbolFrequency(int symbol, const ToyCorpusConfig& cfg);

// Deterministic rendering of one spec (no RNG: phases are fixed).
Waveform SynthesizeToy(const ToyUtteranceSpec& spec, const ToyCorpusConfig& cfg);

struct ToyCorpus {
  Manifest manifest;
  std::map<std::string, ToyUtteranceSpec> truth;  // ground-truth sidecar
};

// Factorial corpus over speakers x emotions x per-cell utterances. Writes
// WAVs under out_dir/wav, the manifest to out_dir/manifest.jsonl, and the
// ground truth to out_dir/truth.jsonl. Deterministic per seed.
ToyCorpus GenerateToyCorpus(const ToyCorpusConfig& cfg, uint64_t seed,
                            const std::string& out_dir);

void SaveToyTruth(const std::string& path,
                  const std::map<std::string, ToyUtteranceSpec>& truth);
std::map<std::string, ToyUtteranceSpec> LoadToyTruth(const std::string& path);

}  // namespace emoaug

#endif  // EMOAUG_TOY_CORPUS_H_
