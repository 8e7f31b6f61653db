// src/baseline_aug.cc

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

#include "emoaug/baseline_aug.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>

#include "emoaug/dsp.h"

namespace emoaug {

void BaselineAugConfig::Validate() const {
  EMOAUG_CHECK(method == "copypaste" || method == "speed" || method == "pitch",
               ConfigError, "unknown baseline method: " << method);
  for (double f : speed_factors)
    EMOAUG_CHECK(f > 0, ConfigError, "speed factor must be positive, got " << f);
  for (int s : semitone_offsets)
    EMOAUG_CHECK(std::abs(s) <= 12, ConfigError,
                 "semitone offset out of range: " << s);
}

Waveform CopyPaste(const Waveform& a, const Waveform& b) {
  EMOAUG_CHECK(a.sample_rate == b.sample_rate, ContractError,
               "sample-rate mismatch in concatenation: " << a.sample_rate
                                                         << " vs "
                                                         << b.sample_rate);
  Waveform out;
  out.sample_rate = a.sample_rate;
  out.samples = a.samples;
  out.samples.insert(out.samples.end(), b.samples.begin(), b.samples.end());
  return out;
}

Waveform SpeedPerturb(const Waveform& x, double factor) {
  EMOAUG_CHECK(factor > 0, ContractError, "speed factor must be positive");
  if (factor == 1.0) return x;
  // Resample as if the signal had been recorded factor times faster, then
  // reinterpret at the original rate: duration scales by 1/factor and pitch
  // moves with it.
  Waveform y = ResampleWaveform(
      x, static_cast<int>(std::lround(x.sample_rate / factor)));
  y.sample_rate = x.sample_rate;
  return y;
}

Waveform PitchShift(const Waveform& x, int semitones) {
  EMOAUG_CHECK(std::abs(semitones) <= 12, ContractError,
               "semitone offset out of range: " << semitones);
  if (semitones == 0) return x;
  const double rho = std::pow(2.0, semitones / 12.0);
  // Stretch time by rho (pitch preserved), then resample by rho: duration
  // returns to the original while every frequency scales by rho.
  Waveform stretched = TimeStretch(x, 1.0 / rho);
  Waveform y = ResampleWaveform(
      stretched, static_cast<int>(std::lround(x.sample_rate / rho)));
  y.sample_rate = x.sample_rate;
  return y;
}

std::vector<AugmentedRecord> RunBaselineAug(const Manifest& manifest,
                                            const BaselineAugConfig& cfg,
                                            uint64_t seed,
                                            const std::string& out_dir) {
  cfg.Validate();
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "wav");
  Rng rng(seed);

  std::vector<AugmentedRecord> records;
  auto save = [&](const UtteranceRecord& src, const Waveform& wav,
                  const std::string& tag, const std::string& ref_id) {
    AugmentedRecord rec;
    rec.out_id = src.utt_id + "_" + tag;
    rec.wav_path = (fs::path(out_dir) / "wav" / (rec.out_id + ".wav")).string();
    rec.speaker = src.speaker;
    rec.emotion = src.emotion;
    rec.source_id = src.utt_id;
    rec.ref_id = ref_id;
    rec.method = cfg.method;
    SaveWaveform(rec.wav_path, wav);
    records.push_back(std::move(rec));
  };

  if (cfg.method == "copypaste") {
    std::map<std::string, std::vector<const UtteranceRecord*>> by_emotion;
    for (const auto& r : manifest) by_emotion[r.emotion].push_back(&r);
    for (const auto& src : manifest) {
      const auto& pool = by_emotion.at(src.emotion);
      if (pool.size() < 2) continue;  // no same-emotion partner
      const UtteranceRecord* partner;
      std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
      do {
        partner = pool[pick(rng)];
      } while (partner == &src);
      Waveform out = CopyPaste(LoadWaveform(src.audio_path),
                               LoadWaveform(partner->audio_path));
      save(src, out, "cp", partner->utt_id);
    }
  } else if (cfg.method == "speed") {
    for (const auto& src : manifest) {
      Waveform x = LoadWaveform(src.audio_path);
      for (double f : cfg.speed_factors) {
        if (f == 1.0) continue;
        std::string tag = "sp" + std::to_string(f);
        tag.erase(tag.find_last_not_of('0') + 1);
        save(src, SpeedPerturb(x, f), tag, "");
      }
    }
  } else {  // pitch
    for (const auto& src : manifest) {
      Waveform x = LoadWaveform(src.audio_path);
      for (int s : cfg.semitone_offsets) {
        if (s == 0) continue;
        const std::string tag =
            (s > 0 ? "ps+" : "ps") + std::to_string(s);
        save(src, PitchShift(x, s), tag, "");
      }
    }
  }
  SaveAugmentedManifest((fs::path(out_dir) / "augmented.jsonl").string(),
                        records);
  return records;
}

}  // namespace emoaug
