// src/toy_corpus.cc

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

#include "emoaug/toy_corpus.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <json.hpp>

namespace emoaug {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

double Envelope(int envelope_id, double frac) {
  switch (envelope_id) {
    case 0:
      return 1.0;
    case 1:  // rising
      return 0.6 + 0.6 * frac;
    case 2:  // falling
      return 1.2 - 0.6 * frac;
    case 3:  // tremolo
      return 1.0 + 0.25 * std::sin(2.0 * kPi * 5.5 * frac * 3.0);
    default:
      throw DataError("unknown envelope id " + std::to_string(envelope_id));
  }
}

// Emotion-conditioned style distributions: rate band, base pitch, preferred
// envelope. These make the pseudo-emotion recoverable from prosody alone.
struct EmotionStyle {
  double rate_lo, rate_hi;
  double base_pitch;
  int envelope;
};

const std::array<EmotionStyle, 4> kEmotionStyles = {{
    {1.40, 2.00, 220.0, 2},  // angry: fast, high pitch, falling
    {1.05, 1.45, 180.0, 3},  // happy: brisk, tremolo
    {0.85, 1.15, 140.0, 0},  // neutral: mid, flat
    {0.55, 0.85, 100.0, 1},  // sad: slow, low pitch, rising
}};

}  // namespace

double ToySymbolFrequency(int symbol, const ToyCorpusConfig& cfg) {
  EMOAUG_CHECK(symbol >= 0 && symbol < cfg.alphabet, DataError,
               "symbol " << symbol << " out of alphabet " << cfg.alphabet);
  // Spread fundamentals between 700 Hz and ~5 kHz, clear of the pitch band.
  return 700.0 * std::pow(5000.0 / 700.0,
                          static_cast<double>(symbol) /
                              std::max(1, cfg.alphabet - 1));
}

Waveform SynthesizeToy(const ToyUtteranceSpec& spec, const ToyCorpusConfig& cfg) {
  EMOAUG_CHECK(!spec.content.empty(), DataError, "empty content");
  EMOAUG_CHECK(spec.style.rate >= 0.5 && spec.style.rate <= 2.0, DataError,
               "rate multiplier must be in [0.5, 2]");
  const int sr = cfg.sample_rate;
  const int64_t seg_len = std::llround(cfg.base_symbol_dur / spec.style.rate * sr);
  const int64_t total = seg_len * static_cast<int64_t>(spec.content.size());
  const int64_t ramp = std::min<int64_t>(seg_len / 4, sr / 100);  // 10 ms edges

  Waveform x;
  x.sample_rate = sr;
  x.samples.assign(total, 0.0);
  for (size_t s = 0; s < spec.content.size(); ++s) {
    const double f = ToySymbolFrequency(spec.content[s], cfg);
    const int64_t off = static_cast<int64_t>(s) * seg_len;
    for (int64_t i = 0; i < seg_len; ++i) {
      const double t = static_cast<double>(i) / sr;
      double v = cfg.symbol_amp * std::sin(2.0 * kPi * f * t) +
                 0.5 * cfg.symbol_amp * std::sin(2.0 * kPi * 1.37 * f * t);
      if (i < ramp) v *= static_cast<double>(i) / ramp;
      if (seg_len - 1 - i < ramp) v *= static_cast<double>(seg_len - 1 - i) / ramp;
      x.samples[off + i] = v;
    }
  }
  // Global envelope and continuous base-pitch tone.
  for (int64_t i = 0; i < total; ++i) {
    const double frac = static_cast<double>(i) / std::max<int64_t>(1, total - 1);
    const double t = static_cast<double>(i) / sr;
    x.samples[i] = x.samples[i] * Envelope(spec.style.envelope_id, frac) +
                   cfg.pitch_amp * std::sin(2.0 * kPi * spec.style.base_pitch * t);
  }
  return x;
}

ToyCorpus GenerateToyCorpus(const ToyCorpusConfig& cfg, uint64_t seed,
                            const std::string& out_dir) {
  EMOAUG_CHECK(cfg.n_speakers >= 1 && cfg.n_per_cell >= 1, ConfigError,
               "speaker and per-cell counts must be >= 1");
  EMOAUG_CHECK(cfg.per_emotion_counts.empty() ||
                   cfg.per_emotion_counts.size() == kEmotions.size(),
               ConfigError, "per_emotion_counts must have 4 entries");
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "wav");

  Rng rng(seed);
  std::uniform_int_distribution<int> n_sym(cfg.min_symbols, cfg.max_symbols);
  std::uniform_int_distribution<int> sym(0, cfg.alphabet - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  ToyCorpus corpus;
  int64_t utt_counter = 0;
  for (int spk = 0; spk < cfg.n_speakers; ++spk) {
    const double spk_pitch_factor = 0.9 + 0.07 * spk;
    for (size_t e = 0; e < kEmotions.size(); ++e) {
      const EmotionStyle& es = kEmotionStyles[e];
      const int cell_count = cfg.per_emotion_counts.empty()
                                 ? cfg.n_per_cell
                                 : cfg.per_emotion_counts[e];
      for (int i = 0; i < cell_count; ++i) {
        ToyUtteranceSpec spec;
        spec.speaker = "spk" + std::to_string(spk);
        spec.emotion = kEmotions[e];
        spec.session =
            "ses" + std::to_string(1 + static_cast<int>(utt_counter % cfg.n_sessions));
        spec.utt_id = spec.speaker + "_" + spec.emotion + "_" + std::to_string(i);
        const int len = n_sym(rng);
        for (int j = 0; j < len; ++j) spec.content.push_back(sym(rng));
        // Mostly within the emotion's band, occasionally anywhere in the
        // synthesizable range so the rate axis of the style space is covered
        // at every pitch (mirrors the envelope mixing below).
        spec.style.rate =
            unit(rng) < 0.75
                ? es.rate_lo + (es.rate_hi - es.rate_lo) * unit(rng)
                : 0.55 + (2.0 - 0.55) * unit(rng);
        spec.style.envelope_id =
            unit(rng) < 0.7 ? es.envelope : static_cast<int>(unit(rng) * 4) % 4;
        spec.style.base_pitch =
            es.base_pitch * spk_pitch_factor * (0.95 + 0.10 * unit(rng));

        Waveform x = SynthesizeToy(spec, cfg);
        const std::string wav_path =
            (fs::path(out_dir) / "wav" / (spec.utt_id + ".wav")).string();
        SaveWaveform(wav_path, x);

        UtteranceRecord rec;
        rec.utt_id = spec.utt_id;
        rec.audio_path = wav_path;
        rec.speaker = spec.speaker;
        rec.emotion = spec.emotion;
        rec.session = spec.session;
        rec.duration = x.DurationSeconds();
        corpus.manifest.push_back(rec);
        corpus.truth.emplace(spec.utt_id, std::move(spec));
        ++utt_counter;
      }
    }
  }
  SaveManifest((fs::path(out_dir) / "manifest.jsonl").string(), corpus.manifest);
  SaveToyTruth((fs::path(out_dir) / "truth.jsonl").string(), corpus.truth);
  return corpus;
}

void SaveToyTruth(const std::string& path,
                  const std::map<std::string, ToyUtteranceSpec>& truth) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write toy truth: " + path);
  for (const auto& [id, spec] : truth) {
    json j = {{"utt_id", id},
              {"content", spec.content},
              {"rate", spec.style.rate},
              {"envelope", spec.style.envelope_id},
              {"base_pitch", spec.style.base_pitch},
              {"speaker", spec.speaker},
              {"emotion", spec.emotion},
              {"session", spec.session}};
    os << j.dump() << "\n";
  }
}

std::map<std::string, ToyUtteranceSpec> LoadToyTruth(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read toy truth: " + path);
  std::map<std::string, ToyUtteranceSpec> truth;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    ToyUtteranceSpec spec;
    spec.utt_id = j.at("utt_id").get<std::string>();
    spec.content = j.at("content").get<std::vector<int>>();
    spec.style.rate = j.at("rate").get<double>();
    spec.style.envelope_id = j.at("envelope").get<int>();
    spec.style.base_pitch = j.at("base_pitch").get<double>();
    spec.speaker = j.at("speaker").get<std::string>();
    spec.emotion = j.at("emotion").get<std::string>();
    spec.session = j.at("session").get<std::string>();
    truth.emplace(spec.utt_id, std::move(spec));
  }
  return truth;
}

}  // namespace emoaug
