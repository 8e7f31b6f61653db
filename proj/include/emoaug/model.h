// emoaug/model.h

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

#ifndef EMOAUG_MODEL_H_
#define EMOAUG_MODEL_H_

#include <memory>
#include <string>

#include "emoaug/decoder.h"
#include "emoaug/semantic_encoder.h"
#include "emoaug/style_encoder.h"

namespace emoaug {

struct ModelConfig {
  SemanticEncoderConfig semantic;
  StyleEncoderConfig style;
  DecoderConfig decoder;

  // Forces cross-module dimensions consistent (memory_dim, n_mels).
  void Resolve();

  // Small dimensions for toy-corpus experiments.
  static ModelConfig Toy(int vocab, int n_mels);
};

// The full style-transfer model: semantic encoder + paralinguistic (style)
// encoder + attention decoder.
class EmoAugModel {
 public:
  EmoAugModel(ModelConfig cfg, uint64_t init_seed);

  // Teacher-forced reconstruction of target_mel conditioned on the style of
  // style_mel (the same utterance during training).
  DecodeResult Reconstruct(const UnitSequence& units,
                           const MelSpectrogram& style_mel,
                           const MelSpectrogram& target_mel,
                           double sampling_prob, Mode mode, Rng* rng);

  // Free-running style transfer: decode source units under a reference style.
  DecodeResult Transfer(const UnitSequence& units,
                        const MelSpectrogram& reference_mel, Rng* rng);

  ad::Var EncodeStyle(const MelSpectrogram& m, Mode mode, Rng* rng) {
    return style_.Encode(m, mode, rng);
  }

  std::vector<NamedParam> Params() const;
  // Parameters of the paralinguistic encoder only (the low-LR group).
  std::vector<NamedParam> ParalinguisticParams() const;

  void Save(const std::string& path) const;
  void Load(const std::string& path);

  const ModelConfig& Config() const { return cfg_; }
  SemanticEncoder& Semantic() { return sem_; }
  StyleEncoder& Style() { return style_; }
  AttentionDecoder& Decoder() { return dec_; }

 private:
  ModelConfig cfg_;
  SemanticEncoder sem_;
  StyleEncoder style_;
  AttentionDecoder dec_;
};

}  // namespace emoaug

#endif  // EMOAUG_MODEL_H_
