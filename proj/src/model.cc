// src/model.cc

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

#include "emoaug/model.h"

namespace emoaug {

void ModelConfig::Resolve() {
  decoder.memory_dim = semantic.OutputDim() + style.embed_dim;
  decoder.n_mels = style.n_mels;
}

ModelConfig ModelConfig::Toy(int vocab, int n_mels) {
  ModelConfig cfg;
  cfg.semantic.vocab = vocab;
  cfg.semantic.embed_dim = 64;
  cfg.semantic.conv_channels = 64;
  cfg.semantic.lstm_hidden = 32;
  cfg.style.n_mels = n_mels;
  cfg.style.channels = 32;
  cfg.style.res2_scale = 4;
  cfg.style.se_bottleneck = 16;
  cfg.style.attention_channels = 16;
  cfg.style.embed_dim = 16;
  cfg.decoder.prenet_dim = 64;
  cfg.decoder.attention_rnn_dim = 128;
  cfg.decoder.decoder_rnn_dim = 128;
  cfg.decoder.attention_dim = 32;
  cfg.decoder.location_filters = 8;
  cfg.decoder.location_kernel = 15;
  cfg.Resolve();
  return cfg;
}

namespace {
ModelConfig Resolved(ModelConfig cfg) {
  cfg.Resolve();
  return cfg;
}
}  // namespace

EmoAugModel::EmoAugModel(ModelConfig cfg, uint64_t init_seed)
    : cfg_(Resolved(std::move(cfg))),
      sem_([&] {
        Rng rng(init_seed);
        return SemanticEncoder(cfg_.semantic, &rng);
      }()),
      style_([&] {
        Rng rng(init_seed + 1);
        return StyleEncoder(cfg_.style, &rng);
      }()),
      dec_([&] {
        Rng rng(init_seed + 2);
        return AttentionDecoder(cfg_.decoder, &rng);
      }()) {}

DecodeResult EmoAugModel::Reconstruct(const UnitSequence& units,
                                      const MelSpectrogram& style_mel,
                                      const MelSpectrogram& target_mel,
                                      double sampling_prob, Mode mode,
                                      Rng* rng) {
  ad::Var sem = sem_.Encode(units, mode, rng);
  ad::Var style = style_.Encode(style_mel, mode, rng);
  ad::Var memory = AttentionDecoder::Condition(sem, style);
  return dec_.DecodeTeacherForced(memory, target_mel.frames.transpose(),
                                  sampling_prob, mode, rng);
}

DecodeResult EmoAugModel::Transfer(const UnitSequence& units,
                                   const MelSpectrogram& reference_mel,
                                   Rng* rng) {
  ad::Var sem = sem_.Encode(units, Mode::kEval, rng);
  ad::Var style = style_.Encode(reference_mel, Mode::kEval, rng);
  ad::Var memory = AttentionDecoder::Condition(sem, style);
  return dec_.DecodeFree(memory, rng);
}

std::vector<NamedParam> EmoAugModel::Params() const {
  std::vector<NamedParam> out;
  sem_.CollectParams("sem", &out);
  style_.CollectParams("par", &out);
  dec_.CollectParams("dec", &out);
  return out;
}

std::vector<NamedParam> EmoAugModel::ParalinguisticParams() const {
  std::vector<NamedParam> out;
  style_.CollectParams("par", &out);
  return out;
}

void EmoAugModel::Save(const std::string& path) const {
  SaveParamMap(path, Params());
}

void EmoAugModel::Load(const std::string& path) {
  ApplyParamMap(LoadParamMap(path), Params());
}

}  // namespace emoaug
