// src/semantic_encoder.cc

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

#include "emoaug/semantic_encoder.h"

namespace emoaug {

using ad::Var;

SemanticEncoder::SemanticEncoder(const SemanticEncoderConfig& cfg, Rng* rng)
    : cfg_(cfg), embed_(cfg.embed_dim, cfg.vocab, rng),
      lstm_(cfg.conv_channels, cfg.lstm_hidden, rng) {
  EMOAUG_CHECK(cfg.conv_kernel % 2 == 1, ConfigError,
               "conv kernel must be odd for same-length padding");
  int in_ch = cfg.embed_dim;
  for (int i = 0; i < cfg.n_conv_layers; ++i) {
    convs_.emplace_back(in_ch, cfg.conv_channels, cfg.conv_kernel, 1, rng);
    bns_.emplace_back(cfg.conv_channels);
    in_ch = cfg.conv_channels;
  }
}

Var SemanticEncoder::Encode(const UnitSequence& u, Mode mode, Rng* rng) {
  EMOAUG_CHECK(u.deduped, ContractError,
               "semantic encoder requires a deduplicated unit sequence");
  EMOAUG_CHECK(!u.units.empty(), DataError, "empty unit sequence");
  for (int v : u.units)
    EMOAUG_CHECK(v >= 0 && v < cfg_.vocab, DataError,
                 "unit label " << v << " out of vocab " << cfg_.vocab);

  Var x = embed_.Lookup(u.units);
  const bool train = mode == Mode::kTrain;
  for (size_t i = 0; i < convs_.size(); ++i) {
    x = convs_[i].Forward(x, mode, rng);
    x = bns_[i].Forward(x, mode, rng);
    x = ad::Relu(x);
    x = ad::Dropout(x, cfg_.dropout, rng, train);
  }
  x = lstm_.Forward(x, mode, rng);
  ad::CheckFinite(x, "semantic encoder output");
  return x;
}

void SemanticEncoder::CollectParams(const std::string& prefix,
                                    std::vector<NamedParam>* out) const {
  embed_.CollectParams(prefix + ".embed", out);
  for (size_t i = 0; i < convs_.size(); ++i) {
    const std::string p = prefix + ".conv" + std::to_string(i);
    convs_[i].CollectParams(p, out);
    bns_[i].CollectParams(p + ".bn", out);
  }
  lstm_.CollectParams(prefix + ".bilstm", out);
}

}  // namespace emoaug
