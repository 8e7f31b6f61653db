// emoaug/semantic_encoder.h

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

#ifndef EMOAUG_SEMANTIC_ENCODER_H_
#define EMOAUG_SEMANTIC_ENCODER_H_

#include <memory>
#include <vector>

#include "emoaug/kmeans.h"
#include "emoaug/layers.h"

namespace emoaug {

struct SemanticEncoderConfig {
  int vocab = 200;        // unit codebook size
  int embed_dim = 512;
  int conv_channels = 512;
  int conv_kernel = 5;    // same-length padding (kernel-1)/2
  int n_conv_layers = 3;
  int lstm_hidden = 256;  // BiLSTM output is 2x this
  double dropout = 0.1;

  int OutputDim() const { return 2 * lstm_hidden; }
};

// Maps a deduplicated unit sequence to contextual content vectors:
// embedding -> n x (Conv1d + BatchNorm + ReLU + dropout) -> BiLSTM.
// Output: OutputDim() x L.
class SemanticEncoder {
 public:
  SemanticEncoder(const SemanticEncoderConfig& cfg, Rng* rng);

  ad::Var Encode(const UnitSequence& u, Mode mode, Rng* rng);
  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const;
  const SemanticEncoderConfig& Config() const { return cfg_; }

 private:
  SemanticEncoderConfig cfg_;
  Embedding embed_;
  std::vector<Conv1d> convs_;
  std::vector<BatchNorm1d> bns_;
  BiLstm lstm_;
};

}  // namespace emoaug

#endif  // EMOAUG_SEMANTIC_ENCODER_H_
