// emoaug/style_encoder.h

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

#ifndef EMOAUG_STYLE_ENCODER_H_
#define EMOAUG_STYLE_ENCODER_H_

#include <memory>
#include <vector>

#include "emoaug/dsp.h"
#include "emoaug/layers.h"

namespace emoaug {

struct StyleEncoderConfig {
  int n_mels = 80;
  int channels = 512;        // block width, divisible by res2_scale
  int res2_scale = 8;
  int se_bottleneck = 128;
  int kernel = 3;
  std::vector<int> dilations = {2, 3, 4};  // one SE-Res2 block per entry
  int attention_channels = 128;  // pooling attention hidden width
  int embed_dim = 192;           // output style dimension D
};

// Squeeze-excitation Res2 block with a residual skip; input and output are
// channels x T.
class SeRes2Block {
 public:
  SeRes2Block(int channels, int kernel, int dilation, int scale,
              int se_bottleneck, Rng* rng);
  ad::Var Forward(const ad::Var& x, Mode mode, Rng* rng);
  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const;

 private:
  int channels_, scale_, width_;
  Conv1d conv_in_;
  BatchNorm1d bn_in_;
  std::vector<Conv1d> res2_convs_;  // scale-1 grouped convolutions
  Conv1d conv_out_;
  BatchNorm1d bn_out_;
  Linear se_fc1_, se_fc2_;
};

// Utterance-level style vector from a mel-spectrogram: stem conv, three
// SE-Res2 blocks whose outputs are concatenated into the aggregation conv,
// attentive statistics pooling, and a final projection to embed_dim.
class StyleEncoder {
 public:
  StyleEncoder(const StyleEncoderConfig& cfg, Rng* rng);

  // m has >= 2 frames (std over one frame is undefined).
  ad::Var Encode(const MelSpectrogram& m, Mode mode, Rng* rng);
  ad::Var EncodeFrames(const ad::Var& mel_ct, Mode mode, Rng* rng);

  // Attention-weighted per-channel mean and std stacked to 2C x 1.
  // Weights must be non-negative and sum to 1 along each row.
  static ad::Var AttentiveStats(const ad::Var& feats, const ad::Var& weights);

  // The pooling attention map (C x T, rows sum to 1) for a given
  // aggregated feature map; exposed for the pooling identity tests.
  ad::Var AttentionWeights(const ad::Var& agg, Mode mode, Rng* rng);
  ad::Var Aggregate(const ad::Var& mel_ct, Mode mode, Rng* rng);

  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const;
  const StyleEncoderConfig& Config() const { return cfg_; }

 private:
  StyleEncoderConfig cfg_;
  Conv1d stem_conv_;
  BatchNorm1d stem_bn_;
  std::vector<SeRes2Block> blocks_;
  Conv1d agg_conv_;
  Conv1d att_conv1_, att_conv2_;
  Linear out_fc_;
};

}  // namespace emoaug

#endif  // EMOAUG_STYLE_ENCODER_H_
