// src/style_encoder.cc

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

#include "emoaug/style_encoder.h"

namespace emoaug {

using ad::Var;

SeRes2Block::SeRes2Block(int channels, int kernel, int dilation, int scale,
                         int se_bottleneck, Rng* rng)
    : channels_(channels),
      scale_(scale),
      width_(channels / scale),
      conv_in_(channels, channels, 1, 1, rng),
      bn_in_(channels),
      conv_out_(channels, channels, 1, 1, rng),
      bn_out_(channels),
      se_fc1_(channels, se_bottleneck, rng),
      se_fc2_(se_bottleneck, channels, rng) {
  EMOAUG_CHECK(channels % scale == 0, ConfigError,
               "channels " << channels << " not divisible by scale " << scale);
  for (int i = 0; i < scale - 1; ++i)
    res2_convs_.emplace_back(width_, width_, kernel, dilation, rng);
}

Var SeRes2Block::Forward(const Var& x, Mode mode, Rng* rng) {
  Var h = ad::Relu(bn_in_.Forward(conv_in_.Forward(x, mode, rng), mode, rng));

  // Hierarchical multi-scale convolutions over channel groups: the first
  // group passes through, each later group is convolved after adding the
  // previous group's output.
  std::vector<Var> groups(scale_);
  for (int i = 0; i < scale_; ++i)
    groups[i] = ad::SliceRows(h, static_cast<int64_t>(i) * width_, width_);
  std::vector<Var> outs(scale_);
  outs[0] = groups[0];
  for (int i = 1; i < scale_; ++i) {
    Var in = i == 1 ? groups[i] : ad::Add(groups[i], outs[i - 1]);
    outs[i] = ad::Relu(res2_convs_[i - 1].Forward(in, mode, rng));
  }
  Var y = ad::ConcatRows(outs);

  y = ad::Relu(bn_out_.Forward(conv_out_.Forward(y, mode, rng), mode, rng));

  // Squeeze-excitation channel gating.
  Var z = ad::MeanCols(y);
  Var s = ad::Sigmoid(
      se_fc2_.Forward(ad::Relu(se_fc1_.Forward(z, mode, rng)), mode, rng));
  y = ad::MulColwise(y, s);

  return ad::Add(x, y);
}

void SeRes2Block::CollectParams(const std::string& prefix,
                                std::vector<NamedParam>* out) const {
  conv_in_.CollectParams(prefix + ".conv_in", out);
  bn_in_.CollectParams(prefix + ".bn_in", out);
  for (size_t i = 0; i < res2_convs_.size(); ++i)
    res2_convs_[i].CollectParams(prefix + ".res2_" + std::to_string(i), out);
  conv_out_.CollectParams(prefix + ".conv_out", out);
  bn_out_.CollectParams(prefix + ".bn_out", out);
  se_fc1_.CollectParams(prefix + ".se_fc1", out);
  se_fc2_.CollectParams(prefix + ".se_fc2", out);
}

StyleEncoder::StyleEncoder(const StyleEncoderConfig& cfg, Rng* rng)
    : cfg_(cfg),
      stem_conv_(cfg.n_mels, cfg.channels, 5, 1, rng),
      stem_bn_(cfg.channels),
      agg_conv_(static_cast<int>(cfg.dilations.size()) * cfg.channels,
                static_cast<int>(cfg.dilations.size()) * cfg.channels, 1, 1, rng),
      att_conv1_(static_cast<int>(cfg.dilations.size()) * cfg.channels,
                 cfg.attention_channels, 1, 1, rng),
      att_conv2_(cfg.attention_channels,
                 static_cast<int>(cfg.dilations.size()) * cfg.channels, 1, 1, rng),
      out_fc_(2 * static_cast<int>(cfg.dilations.size()) * cfg.channels,
              cfg.embed_dim, rng) {
  for (int d : cfg.dilations)
    blocks_.emplace_back(cfg.channels, cfg.kernel, d, cfg.res2_scale,
                         cfg.se_bottleneck, rng);
}

Var StyleEncoder::Aggregate(const Var& mel_ct, Mode mode, Rng* rng) {
  EMOAUG_CHECK(mel_ct->Rows() == cfg_.n_mels, ShapeError,
               "style encoder expects " << cfg_.n_mels << " mel rows, got "
                                        << mel_ct->Rows());
  EMOAUG_CHECK(mel_ct->Cols() >= 2, DataError,
               "style encoder needs >= 2 frames, got " << mel_ct->Cols());
  Var x = ad::Relu(stem_conv_.Forward(mel_ct, mode, rng));
  x = stem_bn_.Forward(x, mode, rng);
  // Residual connections deliver every block's output to aggregation.
  std::vector<Var> block_outs;
  for (auto& b : blocks_) {
    x = b.Forward(x, mode, rng);
    block_outs.push_back(x);
  }
  return ad::Relu(agg_conv_.Forward(ad::ConcatRows(block_outs), mode, rng));
}

Var StyleEncoder::AttentionWeights(const Var& agg, Mode mode, Rng* rng) {
  Var a = ad::Tanh(att_conv1_.Forward(agg, mode, rng));
  a = att_conv2_.Forward(a, mode, rng);
  return ad::SoftmaxRows(a);  // per channel over time
}

Var StyleEncoder::AttentiveStats(const Var& feats, const Var& weights) {
  EMOAUG_CHECK(feats->Rows() == weights->Rows() && feats->Cols() == weights->Cols(),
               ShapeError, "stats pooling shape mismatch");
  const double t_len = static_cast<double>(feats->Cols());
  Var mu = ad::Scale(ad::MeanCols(ad::CMul(weights, feats)), t_len);
  Var ex2 = ad::Scale(ad::MeanCols(ad::CMul(weights, ad::CMul(feats, feats))),
                      t_len);
  // Clamp tiny negative variances from cancellation before the sqrt.
  Var var = ad::Relu(ad::Sub(ex2, ad::CMul(mu, mu)));
  return ad::ConcatRows({mu, ad::Sqrt(var)});
}

Var StyleEncoder::EncodeFrames(const Var& mel_ct, Mode mode, Rng* rng) {
  Var agg = Aggregate(mel_ct, mode, rng);
  Var w = AttentionWeights(agg, mode, rng);
  Var pooled = AttentiveStats(agg, w);
  Var style = out_fc_.Forward(pooled, mode, rng);
  ad::CheckFinite(style, "style encoder output");
  return style;
}

Var StyleEncoder::Encode(const MelSpectrogram& m, Mode mode, Rng* rng) {
  return EncodeFrames(ad::Constant(m.frames.transpose()), mode, rng);
}

void StyleEncoder::CollectParams(const std::string& prefix,
                                 std::vector<NamedParam>* out) const {
  stem_conv_.CollectParams(prefix + ".stem", out);
  stem_bn_.CollectParams(prefix + ".stem.bn", out);
  for (size_t i = 0; i < blocks_.size(); ++i)
    blocks_[i].CollectParams(prefix + ".block" + std::to_string(i), out);
  agg_conv_.CollectParams(prefix + ".agg", out);
  att_conv1_.CollectParams(prefix + ".att1", out);
  att_conv2_.CollectParams(prefix + ".att2", out);
  out_fc_.CollectParams(prefix + ".out", out);
}

}  // namespace emoaug
