// src/decoder.cc

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

#include "emoaug/decoder.h"

#include <cmath>

namespace emoaug {

using ad::Matrix;
using ad::Var;

AttentionDecoder::AttentionDecoder(const DecoderConfig& cfg, Rng* rng)
    : cfg_(cfg),
      prenet1_(cfg.n_mels, cfg.prenet_dim, rng),
      prenet2_(cfg.prenet_dim, cfg.prenet_dim, rng),
      att_rnn_(cfg.prenet_dim + cfg.memory_dim, cfg.attention_rnn_dim, rng),
      dec_rnn_(cfg.attention_rnn_dim + cfg.memory_dim, cfg.decoder_rnn_dim, rng),
      query_layer_(cfg.attention_rnn_dim, cfg.attention_dim, rng),
      memory_layer_(cfg.memory_dim, cfg.attention_dim, rng),
      location_conv_(2, cfg.location_filters, cfg.location_kernel, 1, rng),
      location_dense_(cfg.location_filters, cfg.attention_dim, rng),
      energy_v_(cfg.attention_dim, 1, rng),
      proj_(cfg.decoder_rnn_dim + cfg.memory_dim, cfg.n_mels, rng),
      gate_(cfg.decoder_rnn_dim + cfg.memory_dim, 1, rng) {
  EMOAUG_CHECK(cfg.location_kernel % 2 == 1, ConfigError,
               "location kernel must be odd");
}

Var AttentionDecoder::Condition(const Var& sem, const Var& style) {
  EMOAUG_CHECK(style->Cols() == 1, ShapeError, "style must be a column vector");
  const int64_t L = sem->Cols();
  // Broadcast the style vector across all L encoder steps. Implemented as
  // style * ones(1, L) so gradients flow back into the style embedding.
  Var ones = ad::Constant(Matrix::Ones(1, L));
  return ad::ConcatRows({sem, ad::MatMul(style, ones)});
}

AttentionDecoder::State AttentionDecoder::InitState(const Var& memory) const {
  const int64_t L = memory->Cols();
  State s;
  s.att_rnn = att_rnn_.InitialState();
  s.dec_rnn = dec_rnn_.InitialState();
  s.attn_weights = ad::Constant(Matrix::Zero(L, 1));
  s.attn_cum = ad::Constant(Matrix::Zero(L, 1));
  s.context = ad::Constant(Matrix::Zero(cfg_.memory_dim, 1));
  s.prev_frame = ad::Constant(Matrix::Zero(cfg_.n_mels, 1));
  return s;
}

Var AttentionDecoder::ProcessMemory(const Var& memory) const {
  EMOAUG_CHECK(memory->Rows() == cfg_.memory_dim, ShapeError,
               "memory dim " << memory->Rows() << " != configured "
                             << cfg_.memory_dim);
  return ad::MatMul(memory_layer_.weight, memory);  // attention_dim x L
}

AttentionContext AttentionDecoder::Attend(const State& state, const Var& memory,
                                          const Var& processed_memory,
                                          int64_t win_lo,
                                          int64_t win_hi) const {
  // Location features from previous and cumulative alignments.
  Var loc_in = ad::Transpose(
      ad::ConcatCols({state.attn_weights, state.attn_cum}));  // 2 x L
  Var f = const_cast<Conv1d&>(location_conv_)
              .Forward(loc_in, Mode::kEval, nullptr);          // F x L
  Var loc = ad::AddColwise(ad::MatMul(location_dense_.weight, f),
                           location_dense_.bias);              // att x L

  Var query = ad::AddColwise(
      ad::MatMul(query_layer_.weight, state.att_rnn.h), query_layer_.bias);

  Var energies = ad::AddColwise(
      ad::MatMul(energy_v_.weight,
                 ad::Tanh(ad::AddColwise(ad::Add(processed_memory, loc), query))),
      energy_v_.bias);  // 1 x L

  if (win_lo >= 0) {
    const int64_t L = memory->Cols();
    Matrix mask = Matrix::Constant(1, L, -1e30);
    mask.block(0, win_lo, 1, std::min(win_hi, L - 1) - win_lo + 1).setZero();
    energies = ad::Add(energies, ad::Constant(mask));
  }

  Var align = ad::SoftmaxCols(ad::Transpose(energies));  // L x 1
  Var context = ad::MatMul(memory, align);               // memory_dim x 1
  return {context, align};
}

Var AttentionDecoder::Prenet(const Var& frame, Mode mode, Rng* rng) const {
  const bool active =
      mode == Mode::kTrain || cfg_.prenet_dropout_inference;
  Var h = ad::Relu(const_cast<Linear&>(prenet1_).Forward(frame, mode, rng));
  h = ad::Dropout(h, cfg_.prenet_dropout, rng, active);
  h = ad::Relu(const_cast<Linear&>(prenet2_).Forward(h, mode, rng));
  return ad::Dropout(h, cfg_.prenet_dropout, rng, active);
}

AttentionDecoder::StepResult AttentionDecoder::Step(
    State* state, const Var& memory, const Var& processed_memory,
    const Var& prev_frame, Mode mode, Rng* rng, int64_t win_lo,
    int64_t win_hi) const {
  Var pre = Prenet(prev_frame, mode, rng);

  state->att_rnn =
      att_rnn_.Step(ad::ConcatRows({pre, state->context}), state->att_rnn);

  AttentionContext att = Attend(*state, memory, processed_memory, win_lo,
                                win_hi);
  state->context = att.context;
  state->attn_weights = att.alignment;
  state->attn_cum = ad::Add(state->attn_cum, att.alignment);

  state->dec_rnn = dec_rnn_.Step(
      ad::ConcatRows({state->att_rnn.h, state->context}), state->dec_rnn);

  Var out_in = ad::ConcatRows({state->dec_rnn.h, state->context});
  Var frame = const_cast<Linear&>(proj_).Forward(out_in, mode, rng);
  Var stop = const_cast<Linear&>(gate_).Forward(out_in, mode, rng);
  EMOAUG_CHECK(frame->value.allFinite() && stop->value.allFinite(),
               DivergenceError, "NaN/Inf in decoder output frame");
  state->prev_frame = frame;
  return {frame, stop, att.alignment};
}

DecodeResult AttentionDecoder::DecodeTeacherForced(const Var& memory,
                                                   const Matrix& target_mel_ct,
                                                   double sampling_prob,
                                                   Mode mode, Rng* rng) const {
  EMOAUG_CHECK(target_mel_ct.rows() == cfg_.n_mels, ShapeError,
               "target must be n_mels x T");
  const int64_t t_len = target_mel_ct.cols();
  EMOAUG_CHECK(t_len >= 1, DataError, "empty target");
  Var processed = ProcessMemory(memory);
  State state = InitState(memory);

  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::vector<Var> frames, stops;
  DecodeResult res;
  res.alignment.resize(t_len, memory->Cols());
  Var prev = state.prev_frame;  // go-frame
  for (int64_t t = 0; t < t_len; ++t) {
    StepResult sr = Step(&state, memory, processed, prev, mode, rng);
    frames.push_back(sr.frame);
    stops.push_back(sr.stop_logit);
    res.alignment.row(t) = sr.alignment->value.col(0).transpose();
    res.alignment_steps.push_back(sr.alignment);
    const bool use_model =
        sampling_prob > 0.0 && rng != nullptr && coin(*rng) < sampling_prob;
    prev = use_model ? sr.frame
                     : ad::Constant(target_mel_ct.col(t));
  }
  res.mel = ad::ConcatCols(frames);
  res.stop_logits = ad::ConcatCols(stops);
  return res;
}

DecodeResult AttentionDecoder::DecodeFree(const Var& memory, Rng* rng) const {
  const int64_t L = memory->Cols();
  const int64_t max_len = static_cast<int64_t>(cfg_.max_len_factor) * L;
  Var processed = ProcessMemory(memory);
  State state = InitState(memory);

  std::vector<Var> frames, stops;
  std::vector<Matrix> aligns;
  Var prev = state.prev_frame;
  bool stopped = false;
  const bool windowed = cfg_.attention_window > 0;
  int64_t pos = 0;            // previous attention argmax
  int64_t dwell = 0;          // consecutive frames spent at pos
  int64_t entered_last = -1;  // step at which attention reached position L-1
  for (int64_t t = 0; t < max_len; ++t) {
    const bool push_on =
        cfg_.max_dwell > 0 && dwell >= cfg_.max_dwell && pos < L - 1;
    const int64_t win_lo = windowed ? (push_on ? pos + 1 : pos) : -1;
    const int64_t win_hi =
        windowed ? std::min<int64_t>(L - 1, pos + cfg_.attention_window) : -1;
    StepResult sr =
        Step(&state, memory, processed, prev, Mode::kEval, rng, win_lo, win_hi);
    frames.push_back(sr.frame);
    stops.push_back(sr.stop_logit);
    aligns.push_back(sr.alignment->value);
    prev = sr.frame;
    Eigen::Index arg = 0;
    sr.alignment->value.col(0).maxCoeff(&arg);
    dwell = (arg == pos) ? dwell + 1 : 0;
    pos = arg;
    if (pos == L - 1 && entered_last < 0) entered_last = t;
    const double p = 1.0 / (1.0 + std::exp(-sr.stop_logit->value(0, 0)));
    if (p > cfg_.stop_threshold) {
      stopped = true;
      break;
    }
    // Completion rule: once the final encoder position has been attended for
    // longer than a typical dwell, the content is exhausted and we stop even
    // without a gate firing.
    if (entered_last >= 0) {
      const double avg_dwell =
          static_cast<double>(entered_last) / std::max<int64_t>(L - 1, 1);
      const int64_t allowed =
          static_cast<int64_t>(cfg_.completion_dwell_factor * avg_dwell) +
          cfg_.completion_dwell_min;
      if (t - entered_last >= allowed) {
        stopped = true;
        break;
      }
    }
  }
  DecodeResult res;
  res.mel = ad::ConcatCols(frames);
  res.stop_logits = ad::ConcatCols(stops);
  res.truncated = !stopped;
  res.alignment.resize(static_cast<int64_t>(aligns.size()), memory->Cols());
  for (size_t t = 0; t < aligns.size(); ++t)
    res.alignment.row(t) = aligns[t].col(0).transpose();
  return res;
}

void AttentionDecoder::CollectParams(const std::string& prefix,
                                     std::vector<NamedParam>* out) const {
  prenet1_.CollectParams(prefix + ".prenet1", out);
  prenet2_.CollectParams(prefix + ".prenet2", out);
  att_rnn_.CollectParams(prefix + ".att_rnn", out);
  dec_rnn_.CollectParams(prefix + ".dec_rnn", out);
  query_layer_.CollectParams(prefix + ".query", out);
  memory_layer_.CollectParams(prefix + ".memory", out);
  location_conv_.CollectParams(prefix + ".loc_conv", out);
  location_dense_.CollectParams(prefix + ".loc_dense", out);
  energy_v_.CollectParams(prefix + ".v", out);
  proj_.CollectParams(prefix + ".proj", out);
  gate_.CollectParams(prefix + ".gate", out);
}

}  // namespace emoaug
