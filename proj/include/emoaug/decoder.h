// emoaug/decoder.h

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

#ifndef EMOAUG_DECODER_H_
#define EMOAUG_DECODER_H_

#include <vector>

#include "emoaug/layers.h"

namespace emoaug {

struct DecoderConfig {
  int n_mels = 80;
  int memory_dim = 704;  // semantic width + style dim; set by the model
  int prenet_dim = 256;
  double prenet_dropout = 0.5;
  // Prenet dropout stays active at inference (Tacotron2 convention); decodes
  // remain reproducible because the RNG is seeded per decode.
  bool prenet_dropout_inference = true;
  int attention_rnn_dim = 1024;
  int decoder_rnn_dim = 1024;
  int attention_dim = 128;
  int location_filters = 32;
  int location_kernel = 31;
  double stop_threshold = 0.5;
  int max_len_factor = 30;  // free-running cap: factor * L frames
  // Free-running decode constraints. attention_window > 0 restricts each
  // step's attention to encoder positions [p, p + window], where p is the
  // previous step's attention argmax; this enforces monotonic alignment at
  // inference. The decode also ends once attention has dwelt on the final
  // encoder position for completion_dwell_factor times the average dwell
  // (plus completion_dwell_min frames), even if the stop gate never fires.
  int attention_window = 2;
  double completion_dwell_factor = 1.5;
  int completion_dwell_min = 3;
  // If attention dwells on one encoder position for more than max_dwell
  // consecutive frames during free-running decode, the window is pushed
  // forward one position; 0 disables the guard.
  int max_dwell = 80;
};

// Alignment-weighted summary of the conditioned encoder memory.
struct AttentionContext {
  ad::Var context;    // memory_dim x 1
  ad::Var alignment;  // L x 1, non-negative, sums to 1
};

struct DecodeResult {
  ad::Var mel;           // n_mels x T
  ad::Var stop_logits;   // 1 x T
  ad::Matrix alignment;  // T x L, row t = attention weights at step t
  // Per-step L x 1 alignment nodes, kept differentiable so training can add
  // an alignment-shape penalty. Filled by the teacher-forced decode only.
  std::vector<ad::Var> alignment_steps;
  bool truncated = false;
};

// Tacotron2-style autoregressive mel decoder with location-aware attention,
// conditioned on [semantic encoding ; broadcast style embedding].
class AttentionDecoder {
 public:
  AttentionDecoder(const DecoderConfig& cfg, Rng* rng);

  struct State {
    Lstm::State att_rnn;
    Lstm::State dec_rnn;
    ad::Var attn_weights;  // L x 1
    ad::Var attn_cum;      // L x 1
    ad::Var context;       // memory_dim x 1
    ad::Var prev_frame;    // n_mels x 1 (all-zero go-frame at t=0)
  };

  // Broadcast-concatenates the style vector onto every encoder step:
  // memory column j = [sem_j ; style].
  static ad::Var Condition(const ad::Var& sem, const ad::Var& style);

  State InitState(const ad::Var& memory) const;

  // V * memory, precomputed once per utterance.
  ad::Var ProcessMemory(const ad::Var& memory) const;

  // Location-aware attention for the current query state. When win_lo >= 0,
  // energies outside [win_lo, win_hi] are masked before the softmax.
  AttentionContext Attend(const State& state, const ad::Var& memory,
                          const ad::Var& processed_memory, int64_t win_lo = -1,
                          int64_t win_hi = -1) const;

  struct StepResult {
    ad::Var frame;       // n_mels x 1
    ad::Var stop_logit;  // 1 x 1
    ad::Var alignment;   // L x 1
  };
  StepResult Step(State* state, const ad::Var& memory,
                  const ad::Var& processed_memory, const ad::Var& prev_frame,
                  Mode mode, Rng* rng, int64_t win_lo = -1,
                  int64_t win_hi = -1) const;

  // Teacher forcing with optional scheduled sampling: each input frame is
  // the model's own previous output with probability sampling_prob.
  DecodeResult DecodeTeacherForced(const ad::Var& memory,
                                   const ad::Matrix& target_mel_ct,
                                   double sampling_prob, Mode mode,
                                   Rng* rng) const;

  // Free-running decode; stops when sigmoid(stop) > threshold or after
  // max_len_factor * L frames (result flagged truncated).
  DecodeResult DecodeFree(const ad::Var& memory, Rng* rng) const;

  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const;
  const DecoderConfig& Config() const { return cfg_; }

  // Exposed for attention weight surgery in tests.
  Conv1d& LocationConv() { return location_conv_; }

 private:
  ad::Var Prenet(const ad::Var& frame, Mode mode, Rng* rng) const;

  DecoderConfig cfg_;
  Linear prenet1_, prenet2_;
  Lstm att_rnn_, dec_rnn_;
  Linear query_layer_;     // attention_rnn_dim -> attention_dim
  Linear memory_layer_;    // memory_dim -> attention_dim
  Conv1d location_conv_;   // 2 -> location_filters, kernel location_kernel
  Linear location_dense_;  // location_filters -> attention_dim
  Linear energy_v_;        // attention_dim -> 1
  Linear proj_;            // decoder_rnn_dim + memory_dim -> n_mels
  Linear gate_;            // decoder_rnn_dim + memory_dim -> 1
};

}  // namespace emoaug

#endif  // EMOAUG_DECODER_H_
