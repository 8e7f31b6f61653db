// emoaug/trainer.h

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

#ifndef EMOAUG_TRAINER_H_
#define EMOAUG_TRAINER_H_

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "emoaug/model.h"

namespace emoaug {

struct TrainConfig {
  double base_lr = 1e-3;
  double paralinguistic_lr = 1e-4;  // 10x smaller than base_lr
  double finetune_lr = 1e-5;
  double weight_decay = 1e-6;
  double decay_factor = 0.9;
  int decay_every = 5000;
  double grad_clip = 1.0;
  double gate_pos_weight = 5.0;
  // Guided attention: penalize alignment mass far from the diagonal
  // (weight matrix 1 - exp(-(l/L - t/T)^2 / (2 sigma^2))). Stabilizes
  // attention learning; 0 disables.
  double guided_attention_weight = 0.2;
  double guided_attention_sigma = 0.2;
  // Scheduled sampling: linear ramp 0 -> sampling_max over ramp iterations.
  double sampling_max = 0.3;
  int64_t sampling_ramp_iters = 50000;
  int early_stop_patience = 10;  // epochs without validation improvement
  int batch_size = 16;
  int max_epochs = 200;
  uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void Validate() const;
};

enum class LrGroup { kMain, kParalinguistic };

// Closed-form schedule: base * decay_factor^floor(iter / decay_every).
double LrAt(int64_t iter, const TrainConfig& cfg, LrGroup group);
double SamplingProbAt(int64_t iter, const TrainConfig& cfg);

struct TrainItem {
  std::string utt_id;
  UnitSequence units;  // deduplicated
  MelSpectrogram mel;  // reconstruction target and training style source
};

struct TrainState {
  int64_t iteration = 0;
  double best_val_loss = std::numeric_limits<double>::infinity();
  int patience_counter = 0;
  int epoch = 0;
};

struct FitResult {
  double best_val_loss = 0.0;
  int epochs_run = 0;
  bool early_stopped = false;
};

// Reconstruction loss pieces, exposed for the loss oracle tests.
double MseOnly(const ad::Matrix& pred, const ad::Matrix& target);

class Trainer {
 public:
  // When flat_lr is set (fine-tuning), every group uses that rate with no
  // decay schedule.
  Trainer(EmoAugModel* model, TrainConfig cfg,
          std::optional<double> flat_lr = std::nullopt);

  // Loss of one utterance: teacher-forced MSE plus stop-gate BCE.
  ad::Var ItemLoss(const TrainItem& item, double sampling_prob, Mode mode,
                   Rng* rng);

  // One optimizer update over a batch (gradient accumulation across items).
  // Returns the mean per-item loss.
  double TrainStep(const std::vector<const TrainItem*>& batch);

  double EvalLoss(const std::vector<TrainItem>& items);

  // Epoch loop with shuffling, per-epoch validation, early stopping, and
  // best-checkpoint saving (atomic). csv_log gets one line per epoch:
  // iter,epoch,train_loss,val_loss,lr_main,lr_paralinguistic.
  FitResult Fit(const std::vector<TrainItem>& train,
                const std::vector<TrainItem>& val,
                const std::string& checkpoint_path,
                const std::string& csv_log_path = "");

  double CurrentLr(LrGroup group) const;
  const TrainState& State() const { return state_; }
  TrainState* MutableState() { return &state_; }

  // Splits off a validation set of val_size utterances (falling back to 10%
  // with a warning when the corpus is smaller), deterministically by seed.
  static void SplitValidation(std::vector<TrainItem> all, int64_t val_size,
                              uint64_t seed, std::vector<TrainItem>* train,
                              std::vector<TrainItem>* val);

 private:
  struct AdamSlot {
    ad::Matrix m, v;
  };

  void ApplyUpdate(int64_t batch_items);

  EmoAugModel* model_;
  TrainConfig cfg_;
  std::optional<double> flat_lr_;
  TrainState state_;
  Rng rng_;
  std::vector<NamedParam> params_;
  std::unordered_map<ad::Node*, AdamSlot> slots_;
  std::unordered_map<ad::Node*, LrGroup> groups_;
  int64_t adam_t_ = 0;
};

}  // namespace emoaug

#endif  // EMOAUG_TRAINER_H_
