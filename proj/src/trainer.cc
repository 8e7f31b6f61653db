// src/trainer.cc

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

#include "emoaug/trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

namespace emoaug {

using ad::Matrix;
using ad::Var;

void TrainConfig::Validate() const {
  EMOAUG_CHECK(base_lr > 0 && paralinguistic_lr > 0 && finetune_lr > 0,
               ConfigError, "learning rates must be positive");
  EMOAUG_CHECK(decay_factor > 0 && decay_factor <= 1, ConfigError,
               "decay_factor must be in (0, 1]");
  EMOAUG_CHECK(decay_every > 0 && batch_size > 0 && max_epochs > 0, ConfigError,
               "decay_every, batch_size, max_epochs must be positive");
  EMOAUG_CHECK(grad_clip > 0, ConfigError, "grad_clip must be positive");
}

double LrAt(int64_t iter, const TrainConfig& cfg, LrGroup group) {
  EMOAUG_CHECK(iter >= 0, ContractError, "iteration must be >= 0");
  const double base =
      group == LrGroup::kMain ? cfg.base_lr : cfg.paralinguistic_lr;
  return base * std::pow(cfg.decay_factor, iter / cfg.decay_every);
}

double SamplingProbAt(int64_t iter, const TrainConfig& cfg) {
  if (cfg.sampling_ramp_iters <= 0) return cfg.sampling_max;
  const double frac =
      std::min(1.0, static_cast<double>(iter) / cfg.sampling_ramp_iters);
  return cfg.sampling_max * frac;
}

double MseOnly(const Matrix& pred, const Matrix& target) {
  EMOAUG_CHECK(pred.rows() == target.rows() && pred.cols() == target.cols(),
               ContractError, "reconstruction loss requires equal shapes");
  return (pred - target).squaredNorm() / static_cast<double>(pred.size());
}

Trainer::Trainer(EmoAugModel* model, TrainConfig cfg,
                 std::optional<double> flat_lr)
    : model_(model), cfg_(cfg), flat_lr_(flat_lr), rng_(cfg.seed) {
  cfg_.Validate();
  params_ = model_->Params();
  std::unordered_map<ad::Node*, bool> is_par;
  for (const auto& p : model_->ParalinguisticParams())
    is_par[p.var.get()] = true;
  for (const auto& p : params_) {
    if (!p.var->requires_grad) continue;  // running stats buffers
    slots_[p.var.get()] = {Matrix::Zero(p.var->Rows(), p.var->Cols()),
                           Matrix::Zero(p.var->Rows(), p.var->Cols())};
    groups_[p.var.get()] =
        is_par.count(p.var.get()) ? LrGroup::kParalinguistic : LrGroup::kMain;
  }
}

double Trainer::CurrentLr(LrGroup group) const {
  if (flat_lr_) return *flat_lr_;
  return LrAt(state_.iteration, cfg_, group);
}

Var Trainer::ItemLoss(const TrainItem& item, double sampling_prob, Mode mode,
                      Rng* rng) {
  DecodeResult res = model_->Reconstruct(item.units, item.mel, item.mel,
                                         sampling_prob, mode, rng);
  const Matrix target = item.mel.frames.transpose();
  Var mse = ad::MseLoss(res.mel, target);
  Matrix stop_target = Matrix::Zero(1, target.cols());
  stop_target(0, target.cols() - 1) = 1.0;
  Var bce = ad::BceWithLogits(res.stop_logits, stop_target, cfg_.gate_pos_weight);
  Var loss = ad::Add(mse, bce);
  if (cfg_.guided_attention_weight > 0 && !res.alignment_steps.empty()) {
    const int64_t T = static_cast<int64_t>(res.alignment_steps.size());
    const int64_t L = res.alignment_steps[0]->Rows();
    const double two_sigma_sq =
        2.0 * cfg_.guided_attention_sigma * cfg_.guided_attention_sigma;
    Var acc;
    for (int64_t t = 0; t < T; ++t) {
      Matrix w(1, L);
      for (int64_t l = 0; l < L; ++l) {
        const double d = static_cast<double>(l) / L - static_cast<double>(t) / T;
        w(0, l) = 1.0 - std::exp(-d * d / two_sigma_sq);
      }
      Var term = ad::MatMul(ad::Constant(w), res.alignment_steps[t]);
      acc = acc ? ad::Add(acc, term) : term;
    }
    loss = ad::Add(loss, ad::Scale(acc, cfg_.guided_attention_weight /
                                            static_cast<double>(T)));
  }
  return loss;
}

double Trainer::TrainStep(const std::vector<const TrainItem*>& batch) {
  EMOAUG_CHECK(!batch.empty(), ContractError, "empty batch");
  std::vector<Var> vars;
  for (const auto& p : params_) vars.push_back(p.var);
  ad::ZeroGrad(vars);

  const double p_sample = SamplingProbAt(state_.iteration, cfg_);
  double total = 0.0;
  for (const TrainItem* item : batch) {
    Var loss = ItemLoss(*item, p_sample, Mode::kTrain, &rng_);
    const double lv = loss->value(0, 0);
    EMOAUG_CHECK(std::isfinite(lv), DivergenceError, "NaN/Inf training loss");
    total += lv;
    ad::Backward(loss);
  }
  ApplyUpdate(static_cast<int64_t>(batch.size()));
  ++state_.iteration;
  return total / static_cast<double>(batch.size());
}

void Trainer::ApplyUpdate(int64_t batch_items) {
  // Average accumulated gradients, add weight decay, clip by global norm.
  double sq_norm = 0.0;
  for (auto& [node, slot] : slots_) {
    if (node->grad.size() == 0)
      node->grad = Matrix::Zero(node->Rows(), node->Cols());
    node->grad /= static_cast<double>(batch_items);
    node->grad += cfg_.weight_decay * node->value;
    sq_norm += node->grad.squaredNorm();
  }
  const double norm = std::sqrt(sq_norm);
  const double clip_scale = norm > cfg_.grad_clip ? cfg_.grad_clip / norm : 1.0;

  ++adam_t_;
  const double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
  const double bc1 = 1.0 - std::pow(b1, adam_t_);
  const double bc2 = 1.0 - std::pow(b2, adam_t_);
  for (auto& [node, slot] : slots_) {
    const Matrix g = node->grad * clip_scale;
    slot.m = b1 * slot.m + (1.0 - b1) * g;
    slot.v = b2 * slot.v + (1.0 - b2) * g.cwiseProduct(g);
    const double lr = CurrentLr(groups_[node]);
    node->value.array() -=
        lr * (slot.m.array() / bc1) /
        ((slot.v.array() / bc2).sqrt() + cfg_.adam_eps);
  }
}

double Trainer::EvalLoss(const std::vector<TrainItem>& items) {
  EMOAUG_CHECK(!items.empty(), DataError, "empty eval set");
  double total = 0.0;
  for (const auto& item : items) {
    Rng rng(cfg_.seed);  // fixed seed so eval is deterministic
    Var loss = ItemLoss(item, 0.0, Mode::kEval, &rng);
    total += loss->value(0, 0);
  }
  return total / static_cast<double>(items.size());
}

FitResult Trainer::Fit(const std::vector<TrainItem>& train,
                       const std::vector<TrainItem>& val,
                       const std::string& checkpoint_path,
                       const std::string& csv_log_path) {
  EMOAUG_CHECK(!train.empty(), DataError, "empty training set");
  std::ofstream log;
  if (!csv_log_path.empty()) {
    log.open(csv_log_path);
    log << "iter,epoch,train_loss,val_loss,lr_main,lr_paralinguistic\n";
  }

  std::vector<const TrainItem*> order;
  for (const auto& t : train) order.push_back(&t);

  FitResult result;
  for (int epoch = 0; epoch < cfg_.max_epochs; ++epoch) {
    state_.epoch = epoch;
    std::shuffle(order.begin(), order.end(), rng_);
    double epoch_loss = 0.0;
    int64_t n_batches = 0;
    for (size_t off = 0; off < order.size(); off += cfg_.batch_size) {
      const size_t end = std::min(order.size(), off + cfg_.batch_size);
      std::vector<const TrainItem*> batch(order.begin() + off,
                                          order.begin() + end);
      epoch_loss += TrainStep(batch);
      ++n_batches;
    }
    epoch_loss /= std::max<int64_t>(1, n_batches);

    const double val_loss = val.empty() ? epoch_loss : EvalLoss(val);
    if (log.is_open()) {
      log << state_.iteration << "," << epoch << "," << epoch_loss << ","
          << val_loss << "," << CurrentLr(LrGroup::kMain) << ","
          << CurrentLr(LrGroup::kParalinguistic) << "\n";
      log.flush();
    }

    result.epochs_run = epoch + 1;
    if (val_loss < state_.best_val_loss) {
      state_.best_val_loss = val_loss;
      state_.patience_counter = 0;
      if (!checkpoint_path.empty()) model_->Save(checkpoint_path);
    } else if (++state_.patience_counter >= cfg_.early_stop_patience) {
      result.early_stopped = true;
      break;
    }
  }
  // Restore the best checkpoint so the caller never sees a worse model.
  if (!checkpoint_path.empty() &&
      std::isfinite(state_.best_val_loss)) {
    model_->Load(checkpoint_path);
  }
  result.best_val_loss = state_.best_val_loss;
  return result;
}

void Trainer::SplitValidation(std::vector<TrainItem> all, int64_t val_size,
                              uint64_t seed, std::vector<TrainItem>* train,
                              std::vector<TrainItem>* val) {
  EMOAUG_CHECK(!all.empty(), DataError, "empty corpus");
  if (val_size >= static_cast<int64_t>(all.size())) {
    val_size = std::max<int64_t>(1, static_cast<int64_t>(all.size()) / 10);
    std::cerr << "[trainer] corpus smaller than requested validation size; "
                 "falling back to 10% (" << val_size << " utterances)\n";
  }
  Rng rng(seed);
  std::shuffle(all.begin(), all.end(), rng);
  val->assign(all.begin(), all.begin() + val_size);
  train->assign(all.begin() + val_size, all.end());
}

}  // namespace emoaug
