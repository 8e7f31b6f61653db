// emoaug/ser.h

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

#ifndef EMOAUG_SER_H_
#define EMOAUG_SER_H_

#include <array>
#include <string>
#include <vector>

#include "emoaug/corpus.h"
#include "emoaug/features.h"
#include "emoaug/layers.h"

namespace emoaug {

// Downstream speech-emotion-recognition harness: classifier head, weighted
// and unweighted accuracy, confusion matrices, and leave-one-session-out
// cross-validation.

inline constexpr int kNumClasses = 4;  // fixed order = kEmotions

struct ConfusionMatrix {
  // counts(t, p) = utterances of true class t predicted as p.
  Eigen::Matrix<int64_t, kNumClasses, kNumClasses> counts =
      Eigen::Matrix<int64_t, kNumClasses, kNumClasses>::Zero();

  void Add(int true_class, int pred_class, int64_t n = 1);
  void Merge(const ConfusionMatrix& other) { counts += other.counts; }
  int64_t Total() const { return counts.sum(); }
};

struct Metrics {
  double wa = 0.0;  // trace / total
  double ua = 0.0;  // mean per-class recall over classes with samples
  std::array<double, kNumClasses> recall{};  // NaN for absent classes
  bool missing_classes = false;  // some class had zero test samples
};

// Two-path oracle target: these must agree with a direct per-utterance scan.
Metrics ComputeMetrics(const ConfusionMatrix& cm);  // DataError when empty

// Leave-one-session-out folds over exactly 5 distinct sessions: fold i tests
// session i, validates on session (i+1) mod 5, trains on the remaining 3.
struct FoldSpec {
  std::string test_session;
  std::string val_session;
  std::vector<std::string> train_sessions;
};

std::vector<FoldSpec> MakeFolds(std::vector<std::string> sessions);

// One classifier input: a pooled utterance-level feature vector plus labels.
// Augmented examples carry their source utterance's session for the leakage
// guard (an augmented row may only train folds whose train split contains
// its source session).
struct SerExample {
  std::string utt_id;
  Eigen::VectorXd features;
  int label = 0;  // index into kEmotions
  std::string session;
  bool augmented = false;
};

// Bundled pooled representations (no pretrained assets required).
Eigen::VectorXd MeanPooledFeature(const Eigen::MatrixXd& frames);  // T x D -> D
// Mean and standard deviation per mel band: 2M-dim utterance vector.
Eigen::VectorXd MelStatsFeature(const MelSpectrogram& m);

struct SerTrainConfig {
  int hidden_dim = 128;
  bool trainable_backbone = true;  // frozen: only the FC head updates
  double backbone_lr = 1e-5;
  double head_lr = 1e-4;
  int max_epochs = 60;
  int batch_size = 32;
  int patience = 10;  // epochs without val-accuracy improvement
  uint64_t seed = 0;

  void Validate() const;
};

// Mean-pooled utterance features -> backbone projection (tanh) -> one FC
// layer to 4 logits, trained with cross-entropy and two learning-rate groups.
class SerClassifier {
 public:
  SerClassifier(int in_dim, const SerTrainConfig& cfg);

  // Trains with early stopping on validation accuracy (train accuracy when
  // val is empty). Features are z-scored with train-split statistics.
  void Fit(const std::vector<SerExample>& train,
           const std::vector<SerExample>& val);

  int Predict(const Eigen::VectorXd& features) const;
  Eigen::VectorXd Logits(const Eigen::VectorXd& features) const;
  double Accuracy(const std::vector<SerExample>& split) const;

  std::vector<NamedParam> HeadParams() const;
  std::vector<NamedParam> BackboneParams() const;

 private:
  ad::Var BatchLogits(const ad::Var& x) const;  // x: in_dim x N (normalized)

  SerTrainConfig cfg_;
  int in_dim_;
  Linear backbone_, head_;
  Eigen::VectorXd feat_mean_, feat_scale_;
};

struct FoldResult {
  FoldSpec fold;
  Metrics metrics;
  ConfusionMatrix confusion;
  int64_t n_train = 0;
  int64_t n_aug_used = 0;
  int64_t n_aug_dropped = 0;  // leakage guard exclusions
};

struct FoldDataset {
  std::vector<SerExample> train, val, test;
  int64_t aug_used = 0, aug_dropped = 0;
};

// Splits base examples by session and admits augmented examples into the
// train split only when their source session belongs to the fold's train
// sessions (source sessions given per augmented utt_id).
FoldDataset AssembleFold(const FoldSpec& fold,
                         const std::vector<SerExample>& base,
                         const std::vector<SerExample>& augmented,
                         const std::map<std::string, std::string>& aug_source_session);

FoldResult RunFold(const FoldSpec& fold, const FoldDataset& data,
                   const SerTrainConfig& cfg);

struct CrossValResult {
  std::vector<FoldResult> folds;
  double mean_wa = 0.0;
  double mean_ua = 0.0;
  ConfusionMatrix aggregate;
  Metrics aggregate_metrics;
};

CrossValResult RunCrossValidation(const std::vector<SerExample>& base,
                                  const std::vector<SerExample>& augmented,
                                  const std::map<std::string, std::string>& aug_source_session,
                                  const SerTrainConfig& cfg);

// --- Reporting ---------------------------------------------------------

void WriteConfusionCsv(const std::string& path, const ConfusionMatrix& cm);
// Row-normalized blue-scale heatmap with per-cell shading (BMP format).
void WriteConfusionHeatmapBmp(const std::string& path,
                              const ConfusionMatrix& cm, int cell_px = 48);
// Per-fold and mean WA/UA rows.
void WriteSummaryCsv(const std::string& path, const CrossValResult& result);
// "class,baseline_recall,augmented_recall,delta" rows.
std::string RecallDeltaCsv(const Metrics& baseline, const Metrics& augmented);

}  // namespace emoaug

#endif  // EMOAUG_SER_H_
