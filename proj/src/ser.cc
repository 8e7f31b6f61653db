// src/ser.cc

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

#include "emoaug/ser.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace emoaug {

void ConfusionMatrix::Add(int true_class, int pred_class, int64_t n) {
  EMOAUG_CHECK(true_class >= 0 && true_class < kNumClasses && pred_class >= 0 &&
                   pred_class < kNumClasses,
               ContractError, "class index out of range");
  EMOAUG_CHECK(n >= 0, ContractError, "negative count");
  counts(true_class, pred_class) += n;
}

Metrics ComputeMetrics(const ConfusionMatrix& cm) {
  const int64_t total = cm.Total();
  EMOAUG_CHECK(total > 0, DataError, "empty confusion matrix");
  Metrics m;
  m.wa = static_cast<double>(cm.counts.trace()) / static_cast<double>(total);
  double recall_sum = 0.0;
  int present = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const int64_t row = cm.counts.row(c).sum();
    if (row == 0) {
      m.recall[c] = std::numeric_limits<double>::quiet_NaN();
      m.missing_classes = true;
      continue;
    }
    m.recall[c] = static_cast<double>(cm.counts(c, c)) / row;
    recall_sum += m.recall[c];
    ++present;
  }
  m.ua = recall_sum / present;
  return m;
}

std::vector<FoldSpec> MakeFolds(std::vector<std::string> sessions) {
  EMOAUG_CHECK(sessions.size() == 5, ConfigError,
               "leave-one-session-out needs exactly 5 sessions, got "
                   << sessions.size());
  EMOAUG_CHECK(std::set<std::string>(sessions.begin(), sessions.end()).size() ==
                   5,
               ConfigError, "sessions must be distinct");
  std::vector<FoldSpec> folds;
  for (size_t i = 0; i < 5; ++i) {
    FoldSpec f;
    f.test_session = sessions[i];
    f.val_session = sessions[(i + 1) % 5];
    for (size_t j = 0; j < 5; ++j)
      if (j != i && j != (i + 1) % 5) f.train_sessions.push_back(sessions[j]);
    folds.push_back(std::move(f));
  }
  return folds;
}

Eigen::VectorXd MeanPooledFeature(const Eigen::MatrixXd& frames) {
  EMOAUG_CHECK(frames.rows() > 0, DataError, "empty feature matrix");
  return frames.colwise().mean();
}

Eigen::VectorXd MelStatsFeature(const MelSpectrogram& m) {
  EMOAUG_CHECK(m.NumFrames() > 0, DataError, "empty mel spectrogram");
  const int M = m.NumMels();
  Eigen::VectorXd out(2 * M);
  const Eigen::VectorXd mean = m.frames.colwise().mean();
  out.head(M) = mean;
  for (int j = 0; j < M; ++j) {
    const double var =
        (m.frames.col(j).array() - mean(j)).square().sum() / m.NumFrames();
    out(M + j) = std::sqrt(var);
  }
  return out;
}

void SerTrainConfig::Validate() const {
  EMOAUG_CHECK(hidden_dim > 0 && max_epochs > 0 && batch_size > 0 &&
                   patience > 0,
               ConfigError, "classifier dimensions/epochs must be positive");
  EMOAUG_CHECK(backbone_lr > 0 && head_lr > 0, ConfigError,
               "learning rates must be positive");
}

namespace {
Rng MakeRng(uint64_t seed) { return Rng(seed); }
}  // namespace

SerClassifier::SerClassifier(int in_dim, const SerTrainConfig& cfg)
    : cfg_(cfg),
      in_dim_(in_dim),
      backbone_([&] {
        Rng rng = MakeRng(cfg.seed);
        return Linear(in_dim, cfg.hidden_dim, &rng);
      }()),
      head_([&] {
        Rng rng = MakeRng(cfg.seed + 1);
        return Linear(cfg.hidden_dim, kNumClasses, &rng);
      }()) {
  cfg_.Validate();
  feat_mean_ = Eigen::VectorXd::Zero(in_dim);
  feat_scale_ = Eigen::VectorXd::Ones(in_dim);
}

ad::Var SerClassifier::BatchLogits(const ad::Var& x) const {
  ad::Var h = ad::Tanh(ad::AddColwise(ad::MatMul(backbone_.weight, x),
                                      backbone_.bias));
  return ad::AddColwise(ad::MatMul(head_.weight, h), head_.bias);
}

std::vector<NamedParam> SerClassifier::HeadParams() const {
  return head_.Params("head");
}

std::vector<NamedParam> SerClassifier::BackboneParams() const {
  return backbone_.Params("backbone");
}

void SerClassifier::Fit(const std::vector<SerExample>& train,
                        const std::vector<SerExample>& val) {
  EMOAUG_CHECK(!train.empty(), DataError, "empty training split");
  for (const auto& e : train) {
    EMOAUG_CHECK(e.features.size() == in_dim_, ShapeError,
                 "feature dim mismatch for " << e.utt_id);
  }
  // Z-score normalization fitted on the train split.
  feat_mean_.setZero();
  for (const auto& e : train) feat_mean_ += e.features;
  feat_mean_ /= static_cast<double>(train.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(in_dim_);
  for (const auto& e : train)
    var += (e.features - feat_mean_).cwiseAbs2();
  var /= static_cast<double>(train.size());
  feat_scale_ = (var.array().sqrt() + 1e-8).inverse().matrix();

  std::vector<NamedParam> params = HeadParams();
  std::vector<NamedParam> bb = BackboneParams();
  if (cfg_.trainable_backbone)
    params.insert(params.end(), bb.begin(), bb.end());
  std::set<ad::Node*> head_set;
  for (const auto& p : HeadParams()) head_set.insert(p.var.get());

  // Adam state per parameter.
  struct Slot {
    ad::Matrix m, v;
  };
  std::map<ad::Node*, Slot> slots;
  for (const auto& p : params)
    slots[p.var.get()] = {ad::Matrix::Zero(p.var->Rows(), p.var->Cols()),
                          ad::Matrix::Zero(p.var->Rows(), p.var->Cols())};

  Rng rng = MakeRng(cfg_.seed + 2);
  std::vector<size_t> order(train.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  double best_acc = -1.0;
  int since_best = 0;
  std::map<std::string, ad::Matrix> best_params;
  int64_t adam_t = 0;

  for (int epoch = 0; epoch < cfg_.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t off = 0; off < order.size();
         off += static_cast<size_t>(cfg_.batch_size)) {
      const size_t end =
          std::min(order.size(), off + static_cast<size_t>(cfg_.batch_size));
      const int n = static_cast<int>(end - off);
      ad::Matrix x(in_dim_, n);
      std::vector<int> labels(n);
      for (int j = 0; j < n; ++j) {
        const SerExample& e = train[order[off + j]];
        x.col(j) = (e.features - feat_mean_).cwiseProduct(feat_scale_);
        labels[j] = e.label;
      }
      ad::Var loss =
          ad::CrossEntropyCols(BatchLogits(ad::Constant(x)), labels);
      std::vector<ad::Var> vars;
      for (const auto& p : params) vars.push_back(p.var);
      ad::ZeroGrad(vars);
      ad::Backward(loss);
      ++adam_t;
      const double bc1 = 1.0 - std::pow(0.9, adam_t);
      const double bc2 = 1.0 - std::pow(0.999, adam_t);
      for (const auto& p : params) {
        ad::Node* node = p.var.get();
        if (node->grad.size() == 0) continue;
        Slot& s = slots[node];
        s.m = 0.9 * s.m + 0.1 * node->grad;
        s.v = 0.999 * s.v + 0.001 * node->grad.cwiseProduct(node->grad);
        const double lr =
            head_set.count(node) ? cfg_.head_lr : cfg_.backbone_lr;
        node->value.array() -=
            lr * (s.m.array() / bc1) / ((s.v.array() / bc2).sqrt() + 1e-8);
      }
    }
    const double acc = val.empty() ? Accuracy(train) : Accuracy(val);
    if (acc > best_acc) {
      best_acc = acc;
      since_best = 0;
      best_params.clear();
      for (const auto& p : params) best_params[p.name] = p.var->value;
    } else if (++since_best >= cfg_.patience) {
      break;
    }
  }
  if (!best_params.empty()) ApplyParamMap(best_params, params, true);
}

Eigen::VectorXd SerClassifier::Logits(const Eigen::VectorXd& features) const {
  EMOAUG_CHECK(features.size() == in_dim_, ShapeError, "feature dim mismatch");
  const Eigen::VectorXd x = (features - feat_mean_).cwiseProduct(feat_scale_);
  const Eigen::VectorXd h =
      (backbone_.weight->value * x + backbone_.bias->value)
          .array()
          .tanh()
          .matrix();
  return head_.weight->value * h + head_.bias->value;
}

int SerClassifier::Predict(const Eigen::VectorXd& features) const {
  Eigen::Index best;
  Logits(features).maxCoeff(&best);
  return static_cast<int>(best);
}

double SerClassifier::Accuracy(const std::vector<SerExample>& split) const {
  EMOAUG_CHECK(!split.empty(), DataError, "empty split");
  int64_t correct = 0;
  for (const auto& e : split)
    if (Predict(e.features) == e.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(split.size());
}

FoldDataset AssembleFold(
    const FoldSpec& fold, const std::vector<SerExample>& base,
    const std::vector<SerExample>& augmented,
    const std::map<std::string, std::string>& aug_source_session) {
  const std::set<std::string> train_set(fold.train_sessions.begin(),
                                        fold.train_sessions.end());
  FoldDataset out;
  for (const auto& e : base) {
    if (e.session == fold.test_session) {
      out.test.push_back(e);
    } else if (e.session == fold.val_session) {
      out.val.push_back(e);
    } else {
      EMOAUG_CHECK(train_set.count(e.session) == 1, DataError,
                   "utterance " << e.utt_id << " has session " << e.session
                                << " outside the fold partition");
      out.train.push_back(e);
    }
  }
  for (const auto& e : augmented) {
    auto it = aug_source_session.find(e.utt_id);
    EMOAUG_CHECK(it != aug_source_session.end(), DataError,
                 "no source session for augmented utterance " << e.utt_id);
    if (train_set.count(it->second) == 1) {
      out.train.push_back(e);
      ++out.aug_used;
    } else {
      // Leakage guard: the source lives in this fold's test or validation
      // session, so its style-swapped copies must not train the classifier.
      ++out.aug_dropped;
    }
  }
  return out;
}

FoldResult RunFold(const FoldSpec& fold, const FoldDataset& data,
                   const SerTrainConfig& cfg) {
  EMOAUG_CHECK(!data.train.empty() && !data.test.empty(), DataError,
               "fold needs non-empty train and test splits");
  FoldResult result;
  result.fold = fold;
  result.n_train = static_cast<int64_t>(data.train.size());
  result.n_aug_used = data.aug_used;
  result.n_aug_dropped = data.aug_dropped;

  SerClassifier clf(static_cast<int>(data.train.front().features.size()), cfg);
  clf.Fit(data.train, data.val);
  for (const auto& e : data.test)
    result.confusion.Add(e.label, clf.Predict(e.features));
  result.metrics = ComputeMetrics(result.confusion);
  return result;
}

CrossValResult RunCrossValidation(
    const std::vector<SerExample>& base,
    const std::vector<SerExample>& augmented,
    const std::map<std::string, std::string>& aug_source_session,
    const SerTrainConfig& cfg) {
  std::set<std::string> sessions;
  for (const auto& e : base) sessions.insert(e.session);
  std::vector<std::string> session_list(sessions.begin(), sessions.end());
  const auto folds = MakeFolds(session_list);

  CrossValResult result;
  for (const auto& fold : folds) {
    FoldDataset data = AssembleFold(fold, base, augmented, aug_source_session);
    FoldResult fr = RunFold(fold, data, cfg);
    result.aggregate.Merge(fr.confusion);
    result.mean_wa += fr.metrics.wa;
    result.mean_ua += fr.metrics.ua;
    result.folds.push_back(std::move(fr));
  }
  result.mean_wa /= result.folds.size();
  result.mean_ua /= result.folds.size();
  result.aggregate_metrics = ComputeMetrics(result.aggregate);
  return result;
}

void WriteConfusionCsv(const std::string& path, const ConfusionMatrix& cm) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write confusion csv: " + path);
  os << "true\\pred";
  for (const char* e : kEmotions) os << "," << e;
  os << "\n";
  for (int t = 0; t < kNumClasses; ++t) {
    os << kEmotions[t];
    for (int p = 0; p < kNumClasses; ++p) os << "," << cm.counts(t, p);
    os << "\n";
  }
}

void WriteConfusionHeatmapBmp(const std::string& path,
                              const ConfusionMatrix& cm, int cell_px) {
  EMOAUG_CHECK(cell_px > 0, ContractError, "cell size must be positive");
  const int w = kNumClasses * cell_px;
  const int h = kNumClasses * cell_px;
  const int row_bytes = (3 * w + 3) & ~3;  // BMP rows pad to 4 bytes
  std::vector<uint8_t> pixels(static_cast<size_t>(row_bytes) * h, 0);

  for (int t = 0; t < kNumClasses; ++t) {
    const int64_t row_sum = cm.counts.row(t).sum();
    for (int p = 0; p < kNumClasses; ++p) {
      const double frac =
          row_sum > 0 ? static_cast<double>(cm.counts(t, p)) / row_sum : 0.0;
      // White (0) to saturated blue (1).
      const uint8_t r = static_cast<uint8_t>(255 * (1.0 - frac));
      const uint8_t g = static_cast<uint8_t>(255 * (1.0 - 0.7 * frac));
      const uint8_t b = 255;
      for (int y = t * cell_px; y < (t + 1) * cell_px; ++y) {
        for (int x = p * cell_px; x < (p + 1) * cell_px; ++x) {
          // BMP stores rows bottom-up, channels BGR.
          uint8_t* px =
              &pixels[static_cast<size_t>(h - 1 - y) * row_bytes + 3 * x];
          px[0] = b;
          px[1] = g;
          px[2] = r;
        }
      }
    }
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write heatmap: " + path);
  const uint32_t data_size = static_cast<uint32_t>(pixels.size());
  const uint32_t file_size = 54 + data_size;
  auto put16 = [&os](uint16_t v) { os.write(reinterpret_cast<char*>(&v), 2); };
  auto put32 = [&os](uint32_t v) { os.write(reinterpret_cast<char*>(&v), 4); };
  os.write("BM", 2);
  put32(file_size);
  put32(0);
  put32(54);           // pixel data offset
  put32(40);           // BITMAPINFOHEADER size
  put32(static_cast<uint32_t>(w));
  put32(static_cast<uint32_t>(h));
  put16(1);            // planes
  put16(24);           // bits per pixel
  put32(0);            // no compression
  put32(data_size);
  put32(2835);         // 72 dpi
  put32(2835);
  put32(0);
  put32(0);
  os.write(reinterpret_cast<const char*>(pixels.data()), pixels.size());
  if (!os) throw IoError("short write: " + path);
}

void WriteSummaryCsv(const std::string& path, const CrossValResult& result) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write summary csv: " + path);
  os << "fold,test_session,wa,ua,n_train,n_aug_used,n_aug_dropped\n";
  for (size_t i = 0; i < result.folds.size(); ++i) {
    const FoldResult& f = result.folds[i];
    os << i << "," << f.fold.test_session << "," << f.metrics.wa << ","
       << f.metrics.ua << "," << f.n_train << "," << f.n_aug_used << ","
       << f.n_aug_dropped << "\n";
  }
  os << "mean,," << result.mean_wa << "," << result.mean_ua << ",,,\n";
}

std::string RecallDeltaCsv(const Metrics& baseline, const Metrics& augmented) {
  std::ostringstream os;
  os << "class,baseline_recall,augmented_recall,delta\n";
  for (int c = 0; c < kNumClasses; ++c) {
    os << kEmotions[c] << "," << baseline.recall[c] << ","
       << augmented.recall[c] << "," << augmented.recall[c] - baseline.recall[c]
       << "\n";
  }
  return os.str();
}

}  // namespace emoaug
