// tests/ser_test.cc

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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <doctest.h>

#include "emoaug/ser.h"

using namespace emoaug;

namespace {

SerExample Example(const std::string& id, int label, const std::string& ses,
                   uint64_t seed, double sep = 4.0) {
  // Gaussian blob per class along one axis: linearly separable by design.
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SerExample e;
  e.utt_id = id;
  e.label = label;
  e.session = ses;
  e.features = Eigen::VectorXd::Zero(8);
  for (int i = 0; i < 8; ++i) e.features(i) = gauss(rng);
  e.features(0) += sep * label;
  return e;
}

}  // namespace

TEST_CASE("metrics oracle: hand-computed WA and UA") {
  // Class 0: 10 samples, 8 correct. Class 1: 30 samples, 15 correct.
  ConfusionMatrix cm;
  cm.Add(0, 0, 8);
  cm.Add(0, 1, 2);
  cm.Add(1, 1, 15);
  cm.Add(1, 0, 15);
  Metrics m = ComputeMetrics(cm);
  CHECK(m.wa == doctest::Approx(23.0 / 40.0));  // 0.575
  CHECK(m.ua == doctest::Approx((0.8 + 0.5) / 2.0));  // 0.65 over present classes
  CHECK(m.missing_classes);  // classes 2 and 3 absent
  CHECK(std::isnan(m.recall[2]));
}

TEST_CASE("diagonal confusion matrix gives WA = UA = 1") {
  ConfusionMatrix cm;
  for (int c = 0; c < kNumClasses; ++c) cm.Add(c, c, 5 + c);
  Metrics m = ComputeMetrics(cm);
  CHECK(m.wa == doctest::Approx(1.0));
  CHECK(m.ua == doctest::Approx(1.0));
  CHECK_FALSE(m.missing_classes);
}

TEST_CASE("balanced classes make WA equal UA to machine precision") {
  Rng rng(4);
  std::uniform_int_distribution<int> pred(0, 3);
  ConfusionMatrix cm;
  for (int t = 0; t < kNumClasses; ++t)
    for (int i = 0; i < 25; ++i) cm.Add(t, pred(rng));
  Metrics m = ComputeMetrics(cm);
  CHECK(m.wa == doctest::Approx(m.ua).epsilon(1e-15));
}

TEST_CASE("confusion-matrix metrics match a per-utterance scan on 100 cases") {
  Rng rng(99);
  std::uniform_int_distribution<int> label(0, 3);
  std::uniform_int_distribution<int> n_dist(4, 200);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = n_dist(rng);
    std::vector<int> truth(n), pred(n);
    ConfusionMatrix cm;
    for (int i = 0; i < n; ++i) {
      truth[i] = label(rng);
      pred[i] = label(rng);
      cm.Add(truth[i], pred[i]);
    }
    // Direct per-utterance computation.
    int64_t correct = 0;
    std::array<int64_t, 4> per_total{}, per_correct{};
    for (int i = 0; i < n; ++i) {
      if (truth[i] == pred[i]) { ++correct; ++per_correct[truth[i]]; }
      ++per_total[truth[i]];
    }
    double ua = 0.0;
    int present = 0;
    for (int c = 0; c < 4; ++c) {
      if (per_total[c] == 0) continue;
      ua += static_cast<double>(per_correct[c]) / per_total[c];
      ++present;
    }
    ua /= present;
    Metrics m = ComputeMetrics(cm);
    REQUIRE(m.wa == static_cast<double>(correct) / n);
    REQUIRE(m.ua == doctest::Approx(ua).epsilon(1e-15));
  }
}

TEST_CASE("empty confusion matrix is a data error") {
  CHECK_THROWS_AS(ComputeMetrics(ConfusionMatrix()), DataError);
}

TEST_CASE("five folds: test rotates, val is the next session, train the rest") {
  auto folds = MakeFolds({"s1", "s2", "s3", "s4", "s5"});
  REQUIRE(folds.size() == 5);
  CHECK(folds[0].test_session == "s1");
  CHECK(folds[0].val_session == "s2");
  CHECK(folds[0].train_sessions == std::vector<std::string>{"s3", "s4", "s5"});
  CHECK(folds[4].test_session == "s5");
  CHECK(folds[4].val_session == "s1");

  std::set<std::string> tested;
  for (const auto& f : folds) {
    CHECK(f.test_session != f.val_session);
    CHECK(f.train_sessions.size() == 3);
    std::set<std::string> all(f.train_sessions.begin(), f.train_sessions.end());
    all.insert(f.test_session);
    all.insert(f.val_session);
    CHECK(all.size() == 5);  // exact partition
    tested.insert(f.test_session);
  }
  CHECK(tested.size() == 5);  // every session tested exactly once

  CHECK_THROWS_AS(MakeFolds({"a", "b", "c"}), ConfigError);
  CHECK_THROWS_AS(MakeFolds({"a", "a", "b", "c", "d"}), ConfigError);
}

TEST_CASE("leakage guard drops every augmented row from non-train sessions") {
  std::vector<SerExample> base;
  for (int s = 1; s <= 5; ++s)
    for (int i = 0; i < 4; ++i)
      base.push_back(Example("s" + std::to_string(s) + "_" + std::to_string(i),
                             i % 4, "s" + std::to_string(s), s * 10 + i));
  auto folds = MakeFolds({"s1", "s2", "s3", "s4", "s5"});

  // Plant augmented rows sourced from every session.
  std::vector<SerExample> aug;
  std::map<std::string, std::string> source_session;
  for (int s = 1; s <= 5; ++s) {
    SerExample e = Example("aug_s" + std::to_string(s), 0,
                           "s" + std::to_string(s), 100 + s);
    e.augmented = true;
    source_session[e.utt_id] = "s" + std::to_string(s);
    aug.push_back(e);
  }

  for (const auto& fold : folds) {
    FoldDataset data = AssembleFold(fold, base, aug, source_session);
    CHECK(data.aug_used == 3);     // one per train session
    CHECK(data.aug_dropped == 2);  // test + validation session sources
    const std::set<std::string> train(fold.train_sessions.begin(),
                                      fold.train_sessions.end());
    for (const auto& e : data.train)
      if (e.augmented) CHECK(train.count(source_session.at(e.utt_id)) == 1);
    CHECK(data.test.size() == 4);
    CHECK(data.val.size() == 4);
    CHECK(data.train.size() == 12 + 3);
  }
}

TEST_CASE("classifier separates linearly separable blobs") {
  std::vector<SerExample> train, val, test;
  for (int i = 0; i < 160; ++i)
    train.push_back(Example("tr" + std::to_string(i), i % 4, "s1", i));
  for (int i = 0; i < 40; ++i)
    val.push_back(Example("va" + std::to_string(i), i % 4, "s1", 500 + i));
  for (int i = 0; i < 40; ++i)
    test.push_back(Example("te" + std::to_string(i), i % 4, "s2", 1000 + i));
  SerTrainConfig cfg;
  cfg.head_lr = 1e-2;
  cfg.backbone_lr = 1e-3;
  cfg.max_epochs = 60;
  SerClassifier clf(8, cfg);
  clf.Fit(train, val);
  CHECK(clf.Accuracy(test) >= 0.9);
}

TEST_CASE("frozen backbone leaves its parameters untouched") {
  std::vector<SerExample> train;
  for (int i = 0; i < 24; ++i)
    train.push_back(Example("tr" + std::to_string(i), i % 4, "s1", i));
  SerTrainConfig cfg;
  cfg.trainable_backbone = false;
  cfg.max_epochs = 5;
  SerClassifier clf(8, cfg);
  const Eigen::MatrixXd before = clf.BackboneParams()[0].var->value;
  const Eigen::MatrixXd head_before = clf.HeadParams()[0].var->value;
  clf.Fit(train, {});
  CHECK(clf.BackboneParams()[0].var->value == before);
  CHECK(clf.HeadParams()[0].var->value != head_before);
}

TEST_CASE("report artifacts: confusion CSV, heatmap, summary, recall deltas") {
  namespace fs = std::filesystem;
  ConfusionMatrix cm;
  cm.Add(0, 0, 10);
  cm.Add(1, 1, 9);
  cm.Add(1, 0, 1);
  cm.Add(2, 2, 10);
  cm.Add(3, 3, 6);
  cm.Add(3, 2, 4);

  const std::string dir =
      (fs::temp_directory_path() / "emoaug_ser_report_test").string();
  fs::create_directories(dir);
  WriteConfusionCsv(dir + "/confusion.csv", cm);
  WriteConfusionHeatmapBmp(dir + "/confusion.bmp", cm);
  {
    std::ifstream is(dir + "/confusion.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == "true\\pred,angry,happy,neutral,sad");
    std::string row;
    std::getline(is, row);
    CHECK(row == "angry,10,0,0,0");
  }
  {
    std::ifstream is(dir + "/confusion.bmp", std::ios::binary);
    char magic[2];
    is.read(magic, 2);
    CHECK(magic[0] == 'B');
    CHECK(magic[1] == 'M');
    CHECK(fs::file_size(dir + "/confusion.bmp") > 54);
  }

  Metrics base = ComputeMetrics(cm);
  ConfusionMatrix better = cm;
  better.counts(3, 3) = 8;
  better.counts(3, 2) = 2;
  const std::string csv = RecallDeltaCsv(base, ComputeMetrics(better));
  CHECK(csv.find("class,baseline_recall,augmented_recall,delta") == 0);
  CHECK(csv.find("sad,0.6,0.8,0.2") != std::string::npos);
  fs::remove_all(dir);
}
