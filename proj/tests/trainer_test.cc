// tests/trainer_test.cc

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

#include <doctest.h>

#include "emoaug/trainer.h"

using namespace emoaug;

namespace {

TrainItem MakeItem(const std::string& id, std::vector<int> units, int64_t t,
                   int n_mels, uint64_t seed) {
  TrainItem item;
  item.utt_id = id;
  item.units.units = std::move(units);
  item.units.deduped = true;
  item.units.k = 16;
  Rng rng(seed);
  std::normal_distribution<double> gauss(-3.0, 1.0);
  item.mel.frames.resize(t, n_mels);
  for (int64_t i = 0; i < t; ++i)
    for (int j = 0; j < n_mels; ++j) item.mel.frames(i, j) = gauss(rng);
  return item;
}

}  // namespace

TEST_CASE("learning-rate schedule: closed-form decay with 5000-step plateaus") {
  TrainConfig cfg;
  CHECK(LrAt(0, cfg, LrGroup::kMain) == doctest::Approx(1e-3));
  CHECK(LrAt(4999, cfg, LrGroup::kMain) == doctest::Approx(1e-3));
  CHECK(LrAt(5000, cfg, LrGroup::kMain) == doctest::Approx(9e-4));
  // iter 12000 -> floor(12000/5000) = 2 decays: 1e-3 * 0.81.
  CHECK(LrAt(12000, cfg, LrGroup::kMain) == doctest::Approx(8.1e-4));
  // The paralinguistic group is exactly 10x smaller at every iteration.
  for (int64_t it : {0, 1, 4999, 5000, 12000, 50000, 123456}) {
    CHECK(LrAt(it, cfg, LrGroup::kParalinguistic) * 10.0 ==
          doctest::Approx(LrAt(it, cfg, LrGroup::kMain)).epsilon(1e-12));
  }
}

TEST_CASE("scheduled sampling ramps linearly from 0 to 0.3 over 50k iters") {
  TrainConfig cfg;
  CHECK(SamplingProbAt(0, cfg) == doctest::Approx(0.0));
  CHECK(SamplingProbAt(25000, cfg) == doctest::Approx(0.15));
  CHECK(SamplingProbAt(50000, cfg) == doctest::Approx(0.3));
  CHECK(SamplingProbAt(200000, cfg) == doctest::Approx(0.3));  // clamped
}

TEST_CASE("config validation rejects bad values") {
  TrainConfig cfg;
  cfg.base_lr = 0.0;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg = TrainConfig();
  cfg.decay_factor = 1.5;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg = TrainConfig();
  cfg.grad_clip = -1.0;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
}

TEST_CASE("one optimizer step lowers the loss on a fixed batch") {
  ModelConfig mc = ModelConfig::Toy(16, 8);
  mc.Resolve();
  EmoAugModel model(mc, 5);
  TrainConfig tc;
  tc.base_lr = 1e-3;
  tc.seed = 1;
  Trainer trainer(&model, tc);

  TrainItem item = MakeItem("a", {1, 5, 3}, 8, 8, 7);
  std::vector<const TrainItem*> batch = {&item};
  const double first = trainer.TrainStep(batch);
  double last = first;
  for (int i = 0; i < 24; ++i) last = trainer.TrainStep(batch);
  CHECK(last < first);
  CHECK(trainer.State().iteration == 25);
}

TEST_CASE("a flat fine-tuning rate overrides the schedule in every group") {
  ModelConfig mc = ModelConfig::Toy(16, 8);
  mc.Resolve();
  EmoAugModel model(mc, 5);
  TrainConfig tc;
  Trainer trainer(&model, tc, 1e-5);
  CHECK(trainer.CurrentLr(LrGroup::kMain) == doctest::Approx(1e-5));
  CHECK(trainer.CurrentLr(LrGroup::kParalinguistic) == doctest::Approx(1e-5));
}

TEST_CASE("validation split falls back to 10% with small corpora") {
  std::vector<TrainItem> all;
  for (int i = 0; i < 50; ++i)
    all.push_back(MakeItem("u" + std::to_string(i), {1, 2}, 4, 8, i));
  std::vector<TrainItem> train, val;
  Trainer::SplitValidation(all, 1000, 3, &train, &val);
  CHECK(val.size() == 5);  // 10% of 50
  CHECK(train.size() == 45);

  // Large request honored exactly when the corpus allows it.
  Trainer::SplitValidation(all, 20, 3, &train, &val);
  CHECK(val.size() == 20);
  CHECK(train.size() == 30);

  // Deterministic per seed.
  std::vector<TrainItem> t2, v2;
  Trainer::SplitValidation(all, 20, 3, &t2, &v2);
  for (size_t i = 0; i < val.size(); ++i) CHECK(v2[i].utt_id == val[i].utt_id);
}

TEST_CASE("eval loss is deterministic and ignores scheduled sampling") {
  ModelConfig mc = ModelConfig::Toy(16, 8);
  mc.Resolve();
  EmoAugModel model(mc, 9);
  Trainer trainer(&model, TrainConfig());
  std::vector<TrainItem> items = {MakeItem("a", {2, 4}, 6, 8, 1),
                                  MakeItem("b", {1, 3, 5}, 7, 8, 2)};
  CHECK(trainer.EvalLoss(items) == doctest::Approx(trainer.EvalLoss(items)));
}
