// emoaug/experiment.h

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

#ifndef EMOAUG_EXPERIMENT_H_
#define EMOAUG_EXPERIMENT_H_

#include <string>

#include "emoaug/dsp.h"
#include "emoaug/model.h"
#include "emoaug/ser.h"
#include "emoaug/trainer.h"

namespace emoaug {

// One JSON file describes an experiment end to end; every CLI artifact
// records the config's hash plus the global seed so runs are reproducible
// and diff-able.

struct QuantizerConfig {
  int k = 200;
  uint64_t seed = 0;
  int max_iters = 100;
};

struct AugmentConfig {
  int n = 1;
  bool balance = false;
};

struct ExperimentConfig {
  DspConfig dsp;
  QuantizerConfig quantizer;
  ModelConfig model;
  TrainConfig train;
  AugmentConfig augment;
  SerTrainConfig ser;
  uint64_t seed = 0;
  std::string work_dir = "work";

  void Validate() const;  // throws ConfigError with a field-level message

  // Toy-scale preset: small model dims, short schedules.
  static ExperimentConfig ToyPreset();
};

// JSON round trip. Load rejects unknown keys (typo protection) and runs
// Validate(). The serialization covers every tunable field.
ExperimentConfig LoadExperimentConfig(const std::string& path);
void SaveExperimentConfig(const std::string& path, const ExperimentConfig& cfg);
std::string ExperimentConfigJson(const ExperimentConfig& cfg);
ExperimentConfig ParseExperimentConfig(const std::string& json_text);

// FNV-1a hash of the canonical serialization; embedded in run reports.
std::string ConfigHash(const ExperimentConfig& cfg);

// Small machine-readable sidecar written next to each CLI artifact:
// {command, config_hash, seed, timestamp, outputs}.
void WriteRunReport(const std::string& path, const std::string& command,
                    const ExperimentConfig& cfg,
                    const std::vector<std::string>& outputs);

}  // namespace emoaug

#endif  // EMOAUG_EXPERIMENT_H_
