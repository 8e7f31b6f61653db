// emoaug/features.h

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

#ifndef EMOAUG_FEATURES_H_
#define EMOAUG_FEATURES_H_

#include <memory>
#include <string>

#include "emoaug/dsp.h"

namespace emoaug {

// Frame-level feature source feeding the unit quantizer. The default is the
// bundled log-mel front-end; externally computed self-supervised features
// enter through the file adapter so no pretrained model is embedded here.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual int Dim() const = 0;
  virtual double FrameRate() const = 0;
  // Returns T x Dim feature frames for one utterance.
  virtual Eigen::MatrixXd Extract(const Waveform& x) const = 0;
};

class MelFeatureExtractor : public FeatureExtractor {
 public:
  explicit MelFeatureExtractor(const DspConfig& cfg) : cfg_(cfg) {}
  int Dim() const override { return cfg_.n_mels; }
  double FrameRate() const override {
    return static_cast<double>(cfg_.sample_rate) / cfg_.hop_length;
  }
  Eigen::MatrixXd Extract(const Waveform& x) const override {
    return ComputeMelSpectrogram(x, cfg_).frames;
  }
  const DspConfig& Config() const { return cfg_; }

 private:
  DspConfig cfg_;
};

// Per-utterance feature matrices on disk, one binary file per utterance
// (magic "EMOAFT1\n", rows, cols, row-major doubles) named <utt_id>.feat
// under a directory. Stands in for an external self-supervised extractor.
class FileFeatureAdapter : public FeatureExtractor {
 public:
  FileFeatureAdapter(std::string dir, int dim, double frame_rate)
      : dir_(std::move(dir)), dim_(dim), frame_rate_(frame_rate) {}
  int Dim() const override { return dim_; }
  double FrameRate() const override { return frame_rate_; }
  // Not applicable: features come from files, not waveforms.
  Eigen::MatrixXd Extract(const Waveform&) const override;
  Eigen::MatrixXd Load(const std::string& utt_id) const;

 private:
  std::string dir_;
  int dim_;
  double frame_rate_;
};

void SaveFeatureMatrix(const std::string& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd LoadFeatureMatrix(const std::string& path);

}  // namespace emoaug

#endif  // EMOAUG_FEATURES_H_
