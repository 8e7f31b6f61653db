// emoaug/layers.h

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

#ifndef EMOAUG_LAYERS_H_
#define EMOAUG_LAYERS_H_

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "emoaug/autodiff.h"

namespace emoaug {

enum class Mode { kTrain, kEval };

struct NamedParam {
  std::string name;
  ad::Var var;
};

// Tensor convention throughout the nets: rows = channels/features,
// cols = time steps (a single vector is rows x 1).
class Layer {
 public:
  virtual ~Layer() = default;
  virtual ad::Var Forward(const ad::Var& x, Mode mode, Rng* rng) = 0;
  virtual void CollectParams(const std::string& prefix,
                             std::vector<NamedParam>* out) const = 0;
  std::vector<NamedParam> Params(const std::string& prefix) const {
    std::vector<NamedParam> out;
    CollectParams(prefix, &out);
    return out;
  }
};

// Xavier-uniform weights. Orthogonal init lives in Lstm.
ad::Matrix XavierUniform(int64_t rows, int64_t cols, Rng* rng);
ad::Matrix Orthogonal(int64_t n, Rng* rng);

class Linear : public Layer {
 public:
  Linear(int in_dim, int out_dim, Rng* rng);
  ad::Var Forward(const ad::Var& x, Mode mode, Rng* rng) override;
  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const override;
  ad::Var weight, bias;
};

class Conv1d : public Layer {
 public:
  Conv1d(int in_ch, int out_ch, int kernel, int dilation, Rng* rng);
  ad::Var Forward(const ad::Var& x, Mode mode, Rng* rng) override;
  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const override;
  ad::Var weight, bias;  // weight: out_ch x (in_ch * kernel)
  int in_ch, kernel, dilation;
};

// Per-channel normalization over the time axis in train mode; running
// statistics (momentum 0.1) in eval mode.
class BatchNorm1d : public Layer {
 public:
  explicit BatchNorm1d(int channels, double momentum = 0.1, double eps = 1e-5);
  ad::Var Forward(const ad::Var& x, Mode mode, Rng* rng) override;
  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const override;
  ad::Var gamma, beta;
  ad::Var running_mean, running_var;  // buffers, saved but never trained
  double momentum, eps;
};

class Embedding : public Layer {
 public:
  Embedding(int dim, int vocab, Rng* rng);
  // Embedding consumes indices, not tensors.
  ad::Var Forward(const ad::Var&, Mode, Rng*) override;
  ad::Var Lookup(const std::vector<int>& indices) const;
  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const override;
  ad::Var table;  // dim x vocab
};

class Lstm : public Layer {
 public:
  Lstm(int in_dim, int hidden, Rng* rng);
  struct State {
    ad::Var h, c;
  };
  State InitialState() const;
  State Step(const ad::Var& x, const State& s) const;
  // Full sequence: x (in x T) -> h (hidden x T).
  ad::Var Forward(const ad::Var& x, Mode mode, Rng* rng) override;
  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const override;
  ad::Var weight, bias;  // weight: 4H x (in + H), gate order [i f g o]
  int in_dim, hidden;
};

// Forward + backward pass over time, outputs concatenated to 2H x T.
class BiLstm : public Layer {
 public:
  BiLstm(int in_dim, int hidden, Rng* rng);
  ad::Var Forward(const ad::Var& x, Mode mode, Rng* rng) override;
  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const override;
  Lstm fw, bw;
};

// ---------------------------------------------------------------------------
// Generic layer description + factory, used by the gradient suite and the
// python bindings.

struct LayerSpec {
  std::string kind;  // Conv1D | FC | BatchNorm | ReLU | Tanh | Softmax |
                     // LSTM | BiLSTM | Embedding
  int in_dim = 0;
  int out_dim = 0;
  int kernel = 1;
  int dilation = 1;
  int hidden = 0;
  int vocab = 0;
};

std::unique_ptr<Layer> MakeLayer(const LayerSpec& spec, Rng* rng);

// ---------------------------------------------------------------------------
// Finite-difference gradient checking.

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::string worst_param;
  int64_t num_checked = 0;
  int resamples = 0;  // re-draws after hitting a non-smooth point
  bool passed = false;
};

// Compares analytic gradients of a random projection of the layer output
// against central finite differences, for all parameters and the input.
GradCheckReport GradCheckLayer(Layer* layer, int in_rows, int in_cols,
                               double eps, double tol, uint64_t seed);

// Same check for an arbitrary scalar-valued graph builder over leaves.
GradCheckReport GradCheckFn(
    const std::function<ad::Var(const std::vector<ad::Var>&)>& fn,
    const std::vector<NamedParam>& leaves, double eps, double tol);

// ---------------------------------------------------------------------------
// Checkpoints: named parameter map with a versioned header.

void SaveParamMap(const std::string& path, const std::vector<NamedParam>& params);
std::map<std::string, ad::Matrix> LoadParamMap(const std::string& path);
// Copies matching entries into params; throws on missing names or shape
// mismatches unless allow_partial.
void ApplyParamMap(const std::map<std::string, ad::Matrix>& map,
                   const std::vector<NamedParam>& params,
                   bool allow_partial = false);

}  // namespace emoaug

#endif  // EMOAUG_LAYERS_H_
