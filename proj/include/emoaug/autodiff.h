// emoaug/autodiff.h

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

#ifndef EMOAUG_AUTODIFF_H_
#define EMOAUG_AUTODIFF_H_

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "emoaug/common.h"

namespace emoaug::ad {

using Matrix = Eigen::MatrixXd;

// Reverse-mode tape node. Matrix-valued; the graph is built dynamically per
// forward pass and discarded when the Vars go out of scope. Parameters are
// long-lived leaf nodes.
struct Node {
  Matrix value;
  Matrix grad;  // empty until backward touches it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  int64_t Rows() const { return value.rows(); }
  int64_t Cols() const { return value.cols(); }
};

using Var = std::shared_ptr<Node>;

Var Constant(Matrix value);
Var Parameter(Matrix value);

// Accumulates g into p->grad (no-op when p does not require gradients).
void AccumGrad(const Var& p, const Matrix& g);

// Backprop from a 1x1 scalar node through the reachable subgraph.
void Backward(const Var& root);

void ZeroGrad(const std::vector<Var>& params);

// --- elementwise / broadcast ---
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var CMul(const Var& a, const Var& b);
Var Scale(const Var& a, double s);
Var AddColwise(const Var& a, const Var& bias);     // bias: rows x 1
Var SubColwise(const Var& a, const Var& bias);     // bias: rows x 1
Var MulColwise(const Var& a, const Var& scale);    // scale: rows x 1, per-row
Var AddScalar(const Var& a, double c);
Var Sigmoid(const Var& a);
Var Tanh(const Var& a);
Var Relu(const Var& a);
Var Sqrt(const Var& a);
Var Rsqrt(const Var& a);

// --- structural ---
Var MatMul(const Var& a, const Var& b);
Var Transpose(const Var& a);
Var ConcatRows(const std::vector<Var>& parts);     // vertical stack
Var ConcatCols(const std::vector<Var>& parts);     // horizontal stack
Var SliceRows(const Var& a, int64_t row0, int64_t n_rows);
Var SliceCols(const Var& a, int64_t col0, int64_t n_cols = 1);
Var GatherCols(const Var& table, const std::vector<int>& indices);
// im2col along columns with zero padding keeping the column count
// ("same" framing): x (C x T) -> (C*kernel x T).
Var Unfold(const Var& x, int kernel, int dilation);

// --- reductions ---
Var SumAll(const Var& a);
Var MeanAll(const Var& a);
Var MeanCols(const Var& a);                        // rows x 1
Var SoftmaxCols(const Var& a);                     // per column, over rows
Var SoftmaxRows(const Var& a);                     // per row, over columns

// --- losses / regularizers ---
// Mean of elementwise squared difference against a constant target.
Var MseLoss(const Var& pred, const Matrix& target);
// Masked variant: mask entries in {0,1}; mean over mask support.
Var MaskedMseLoss(const Var& pred, const Matrix& target, const Matrix& mask);
// Numerically stable mean BCE on logits with a positive-class weight.
Var BceWithLogits(const Var& logits, const Matrix& targets, double pos_weight);
// Mean cross entropy over columns: logits (C x N), one label per column.
Var CrossEntropyCols(const Var& logits, const std::vector<int>& labels);

// Dropout with an explicit RNG so decodes are reproducible under a fixed
// seed. Identity when active is false or p == 0.
Var Dropout(const Var& a, double p, Rng* rng, bool active);

// Throws DivergenceError when the value holds NaN/Inf.
void CheckFinite(const Var& v, const char* where);

}  // namespace emoaug::ad

#endif  // EMOAUG_AUTODIFF_H_
