// src/autodiff.cc

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

#include "emoaug/autodiff.h"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace emoaug::ad {

namespace {

Var NewNode(Matrix value, std::vector<Var> parents,
            std::function<void(Node&)> fn) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->parents = std::move(parents);
  for (const auto& p : n->parents) {
    if (p->requires_grad) {
      n->requires_grad = true;
      break;
    }
  }
  if (n->requires_grad) n->backward_fn = std::move(fn);
  return n;
}

double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace

Var Constant(Matrix value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  return n;
}

Var Parameter(Matrix value) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  n->requires_grad = true;
  return n;
}

void AccumGrad(const Var& p, const Matrix& g) {
  if (!p->requires_grad) return;
  if (p->grad.size() == 0)
    p->grad = g;
  else
    p->grad += g;
}

void Backward(const Var& root) {
  EMOAUG_CHECK(root->Rows() == 1 && root->Cols() == 1, ContractError,
               "Backward expects a scalar root, got " << root->Rows() << "x"
                                                      << root->Cols());
  // Iterative post-order DFS; reversed it gives a valid backprop order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, size_t>> stack{{root.get(), 0}};
  seen.insert(root.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Node* p = node->parents[idx++].get();
      if (p->requires_grad && seen.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  root->grad = Matrix::Ones(1, 1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* n = *it;
    if (n->backward_fn && n->grad.size() != 0) n->backward_fn(*n);
  }
}

void ZeroGrad(const std::vector<Var>& params) {
  for (const auto& p : params) p->grad.resize(0, 0);
}

void CheckFinite(const Var& v, const char* where) {
  EMOAUG_CHECK(v->value.allFinite(), DivergenceError,
               "non-finite values in " << where);
}

// ---------------------------------------------------------------------------
// elementwise / broadcast

Var Add(const Var& a, const Var& b) {
  EMOAUG_CHECK(a->Rows() == b->Rows() && a->Cols() == b->Cols(), ShapeError,
               "Add shapes " << a->Rows() << "x" << a->Cols() << " vs "
                             << b->Rows() << "x" << b->Cols());
  return NewNode(a->value + b->value, {a, b}, [a, b](Node& n) {
    AccumGrad(a, n.grad);
    AccumGrad(b, n.grad);
  });
}

Var Sub(const Var& a, const Var& b) {
  EMOAUG_CHECK(a->Rows() == b->Rows() && a->Cols() == b->Cols(), ShapeError,
               "Sub shapes " << a->Rows() << "x" << a->Cols() << " vs "
                             << b->Rows() << "x" << b->Cols());
  return NewNode(a->value - b->value, {a, b}, [a, b](Node& n) {
    AccumGrad(a, n.grad);
    AccumGrad(b, -n.grad);
  });
}

Var CMul(const Var& a, const Var& b) {
  EMOAUG_CHECK(a->Rows() == b->Rows() && a->Cols() == b->Cols(), ShapeError,
               "CMul shapes " << a->Rows() << "x" << a->Cols() << " vs "
                              << b->Rows() << "x" << b->Cols());
  return NewNode(a->value.cwiseProduct(b->value), {a, b}, [a, b](Node& n) {
    AccumGrad(a, n.grad.cwiseProduct(b->value));
    AccumGrad(b, n.grad.cwiseProduct(a->value));
  });
}

Var Scale(const Var& a, double s) {
  return NewNode(a->value * s, {a},
                 [a, s](Node& n) { AccumGrad(a, n.grad * s); });
}

Var AddColwise(const Var& a, const Var& bias) {
  EMOAUG_CHECK(bias->Cols() == 1 && bias->Rows() == a->Rows(), ShapeError,
               "AddColwise bias must be " << a->Rows() << "x1");
  Matrix v = a->value;
  v.colwise() += bias->value.col(0);
  return NewNode(std::move(v), {a, bias}, [a, bias](Node& n) {
    AccumGrad(a, n.grad);
    AccumGrad(bias, n.grad.rowwise().sum());
  });
}

Var SubColwise(const Var& a, const Var& bias) {
  EMOAUG_CHECK(bias->Cols() == 1 && bias->Rows() == a->Rows(), ShapeError,
               "SubColwise bias must be " << a->Rows() << "x1");
  Matrix v = a->value;
  v.colwise() -= bias->value.col(0);
  return NewNode(std::move(v), {a, bias}, [a, bias](Node& n) {
    AccumGrad(a, n.grad);
    AccumGrad(bias, -n.grad.rowwise().sum());
  });
}

Var MulColwise(const Var& a, const Var& scale) {
  EMOAUG_CHECK(scale->Cols() == 1 && scale->Rows() == a->Rows(), ShapeError,
               "MulColwise scale must be " << a->Rows() << "x1");
  Matrix v = a->value.array().colwise() * scale->value.col(0).array();
  return NewNode(std::move(v), {a, scale}, [a, scale](Node& n) {
    AccumGrad(a, (n.grad.array().colwise() * scale->value.col(0).array()).matrix());
    AccumGrad(scale, n.grad.cwiseProduct(a->value).rowwise().sum());
  });
}

Var AddScalar(const Var& a, double c) {
  return NewNode(a->value.array() + c, {a},
                 [a](Node& n) { AccumGrad(a, n.grad); });
}

Var Sigmoid(const Var& a) {
  Matrix v = a->value.unaryExpr(
      [](double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z))
                                   : std::exp(z) / (1.0 + std::exp(z)); });
  auto out = NewNode(std::move(v), {a}, nullptr);
  if (out->requires_grad) {
    Node* self = out.get();
    out->backward_fn = [a, self](Node& n) {
      AccumGrad(a, n.grad.cwiseProduct(
                       (self->value.array() * (1.0 - self->value.array()))
                           .matrix()));
    };
  }
  return out;
}

Var Tanh(const Var& a) {
  Matrix v = a->value.array().tanh();
  auto out = NewNode(std::move(v), {a}, nullptr);
  if (out->requires_grad) {
    Node* self = out.get();
    out->backward_fn = [a, self](Node& n) {
      AccumGrad(a,
                n.grad.cwiseProduct((1.0 - self->value.array().square()).matrix()));
    };
  }
  return out;
}

Var Relu(const Var& a) {
  return NewNode(a->value.cwiseMax(0.0), {a}, [a](Node& n) {
    AccumGrad(a, (n.grad.array() * (a->value.array() > 0.0).cast<double>())
                     .matrix());
  });
}

Var Sqrt(const Var& a) {
  Matrix v = a->value.cwiseSqrt();
  auto out = NewNode(std::move(v), {a}, nullptr);
  if (out->requires_grad) {
    Node* self = out.get();
    out->backward_fn = [a, self](Node& n) {
      AccumGrad(a, (n.grad.array() * 0.5 / self->value.array().max(1e-12))
                       .matrix());
    };
  }
  return out;
}

Var Rsqrt(const Var& a) {
  Matrix v = a->value.array().max(1e-12).rsqrt();
  auto out = NewNode(std::move(v), {a}, nullptr);
  if (out->requires_grad) {
    Node* self = out.get();
    out->backward_fn = [a, self](Node& n) {
      AccumGrad(a, (n.grad.array() * -0.5 * self->value.array().cube()).matrix());
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// structural

Var MatMul(const Var& a, const Var& b) {
  EMOAUG_CHECK(a->Cols() == b->Rows(), ShapeError,
               "MatMul shapes " << a->Rows() << "x" << a->Cols() << " * "
                                << b->Rows() << "x" << b->Cols());
  return NewNode(a->value * b->value, {a, b}, [a, b](Node& n) {
    AccumGrad(a, n.grad * b->value.transpose());
    AccumGrad(b, a->value.transpose() * n.grad);
  });
}

Var Transpose(const Var& a) {
  return NewNode(a->value.transpose(), {a},
                 [a](Node& n) { AccumGrad(a, n.grad.transpose()); });
}

Var ConcatRows(const std::vector<Var>& parts) {
  EMOAUG_CHECK(!parts.empty(), ContractError, "ConcatRows of nothing");
  const int64_t cols = parts[0]->Cols();
  int64_t rows = 0;
  for (const auto& p : parts) {
    EMOAUG_CHECK(p->Cols() == cols, ShapeError,
                 "ConcatRows column mismatch: " << p->Cols() << " vs " << cols);
    rows += p->Rows();
  }
  Matrix v(rows, cols);
  int64_t off = 0;
  for (const auto& p : parts) {
    v.middleRows(off, p->Rows()) = p->value;
    off += p->Rows();
  }
  std::vector<Var> parents = parts;
  return NewNode(std::move(v), std::move(parents), [parts](Node& n) {
    int64_t off = 0;
    for (const auto& p : parts) {
      AccumGrad(p, n.grad.middleRows(off, p->Rows()));
      off += p->Rows();
    }
  });
}

Var ConcatCols(const std::vector<Var>& parts) {
  EMOAUG_CHECK(!parts.empty(), ContractError, "ConcatCols of nothing");
  const int64_t rows = parts[0]->Rows();
  int64_t cols = 0;
  for (const auto& p : parts) {
    EMOAUG_CHECK(p->Rows() == rows, ShapeError,
                 "ConcatCols row mismatch: " << p->Rows() << " vs " << rows);
    cols += p->Cols();
  }
  Matrix v(rows, cols);
  int64_t off = 0;
  for (const auto& p : parts) {
    v.middleCols(off, p->Cols()) = p->value;
    off += p->Cols();
  }
  std::vector<Var> parents = parts;
  return NewNode(std::move(v), std::move(parents), [parts](Node& n) {
    int64_t off = 0;
    for (const auto& p : parts) {
      AccumGrad(p, n.grad.middleCols(off, p->Cols()));
      off += p->Cols();
    }
  });
}

Var SliceCols(const Var& a, int64_t col0, int64_t n_cols) {
  EMOAUG_CHECK(col0 >= 0 && col0 + n_cols <= a->Cols(), ShapeError,
               "SliceCols [" << col0 << ", " << col0 + n_cols << ") out of "
                             << a->Cols());
  return NewNode(a->value.middleCols(col0, n_cols), {a},
                 [a, col0, n_cols](Node& n) {
                   Matrix g = Matrix::Zero(a->Rows(), a->Cols());
                   g.middleCols(col0, n_cols) = n.grad;
                   AccumGrad(a, g);
                 });
}

Var SliceRows(const Var& a, int64_t row0, int64_t n_rows) {
  EMOAUG_CHECK(row0 >= 0 && row0 + n_rows <= a->Rows(), ShapeError,
               "SliceRows [" << row0 << ", " << row0 + n_rows << ") out of "
                             << a->Rows());
  return NewNode(a->value.middleRows(row0, n_rows), {a},
                 [a, row0, n_rows](Node& n) {
                   Matrix g = Matrix::Zero(a->Rows(), a->Cols());
                   g.middleRows(row0, n_rows) = n.grad;
                   AccumGrad(a, g);
                 });
}

Var GatherCols(const Var& table, const std::vector<int>& indices) {
  Matrix v(table->Rows(), static_cast<int64_t>(indices.size()));
  for (size_t i = 0; i < indices.size(); ++i) {
    EMOAUG_CHECK(indices[i] >= 0 && indices[i] < table->Cols(), DataError,
                 "embedding index " << indices[i] << " out of range "
                                    << table->Cols());
    v.col(i) = table->value.col(indices[i]);
  }
  return NewNode(std::move(v), {table}, [table, indices](Node& n) {
    Matrix g = Matrix::Zero(table->Rows(), table->Cols());
    for (size_t i = 0; i < indices.size(); ++i)
      g.col(indices[i]) += n.grad.col(i);
    AccumGrad(table, g);
  });
}

Var Unfold(const Var& x, int kernel, int dilation) {
  EMOAUG_CHECK(kernel >= 1 && dilation >= 1, ConfigError,
               "Unfold kernel/dilation must be >= 1");
  const int64_t c = x->Rows(), t = x->Cols();
  const int pad = dilation * (kernel - 1) / 2;
  Matrix v = Matrix::Zero(c * kernel, t);
  for (int q = 0; q < kernel; ++q) {
    const int64_t shift = static_cast<int64_t>(q) * dilation - pad;
    for (int64_t j = 0; j < t; ++j) {
      const int64_t src = j + shift;
      if (src >= 0 && src < t) v.block(q * c, j, c, 1) = x->value.col(src);
    }
  }
  return NewNode(std::move(v), {x}, [x, kernel, dilation, c, t, pad](Node& n) {
    Matrix g = Matrix::Zero(c, t);
    for (int q = 0; q < kernel; ++q) {
      const int64_t shift = static_cast<int64_t>(q) * dilation - pad;
      for (int64_t j = 0; j < t; ++j) {
        const int64_t src = j + shift;
        if (src >= 0 && src < t) g.col(src) += n.grad.block(q * c, j, c, 1);
      }
    }
    AccumGrad(x, g);
  });
}

// ---------------------------------------------------------------------------
// reductions

Var SumAll(const Var& a) {
  Matrix v(1, 1);
  v(0, 0) = a->value.sum();
  return NewNode(std::move(v), {a}, [a](Node& n) {
    AccumGrad(a, Matrix::Constant(a->Rows(), a->Cols(), n.grad(0, 0)));
  });
}

Var MeanAll(const Var& a) {
  const double inv = 1.0 / static_cast<double>(a->value.size());
  Matrix v(1, 1);
  v(0, 0) = a->value.sum() * inv;
  return NewNode(std::move(v), {a}, [a, inv](Node& n) {
    AccumGrad(a, Matrix::Constant(a->Rows(), a->Cols(), n.grad(0, 0) * inv));
  });
}

Var MeanCols(const Var& a) {
  const double inv = 1.0 / static_cast<double>(a->Cols());
  Matrix v = a->value.rowwise().mean();
  return NewNode(std::move(v), {a}, [a, inv](Node& n) {
    AccumGrad(a, (n.grad.col(0) * inv).replicate(1, a->Cols()));
  });
}

Var SoftmaxCols(const Var& a) {
  Matrix v(a->Rows(), a->Cols());
  for (int64_t j = 0; j < a->Cols(); ++j) {
    Eigen::VectorXd col = a->value.col(j);
    col.array() -= col.maxCoeff();
    Eigen::VectorXd e = col.array().exp();
    v.col(j) = e / e.sum();
  }
  auto out = NewNode(std::move(v), {a}, nullptr);
  if (out->requires_grad) {
    Node* self = out.get();
    out->backward_fn = [a, self](Node& n) {
      Matrix g(a->Rows(), a->Cols());
      for (int64_t j = 0; j < a->Cols(); ++j) {
        const Eigen::VectorXd s = self->value.col(j);
        const Eigen::VectorXd gj = n.grad.col(j);
        const double dot = s.dot(gj);
        g.col(j) =
            s.cwiseProduct(gj - Eigen::VectorXd::Constant(s.size(), dot));
      }
      AccumGrad(a, g);
    };
  }
  return out;
}

Var SoftmaxRows(const Var& a) {
  Matrix v(a->Rows(), a->Cols());
  for (int64_t i = 0; i < a->Rows(); ++i) {
    Eigen::RowVectorXd row = a->value.row(i);
    row.array() -= row.maxCoeff();
    Eigen::RowVectorXd e = row.array().exp();
    v.row(i) = e / e.sum();
  }
  auto out = NewNode(std::move(v), {a}, nullptr);
  if (out->requires_grad) {
    Node* self = out.get();
    out->backward_fn = [a, self](Node& n) {
      Matrix g(a->Rows(), a->Cols());
      for (int64_t i = 0; i < a->Rows(); ++i) {
        const Eigen::RowVectorXd s = self->value.row(i);
        const Eigen::RowVectorXd gi = n.grad.row(i);
        const double dot = s.dot(gi);
        g.row(i) = s.cwiseProduct(
            gi - Eigen::RowVectorXd::Constant(s.size(), dot));
      }
      AccumGrad(a, g);
    };
  }
  return out;
}

// ---------------------------------------------------------------------------
// losses

Var MseLoss(const Var& pred, const Matrix& target) {
  EMOAUG_CHECK(pred->Rows() == target.rows() && pred->Cols() == target.cols(),
               ShapeError, "MseLoss shape mismatch: " << pred->Rows() << "x"
                                                      << pred->Cols() << " vs "
                                                      << target.rows() << "x"
                                                      << target.cols());
  const Matrix diff = pred->value - target;
  const double inv = 1.0 / static_cast<double>(diff.size());
  Matrix v(1, 1);
  v(0, 0) = diff.squaredNorm() * inv;
  return NewNode(std::move(v), {pred}, [pred, diff, inv](Node& n) {
    AccumGrad(pred, 2.0 * inv * n.grad(0, 0) * diff);
  });
}

Var MaskedMseLoss(const Var& pred, const Matrix& target, const Matrix& mask) {
  EMOAUG_CHECK(pred->Rows() == target.rows() && pred->Cols() == target.cols() &&
                   mask.rows() == target.rows() && mask.cols() == target.cols(),
               ShapeError, "MaskedMseLoss shape mismatch");
  const double count = std::max(1.0, mask.sum());
  const Matrix diff = (pred->value - target).cwiseProduct(mask);
  Matrix v(1, 1);
  v(0, 0) = diff.squaredNorm() / count;
  return NewNode(std::move(v), {pred}, [pred, diff, count](Node& n) {
    AccumGrad(pred, 2.0 / count * n.grad(0, 0) * diff);
  });
}

Var BceWithLogits(const Var& logits, const Matrix& targets, double pos_weight) {
  EMOAUG_CHECK(logits->Rows() == targets.rows() && logits->Cols() == targets.cols(),
               ShapeError, "BceWithLogits shape mismatch");
  const double inv = 1.0 / static_cast<double>(targets.size());
  double total = 0.0;
  for (int64_t i = 0; i < targets.rows(); ++i)
    for (int64_t j = 0; j < targets.cols(); ++j) {
      const double z = logits->value(i, j), y = targets(i, j);
      total += pos_weight * y * Softplus(-z) + (1.0 - y) * (z + Softplus(-z));
    }
  Matrix v(1, 1);
  v(0, 0) = total * inv;
  return NewNode(std::move(v), {logits}, [logits, targets, pos_weight, inv](Node& n) {
    Matrix g(targets.rows(), targets.cols());
    for (int64_t i = 0; i < targets.rows(); ++i)
      for (int64_t j = 0; j < targets.cols(); ++j) {
        const double z = logits->value(i, j), y = targets(i, j);
        const double s = 1.0 / (1.0 + std::exp(-z));
        g(i, j) = (s * (1.0 - y + pos_weight * y) - pos_weight * y) * inv;
      }
    AccumGrad(logits, n.grad(0, 0) * g);
  });
}

Var CrossEntropyCols(const Var& logits, const std::vector<int>& labels) {
  EMOAUG_CHECK(static_cast<int64_t>(labels.size()) == logits->Cols(), ShapeError,
               "one label per logits column required");
  const int64_t n_cols = logits->Cols();
  const double inv = 1.0 / static_cast<double>(n_cols);
  double total = 0.0;
  Matrix soft(logits->Rows(), n_cols);
  for (int64_t j = 0; j < n_cols; ++j) {
    EMOAUG_CHECK(labels[j] >= 0 && labels[j] < logits->Rows(), DataError,
                 "label out of range: " << labels[j]);
    Eigen::VectorXd col = logits->value.col(j);
    const double mx = col.maxCoeff();
    const Eigen::VectorXd e = (col.array() - mx).exp();
    const double z = e.sum();
    soft.col(j) = e / z;
    total += std::log(z) + mx - col(labels[j]);
  }
  Matrix v(1, 1);
  v(0, 0) = total * inv;
  return NewNode(std::move(v), {logits}, [logits, labels, soft, inv](Node& n) {
    Matrix g = soft;
    for (int64_t j = 0; j < g.cols(); ++j) g(labels[j], j) -= 1.0;
    AccumGrad(logits, n.grad(0, 0) * inv * g);
  });
}

Var Dropout(const Var& a, double p, Rng* rng, bool active) {
  EMOAUG_CHECK(p >= 0.0 && p < 1.0, ConfigError, "dropout p must be in [0,1)");
  if (!active || p == 0.0) return a;
  EMOAUG_CHECK(rng != nullptr, ContractError, "active dropout needs an RNG");
  std::bernoulli_distribution keep(1.0 - p);
  Matrix mask(a->Rows(), a->Cols());
  const double scale = 1.0 / (1.0 - p);
  for (int64_t i = 0; i < a->Rows(); ++i)
    for (int64_t j = 0; j < a->Cols(); ++j)
      mask(i, j) = keep(*rng) ? scale : 0.0;
  return NewNode(a->value.cwiseProduct(mask), {a}, [a, mask](Node& n) {
    AccumGrad(a, n.grad.cwiseProduct(mask));
  });
}

}  // namespace emoaug::ad
