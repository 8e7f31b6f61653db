// src/layers.cc

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

#include "emoaug/layers.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace emoaug {

using ad::Matrix;
using ad::Var;

Matrix XavierUniform(int64_t rows, int64_t cols, Rng* rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> u(-limit, limit);
  Matrix m(rows, cols);
  for (int64_t i = 0; i < rows; ++i)
    for (int64_t j = 0; j < cols; ++j) m(i, j) = u(*rng);
  return m;
}

Matrix Orthogonal(int64_t n, Rng* rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a(n, n);
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = 0; j < n; ++j) a(i, j) = g(*rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  // Fix signs so the factorization is unique.
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int64_t j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

// --- Linear ---

Linear::Linear(int in_dim, int out_dim, Rng* rng)
    : weight(ad::Parameter(XavierUniform(out_dim, in_dim, rng))),
      bias(ad::Parameter(Matrix::Zero(out_dim, 1))) {}

Var Linear::Forward(const Var& x, Mode, Rng*) {
  return ad::AddColwise(ad::MatMul(weight, x), bias);
}

void Linear::CollectParams(const std::string& prefix,
                           std::vector<NamedParam>* out) const {
  out->push_back({prefix + ".W", weight});
  out->push_back({prefix + ".b", bias});
}

// --- Conv1d ---

Conv1d::Conv1d(int in_ch_, int out_ch, int kernel_, int dilation_, Rng* rng)
    : weight(ad::Parameter(
          XavierUniform(out_ch, static_cast<int64_t>(in_ch_) * kernel_, rng))),
      bias(ad::Parameter(Matrix::Zero(out_ch, 1))),
      in_ch(in_ch_),
      kernel(kernel_),
      dilation(dilation_) {}

Var Conv1d::Forward(const Var& x, Mode, Rng*) {
  EMOAUG_CHECK(x->Rows() == in_ch, ShapeError,
               "Conv1d expects " << in_ch << " channels, got " << x->Rows());
  return ad::AddColwise(ad::MatMul(weight, ad::Unfold(x, kernel, dilation)),
                        bias);
}

void Conv1d::CollectParams(const std::string& prefix,
                           std::vector<NamedParam>* out) const {
  out->push_back({prefix + ".W", weight});
  out->push_back({prefix + ".b", bias});
}

// --- BatchNorm1d ---

BatchNorm1d::BatchNorm1d(int channels, double momentum_, double eps_)
    : gamma(ad::Parameter(Matrix::Ones(channels, 1))),
      beta(ad::Parameter(Matrix::Zero(channels, 1))),
      running_mean(ad::Constant(Matrix::Zero(channels, 1))),
      running_var(ad::Constant(Matrix::Ones(channels, 1))),
      momentum(momentum_),
      eps(eps_) {}

Var BatchNorm1d::Forward(const Var& x, Mode mode, Rng*) {
  EMOAUG_CHECK(x->Rows() == gamma->Rows(), ShapeError,
               "BatchNorm expects " << gamma->Rows() << " channels, got "
                                    << x->Rows());
  if (mode == Mode::kTrain) {
    EMOAUG_CHECK(x->Cols() >= 2, ShapeError,
                 "BatchNorm train mode needs >= 2 time steps");
    Var mu = ad::MeanCols(x);
    Var xc = ad::SubColwise(x, mu);
    Var var = ad::MeanCols(ad::CMul(xc, xc));
    Var inv_std = ad::Rsqrt(ad::AddScalar(var, eps));
    // Track running statistics for eval mode.
    running_mean->value =
        (1.0 - momentum) * running_mean->value + momentum * mu->value;
    running_var->value =
        (1.0 - momentum) * running_var->value + momentum * var->value;
    return ad::AddColwise(ad::MulColwise(ad::MulColwise(xc, inv_std), gamma),
                          beta);
  }
  Matrix inv = (running_var->value.array() + eps).rsqrt();
  Var xc = ad::SubColwise(x, running_mean);
  return ad::AddColwise(
      ad::MulColwise(ad::MulColwise(xc, ad::Constant(inv)), gamma), beta);
}

void BatchNorm1d::CollectParams(const std::string& prefix,
                                std::vector<NamedParam>* out) const {
  out->push_back({prefix + ".gamma", gamma});
  out->push_back({prefix + ".beta", beta});
  out->push_back({prefix + ".running_mean", running_mean});
  out->push_back({prefix + ".running_var", running_var});
}

// --- Embedding ---

Embedding::Embedding(int dim, int vocab, Rng* rng)
    : table(ad::Parameter(XavierUniform(dim, vocab, rng))) {}

Var Embedding::Forward(const Var&, Mode, Rng*) {
  throw ContractError("Embedding::Forward: use Lookup(indices)");
}

Var Embedding::Lookup(const std::vector<int>& indices) const {
  EMOAUG_CHECK(!indices.empty(), DataError, "empty index sequence");
  return ad::GatherCols(table, indices);
}

void Embedding::CollectParams(const std::string& prefix,
                              std::vector<NamedParam>* out) const {
  out->push_back({prefix + ".table", table});
}

// --- Lstm ---

Lstm::Lstm(int in_dim_, int hidden_, Rng* rng)
    : in_dim(in_dim_), hidden(hidden_) {
  Matrix w(4 * hidden, in_dim + hidden);
  w.leftCols(in_dim) = XavierUniform(4 * hidden, in_dim, rng);
  for (int g = 0; g < 4; ++g)
    w.block(g * hidden, in_dim, hidden, hidden) = Orthogonal(hidden, rng);
  weight = ad::Parameter(std::move(w));
  Matrix b = Matrix::Zero(4 * hidden, 1);
  b.block(hidden, 0, hidden, 1).setOnes();  // forget-gate bias 1
  bias = ad::Parameter(std::move(b));
}

Lstm::State Lstm::InitialState() const {
  return {ad::Constant(Matrix::Zero(hidden, 1)),
          ad::Constant(Matrix::Zero(hidden, 1))};
}

Lstm::State Lstm::Step(const Var& x, const State& s) const {
  EMOAUG_CHECK(x->Rows() == in_dim && x->Cols() == 1, ShapeError,
               "Lstm step input must be " << in_dim << "x1, got " << x->Rows()
                                          << "x" << x->Cols());
  Var z = ad::AddColwise(ad::MatMul(weight, ad::ConcatRows({x, s.h})), bias);
  Var i = ad::Sigmoid(ad::SliceRows(z, 0, hidden));
  Var f = ad::Sigmoid(ad::SliceRows(z, hidden, hidden));
  Var g = ad::Tanh(ad::SliceRows(z, 2 * hidden, hidden));
  Var o = ad::Sigmoid(ad::SliceRows(z, 3 * hidden, hidden));
  Var c = ad::Add(ad::CMul(f, s.c), ad::CMul(i, g));
  Var h = ad::CMul(o, ad::Tanh(c));
  return {h, c};
}

Var Lstm::Forward(const Var& x, Mode, Rng*) {
  EMOAUG_CHECK(x->Cols() >= 1, DataError, "empty sequence");
  State s = InitialState();
  std::vector<Var> hs;
  hs.reserve(x->Cols());
  for (int64_t t = 0; t < x->Cols(); ++t) {
    s = Step(ad::SliceCols(x, t), s);
    hs.push_back(s.h);
  }
  return ad::ConcatCols(hs);
}

void Lstm::CollectParams(const std::string& prefix,
                         std::vector<NamedParam>* out) const {
  out->push_back({prefix + ".W", weight});
  out->push_back({prefix + ".b", bias});
}

// --- BiLstm ---

BiLstm::BiLstm(int in_dim, int hidden, Rng* rng)
    : fw(in_dim, hidden, rng), bw(in_dim, hidden, rng) {}

Var BiLstm::Forward(const Var& x, Mode, Rng*) {
  const int64_t t_len = x->Cols();
  EMOAUG_CHECK(t_len >= 1, DataError, "empty sequence");
  std::vector<Var> cols(t_len);
  for (int64_t t = 0; t < t_len; ++t) {
    // Column slice via transpose-free path: gather the t-th column.
    cols[t] = ad::SliceCols(x, t);
  }
  std::vector<Var> hf(t_len), hb(t_len);
  Lstm::State sf = fw.InitialState();
  for (int64_t t = 0; t < t_len; ++t) {
    sf = fw.Step(cols[t], sf);
    hf[t] = sf.h;
  }
  Lstm::State sb = bw.InitialState();
  for (int64_t t = t_len - 1; t >= 0; --t) {
    sb = bw.Step(cols[t], sb);
    hb[t] = sb.h;
  }
  std::vector<Var> out_cols(t_len);
  for (int64_t t = 0; t < t_len; ++t)
    out_cols[t] = ad::ConcatRows({hf[t], hb[t]});
  return ad::ConcatCols(out_cols);
}

void BiLstm::CollectParams(const std::string& prefix,
                           std::vector<NamedParam>* out) const {
  fw.CollectParams(prefix + ".fw", out);
  bw.CollectParams(prefix + ".bw", out);
}

// --- factory ---

namespace {

class Activation : public Layer {
 public:
  enum Kind { kRelu, kTanh, kSoftmax };
  explicit Activation(Kind kind) : kind_(kind) {}
  Var Forward(const Var& x, Mode, Rng*) override {
    switch (kind_) {
      case kRelu:
        return ad::Relu(x);
      case kTanh:
        return ad::Tanh(x);
      case kSoftmax:
        return ad::SoftmaxCols(x);
    }
    throw ContractError("unreachable");
  }
  void CollectParams(const std::string&, std::vector<NamedParam>*) const override {}

 private:
  Kind kind_;
};

class EmbeddingSeq : public Layer {
 public:
  EmbeddingSeq(int dim, int vocab, Rng* rng) : emb_(dim, vocab, rng) {}
  // Interprets a 1xL input of integral values as indices.
  Var Forward(const Var& x, Mode, Rng*) override {
    EMOAUG_CHECK(x->Rows() == 1, ShapeError, "EmbeddingSeq expects 1xL indices");
    std::vector<int> idx(x->Cols());
    for (int64_t j = 0; j < x->Cols(); ++j)
      idx[j] = static_cast<int>(std::lround(x->value(0, j)));
    return emb_.Lookup(idx);
  }
  void CollectParams(const std::string& prefix,
                     std::vector<NamedParam>* out) const override {
    emb_.CollectParams(prefix, out);
  }

 private:
  Embedding emb_;
};

}  // namespace

std::unique_ptr<Layer> MakeLayer(const LayerSpec& spec, Rng* rng) {
  const std::string& k = spec.kind;
  if (k == "FC") return std::make_unique<Linear>(spec.in_dim, spec.out_dim, rng);
  if (k == "Conv1D")
    return std::make_unique<Conv1d>(spec.in_dim, spec.out_dim, spec.kernel,
                                    spec.dilation, rng);
  if (k == "BatchNorm") return std::make_unique<BatchNorm1d>(spec.in_dim);
  if (k == "ReLU") return std::make_unique<Activation>(Activation::kRelu);
  if (k == "Tanh") return std::make_unique<Activation>(Activation::kTanh);
  if (k == "Softmax") return std::make_unique<Activation>(Activation::kSoftmax);
  if (k == "LSTM") return std::make_unique<Lstm>(spec.in_dim, spec.hidden, rng);
  if (k == "BiLSTM")
    return std::make_unique<BiLstm>(spec.in_dim, spec.hidden, rng);
  if (k == "Embedding")
    return std::make_unique<EmbeddingSeq>(spec.out_dim, spec.vocab, rng);
  throw ConfigError("unknown layer kind: " + k);
}

// --- gradient checking ---

namespace {

double RelError(double a, double f) {
  return std::abs(a - f) / std::max({1.0, std::abs(a), std::abs(f)});
}

}  // namespace

GradCheckReport GradCheckFn(
    const std::function<ad::Var(const std::vector<ad::Var>&)>& fn,
    const std::vector<NamedParam>& leaves, double eps, double tol) {
  EMOAUG_CHECK(eps > 0 && eps <= 1e-2, ContractError, "eps must be in (0, 1e-2]");
  std::vector<ad::Var> vars;
  for (const auto& l : leaves) vars.push_back(l.var);

  ad::ZeroGrad(vars);
  Var loss = fn(vars);
  ad::Backward(loss);
  std::vector<Matrix> analytic;
  for (const auto& v : vars)
    analytic.push_back(v->grad.size() == 0
                           ? Matrix::Zero(v->Rows(), v->Cols())
                           : v->grad);

  GradCheckReport rep;
  Rng pick_rng(12345);
  for (size_t li = 0; li < vars.size(); ++li) {
    if (!vars[li]->requires_grad) continue;
    Matrix& val = vars[li]->value;
    const int64_t n_entries = val.size();
    // For large tensors check a deterministic random subset.
    const int64_t budget = std::min<int64_t>(n_entries, 200);
    std::vector<int64_t> entries(n_entries);
    for (int64_t i = 0; i < n_entries; ++i) entries[i] = i;
    if (budget < n_entries) std::shuffle(entries.begin(), entries.end(), pick_rng);
    for (int64_t e = 0; e < budget; ++e) {
      const int64_t idx = entries[e];
      double* p = val.data() + idx;
      const double orig = *p;
      *p = orig + eps;
      const double fp = fn(vars)->value(0, 0);
      *p = orig - eps;
      const double fm = fn(vars)->value(0, 0);
      *p = orig;
      const double fd = (fp - fm) / (2.0 * eps);
      const double an = analytic[li](idx % val.rows(), idx / val.rows());
      const double err = RelError(an, fd);
      ++rep.num_checked;
      if (err > rep.max_rel_error) {
        rep.max_rel_error = err;
        rep.worst_param = leaves[li].name;
      }
    }
  }
  rep.passed = rep.max_rel_error <= tol;
  return rep;
}

GradCheckReport GradCheckLayer(Layer* layer, int in_rows, int in_cols,
                               double eps, double tol, uint64_t seed) {
  GradCheckReport rep;
  for (int attempt = 0; attempt < 3; ++attempt) {
    Rng rng(seed + attempt * 7919);
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix in(in_rows, in_cols);
    for (int64_t i = 0; i < in.size(); ++i) in.data()[i] = g(rng);
    Var input = ad::Parameter(std::move(in));

    std::vector<NamedParam> leaves = layer->Params("p");
    leaves.push_back({"input", input});

    Matrix proj;
    bool proj_set = false;
    auto fn = [&](const std::vector<ad::Var>&) -> Var {
      Var out = layer->Forward(input, Mode::kTrain, &rng);
      if (!proj_set) {
        Rng prng(seed + 1);
        std::normal_distribution<double> pg(0.0, 1.0);
        proj.resize(out->Rows(), out->Cols());
        for (int64_t i = 0; i < proj.size(); ++i) proj.data()[i] = pg(prng);
        proj_set = true;
      }
      return ad::SumAll(ad::CMul(out, ad::Constant(proj)));
    };
    GradCheckReport r = GradCheckFn(fn, leaves, eps, tol);
    r.resamples = attempt;
    if (r.passed || attempt == 2) return r;
    rep = r;  // non-smooth point suspected (e.g. ReLU kink): redraw
  }
  return rep;
}

// --- checkpoints ---

namespace {
constexpr char kCkptMagic[] = "EMOACKP1";
constexpr uint32_t kCkptVersion = 1;
}  // namespace

void SaveParamMap(const std::string& path,
                  const std::vector<NamedParam>& params) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot write checkpoint: " + tmp);
    os.write(kCkptMagic, 8);
    os.write(reinterpret_cast<const char*>(&kCkptVersion), 4);
    const uint64_t count = params.size();
    os.write(reinterpret_cast<const char*>(&count), 8);
    for (const auto& p : params) {
      const uint32_t len = static_cast<uint32_t>(p.name.size());
      os.write(reinterpret_cast<const char*>(&len), 4);
      os.write(p.name.data(), len);
      const int64_t rows = p.var->Rows(), cols = p.var->Cols();
      os.write(reinterpret_cast<const char*>(&rows), 8);
      os.write(reinterpret_cast<const char*>(&cols), 8);
      os.write(reinterpret_cast<const char*>(p.var->value.data()),
               sizeof(double) * rows * cols);
    }
    if (!os) throw IoError("short write: " + tmp);
  }
  // Atomic publish.
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw IoError("cannot rename checkpoint into place: " + path);
}

std::map<std::string, Matrix> LoadParamMap(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != kCkptMagic)
    throw FormatError("bad checkpoint magic: " + path);
  uint32_t version = 0;
  is.read(reinterpret_cast<char*>(&version), 4);
  if (version != kCkptVersion)
    throw FormatError("unsupported checkpoint version: " + path);
  uint64_t count = 0;
  is.read(reinterpret_cast<char*>(&count), 8);
  std::map<std::string, Matrix> out;
  for (uint64_t i = 0; i < count; ++i) {
    uint32_t len = 0;
    is.read(reinterpret_cast<char*>(&len), 4);
    std::string name(len, '\0');
    is.read(name.data(), len);
    int64_t rows = 0, cols = 0;
    is.read(reinterpret_cast<char*>(&rows), 8);
    is.read(reinterpret_cast<char*>(&cols), 8);
    if (!is || rows < 0 || cols < 0)
      throw FormatError("corrupt checkpoint entry: " + path);
    Matrix m(rows, cols);
    is.read(reinterpret_cast<char*>(m.data()), sizeof(double) * rows * cols);
    if (!is) throw FormatError("truncated checkpoint: " + path);
    out.emplace(std::move(name), std::move(m));
  }
  return out;
}

void ApplyParamMap(const std::map<std::string, Matrix>& map,
                   const std::vector<NamedParam>& params, bool allow_partial) {
  for (const auto& p : params) {
    auto it = map.find(p.name);
    if (it == map.end()) {
      if (allow_partial) continue;
      throw DataError("checkpoint missing parameter: " + p.name);
    }
    EMOAUG_CHECK(it->second.rows() == p.var->Rows() &&
                     it->second.cols() == p.var->Cols(),
                 ShapeError, "checkpoint shape mismatch for "
                                 << p.name << ": " << it->second.rows() << "x"
                                 << it->second.cols() << " vs "
                                 << p.var->Rows() << "x" << p.var->Cols());
    p.var->value = it->second;
  }
}

}  // namespace emoaug
