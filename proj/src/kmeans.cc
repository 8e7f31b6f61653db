// src/kmeans.cc

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

#include "emoaug/kmeans.h"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>

namespace emoaug {

namespace {

int NearestCentroid(const Eigen::RowVectorXd& f, const Eigen::MatrixXd& c) {
  int best = 0;
  double best_d = (c.row(0) - f).squaredNorm();
  for (int j = 1; j < c.rows(); ++j) {
    const double d = (c.row(j) - f).squaredNorm();
    if (d < best_d) {  // strict: ties keep the lowest index
      best_d = d;
      best = j;
    }
  }
  return best;
}

int64_t CountDistinctRows(const Eigen::MatrixXd& frames, int64_t cap) {
  std::set<std::vector<double>> seen;
  for (int64_t i = 0; i < frames.rows(); ++i) {
    std::vector<double> row(frames.cols());
    for (int j = 0; j < frames.cols(); ++j) row[j] = frames(i, j);
    seen.insert(std::move(row));
    if (static_cast<int64_t>(seen.size()) >= cap) break;
  }
  return static_cast<int64_t>(seen.size());
}

}  // namespace

KMeansCodebook FitCodebook(const Eigen::MatrixXd& frames, int k, uint64_t seed,
                           const KMeansOptions& opts) {
  EMOAUG_CHECK(k >= 2, ConfigError, "k must be >= 2, got " << k);
  const int64_t n = frames.rows();
  EMOAUG_CHECK(n >= k, DataError, "need at least k=" << k << " frames, got " << n);
  EMOAUG_CHECK(CountDistinctRows(frames, k) >= k, DataError,
               "fewer than k=" << k << " distinct frames");
  EMOAUG_CHECK(frames.allFinite(), DataError, "non-finite feature frames");

  Rng rng(seed);
  Eigen::MatrixXd centroids(k, frames.cols());

  // k-means++ seeding.
  {
    std::uniform_int_distribution<int64_t> first(0, n - 1);
    centroids.row(0) = frames.row(first(rng));
    Eigen::VectorXd d2(n);
    for (int64_t i = 0; i < n; ++i)
      d2(i) = (frames.row(i) - centroids.row(0)).squaredNorm();
    for (int j = 1; j < k; ++j) {
      const double total = d2.sum();
      int64_t pick = 0;
      if (total > 0) {
        std::uniform_real_distribution<double> u(0.0, total);
        double r = u(rng), acc = 0.0;
        for (int64_t i = 0; i < n; ++i) {
          acc += d2(i);
          if (acc >= r) {
            pick = i;
            break;
          }
        }
      } else {
        std::uniform_int_distribution<int64_t> any(0, n - 1);
        pick = any(rng);
      }
      centroids.row(j) = frames.row(pick);
      for (int64_t i = 0; i < n; ++i)
        d2(i) = std::min(d2(i), (frames.row(i) - centroids.row(j)).squaredNorm());
    }
  }

  std::vector<int> assign(n, -1);
  const double scale = std::max(1.0, centroids.norm());
  for (int it = 0; it < opts.max_iters; ++it) {
    for (int64_t i = 0; i < n; ++i)
      assign[i] = NearestCentroid(frames.row(i), centroids);

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, frames.cols());
    std::vector<int64_t> counts(k, 0);
    for (int64_t i = 0; i < n; ++i) {
      sums.row(assign[i]) += frames.row(i);
      ++counts[assign[i]];
    }
    Eigen::MatrixXd next = centroids;
    for (int j = 0; j < k; ++j) {
      if (counts[j] > 0) next.row(j) = sums.row(j) / counts[j];
      // Empty cluster: re-seed at the point farthest from its centroid.
      else {
        int64_t far_i = 0;
        double far_d = -1.0;
        for (int64_t i = 0; i < n; ++i) {
          const double d =
              (frames.row(i) - centroids.row(assign[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far_i = i;
          }
        }
        next.row(j) = frames.row(far_i);
      }
    }
    const double shift = (next - centroids).norm() / scale;
    centroids = next;
    if (shift < opts.tol) break;
  }

  KMeansCodebook cb;
  cb.centroids = centroids;
  cb.seed = seed;
  return cb;
}

double Inertia(const Eigen::MatrixXd& frames, const KMeansCodebook& cb) {
  double total = 0.0;
  for (int64_t i = 0; i < frames.rows(); ++i) {
    const int j = NearestCentroid(frames.row(i), cb.centroids);
    total += (frames.row(i) - cb.centroids.row(j)).squaredNorm();
  }
  return total;
}

UnitSequence QuantizeFrames(const Eigen::MatrixXd& frames,
                            const KMeansCodebook& cb) {
  EMOAUG_CHECK(frames.cols() == cb.Dim(), ConfigError,
               "feature dim " << frames.cols() << " != codebook dim " << cb.Dim());
  UnitSequence u;
  u.k = cb.K();
  u.units.resize(frames.rows());
  for (int64_t i = 0; i < frames.rows(); ++i)
    u.units[i] = NearestCentroid(frames.row(i), cb.centroids);
  return u;
}

UnitSequence Deduplicate(const UnitSequence& u) {
  EMOAUG_CHECK(!u.deduped, ContractError, "sequence already deduplicated");
  UnitSequence out;
  out.k = u.k;
  out.deduped = true;
  for (int v : u.units) {
    if (out.units.empty() || out.units.back() != v) out.units.push_back(v);
  }
  return out;
}

void SaveCodebook(const std::string& path, const KMeansCodebook& cb) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write codebook: " + path);
  os.write("EMOAKM1\n", 8);
  const int64_t k = cb.K(), dim = cb.Dim();
  os.write(reinterpret_cast<const char*>(&k), 8);
  os.write(reinterpret_cast<const char*>(&dim), 8);
  os.write(reinterpret_cast<const char*>(&cb.seed), 8);
  for (int64_t i = 0; i < k; ++i)
    for (int64_t j = 0; j < dim; ++j) {
      const double v = cb.centroids(i, j);
      os.write(reinterpret_cast<const char*>(&v), 8);
    }
  if (!os) throw IoError("short write: " + path);
}

KMeansCodebook LoadCodebook(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read codebook: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != "EMOAKM1\n")
    throw FormatError("bad codebook magic: " + path);
  int64_t k = 0, dim = 0;
  uint64_t seed = 0;
  is.read(reinterpret_cast<char*>(&k), 8);
  is.read(reinterpret_cast<char*>(&dim), 8);
  is.read(reinterpret_cast<char*>(&seed), 8);
  if (!is || k < 2 || dim < 1) throw FormatError("bad codebook header: " + path);
  KMeansCodebook cb;
  cb.seed = seed;
  cb.centroids.resize(k, dim);
  for (int64_t i = 0; i < k; ++i)
    for (int64_t j = 0; j < dim; ++j) {
      double v;
      is.read(reinterpret_cast<char*>(&v), 8);
      cb.centroids(i, j) = v;
    }
  if (!is) throw FormatError("truncated codebook: " + path);
  return cb;
}

}  // namespace emoaug
