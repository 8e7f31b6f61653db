// emoaug/kmeans.h

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

#ifndef EMOAUG_KMEANS_H_
#define EMOAUG_KMEANS_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "emoaug/common.h"

namespace emoaug {

// Cluster labels of one utterance; raw (per frame) or deduplicated.
struct UnitSequence {
  std::vector<int> units;
  bool deduped = false;
  int k = 0;  // codebook size the labels refer to
};

struct KMeansCodebook {
  Eigen::MatrixXd centroids;  // k x dim
  uint64_t seed = 0;
  int K() const { return static_cast<int>(centroids.rows()); }
  int Dim() const { return static_cast<int>(centroids.cols()); }
};

struct KMeansOptions {
  int max_iters = 100;
  double tol = 1e-8;  // relative centroid shift for convergence
};

// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed seed.
// `frames` is N x dim. Throws DataError when fewer than k distinct frames.
KMeansCodebook FitCodebook(const Eigen::MatrixXd& frames, int k, uint64_t seed,
                           const KMeansOptions& opts = {});

// Sum of squared distances to assigned centroids.
double Inertia(const Eigen::MatrixXd& frames, const KMeansCodebook& cb);

// Nearest centroid per frame (Euclidean), ties broken toward lowest index.
UnitSequence QuantizeFrames(const Eigen::MatrixXd& frames,
                            const KMeansCodebook& cb);

// Run-length collapse of adjacent equal labels. Input must not already be
// deduplicated.
UnitSequence Deduplicate(const UnitSequence& u);

// Binary persistence: magic "EMOAKM1\n", then k, dim, seed, row-major doubles.
void SaveCodebook(const std::string& path, const KMeansCodebook& cb);
KMeansCodebook LoadCodebook(const std::string& path);

}  // namespace emoaug

#endif  // EMOAUG_KMEANS_H_
