// tests/kmeans_test.cc

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

#include <filesystem>
#include <random>

#include <doctest.h>

#include "emoaug/kmeans.h"

using namespace emoaug;

TEST_CASE("deduplication collapses adjacent repeats only") {
  UnitSequence u;
  u.units = {23, 23, 2, 2, 7, 7, 7, 57};
  u.k = 200;
  UnitSequence d = Deduplicate(u);
  CHECK(d.units == std::vector<int>{23, 2, 7, 57});
  CHECK(d.deduped);
  // Non-adjacent repeats survive.
  UnitSequence v;
  v.units = {5, 9, 5, 9, 9, 5};
  v.k = 16;
  CHECK(Deduplicate(v).units == std::vector<int>{5, 9, 5, 9, 5});
}

TEST_CASE("deduplicating an already-deduped sequence is rejected") {
  UnitSequence u;
  u.units = {1, 2, 3};
  u.k = 8;
  UnitSequence d = Deduplicate(u);
  CHECK_THROWS_AS(Deduplicate(d), ContractError);
  // Idempotence in the value sense: re-collapsing the label list changes
  // nothing because no adjacent repeats remain.
  UnitSequence again;
  again.units = d.units;
  again.k = d.k;
  CHECK(Deduplicate(again).units == d.units);
}

TEST_CASE("quantization equals brute-force nearest centroid on 1000 frames") {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int dim = 8, k = 20, n = 1000;
  Eigen::MatrixXd frames(n, dim);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < dim; ++j) frames(i, j) = gauss(rng);

  KMeansCodebook cb = FitCodebook(frames, k, 7);
  UnitSequence u = QuantizeFrames(frames, cb);
  REQUIRE(static_cast<int>(u.units.size()) == n);
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (frames.row(i) - cb.centroids.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double d = (frames.row(i) - cb.centroids.row(c)).squaredNorm();
      if (d < best_d) {  // strict: ties stay at the lowest index
        best_d = d;
        best = c;
      }
    }
    REQUIRE(u.units[i] == best);
  }
}

TEST_CASE("fit is deterministic per seed and refuses k > distinct frames") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd frames(200, 4);
  for (int i = 0; i < frames.rows(); ++i)
    for (int j = 0; j < 4; ++j) frames(i, j) = gauss(rng);
  KMeansCodebook a = FitCodebook(frames, 10, 99);
  KMeansCodebook b = FitCodebook(frames, 10, 99);
  CHECK(a.centroids == b.centroids);
  KMeansCodebook c = FitCodebook(frames, 10, 100);
  CHECK(a.centroids != c.centroids);

  Eigen::MatrixXd tiny = Eigen::MatrixXd::Ones(50, 4);  // one distinct frame
  CHECK_THROWS_AS(FitCodebook(tiny, 3, 0), DataError);
}

TEST_CASE("more clusters never increase inertia on the same data") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd frames(300, 6);
  for (int i = 0; i < frames.rows(); ++i)
    for (int j = 0; j < 6; ++j) frames(i, j) = gauss(rng);
  const double i4 = Inertia(frames, FitCodebook(frames, 4, 5));
  const double i16 = Inertia(frames, FitCodebook(frames, 16, 5));
  CHECK(i16 < i4);
}

TEST_CASE("codebook round trip through disk") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd frames(100, 5);
  for (int i = 0; i < frames.rows(); ++i)
    for (int j = 0; j < 5; ++j) frames(i, j) = gauss(rng);
  KMeansCodebook cb = FitCodebook(frames, 6, 13);
  const std::string path =
      (std::filesystem::temp_directory_path() / "emoaug_cb_test.bin").string();
  SaveCodebook(path, cb);
  KMeansCodebook loaded = LoadCodebook(path);
  CHECK(loaded.centroids == cb.centroids);
  CHECK(loaded.seed == cb.seed);
  std::filesystem::remove(path);
}
