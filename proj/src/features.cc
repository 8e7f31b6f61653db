// src/features.cc

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

#include "emoaug/features.h"

#include <fstream>

namespace emoaug {

Eigen::MatrixXd FileFeatureAdapter::Extract(const Waveform&) const {
  throw ContractError(
      "FileFeatureAdapter serves stored features; use Load(utt_id)");
}

Eigen::MatrixXd FileFeatureAdapter::Load(const std::string& utt_id) const {
  Eigen::MatrixXd m = LoadFeatureMatrix(dir_ + "/" + utt_id + ".feat");
  EMOAUG_CHECK(m.cols() == dim_, FormatError,
               "feature dim mismatch for " << utt_id << ": " << m.cols()
                                           << " vs " << dim_);
  return m;
}

void SaveFeatureMatrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write feature file: " + path);
  os.write("EMOAFT1\n", 8);
  const int64_t rows = m.rows(), cols = m.cols();
  os.write(reinterpret_cast<const char*>(&rows), 8);
  os.write(reinterpret_cast<const char*>(&cols), 8);
  for (int64_t i = 0; i < rows; ++i)
    for (int64_t j = 0; j < cols; ++j) {
      const double v = m(i, j);
      os.write(reinterpret_cast<const char*>(&v), 8);
    }
  if (!os) throw IoError("short write: " + path);
}

Eigen::MatrixXd LoadFeatureMatrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot read feature file: " + path);
  char magic[8];
  is.read(magic, 8);
  if (!is || std::string(magic, 8) != "EMOAFT1\n")
    throw FormatError("bad feature-file magic: " + path);
  int64_t rows = 0, cols = 0;
  is.read(reinterpret_cast<char*>(&rows), 8);
  is.read(reinterpret_cast<char*>(&cols), 8);
  if (!is || rows < 1 || cols < 1)
    throw FormatError("bad feature-file header: " + path);
  Eigen::MatrixXd m(rows, cols);
  for (int64_t i = 0; i < rows; ++i)
    for (int64_t j = 0; j < cols; ++j) {
      double v;
      is.read(reinterpret_cast<char*>(&v), 8);
      m(i, j) = v;
    }
  if (!is) throw FormatError("truncated feature file: " + path);
  return m;
}

}  // namespace emoaug
