// emoaug/common.h

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

#ifndef EMOAUG_COMMON_H_
#define EMOAUG_COMMON_H_

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace emoaug {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// I/O failures: missing files, short reads, write errors.
class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (bad WAV header, wrong magic, bad JSON).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Tensor/layer shape mismatches.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration values or unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad input data (too few frames, unknown labels, empty splits).
class DataError : public Error {
 public:
  using Error::Error;
};

// Violated operation precondition (caller bug).
class ContractError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf surfaced during decoding or training.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

#define EMOAUG_CHECK(cond, Exc, msg)                 \
  do {                                               \
    if (!(cond)) {                                   \
      std::ostringstream os__;                       \
      os__ << msg;                                   \
      throw ::emoaug::Exc(os__.str());               \
    }                                                \
  } while (0)

using Rng = std::mt19937_64;

// FNV-1a, used for config hashes embedded in run reports.
inline uint64_t Fnv1a64(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string HexHash(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace emoaug

#endif  // EMOAUG_COMMON_H_
