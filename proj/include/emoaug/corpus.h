// emoaug/corpus.h

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

#ifndef EMOAUG_CORPUS_H_
#define EMOAUG_CORPUS_H_

#include <array>
#include <map>
#include <string>
#include <vector>

#include "emoaug/common.h"
#include "emoaug/kmeans.h"

namespace emoaug {

// Fixed class order used everywhere (confusion matrices, balancing).
inline constexpr std::array<const char*, 4> kEmotions = {"angry", "happy",
                                                         "neutral", "sad"};
int EmotionIndex(const std::string& emotion);  // DataError on unknown

struct UtteranceRecord {
  std::string utt_id;
  std::string audio_path;
  std::string speaker;
  std::string emotion;
  std::string session;
  double duration = 0.0;
};

using Manifest = std::vector<UtteranceRecord>;

// Line-delimited JSON records; one utterance per line.
Manifest LoadManifest(const std::string& path);
void SaveManifest(const std::string& path, const Manifest& manifest);

// Augmentation output rows. Labels are inherited from the source utterance.
struct AugmentedRecord {
  std::string out_id;
  std::string wav_path;
  std::string speaker;
  std::string emotion;
  std::string source_id;
  std::string ref_id;
  bool truncated = false;
  std::string method = "emoaug";  // emoaug | copypaste | speed | pitch
};

std::vector<AugmentedRecord> LoadAugmentedManifest(const std::string& path);
void SaveAugmentedManifest(const std::string& path,
                           const std::vector<AugmentedRecord>& rows);

// Unit store: utterance id -> unit sequence, persisted as JSONL.
using UnitStore = std::map<std::string, UnitSequence>;
UnitStore LoadUnitStore(const std::string& path);
void SaveUnitStore(const std::string& path, const UnitStore& store);

}  // namespace emoaug

#endif  // EMOAUG_CORPUS_H_
