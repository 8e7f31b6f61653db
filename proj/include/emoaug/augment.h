// emoaug/augment.h

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

#ifndef EMOAUG_AUGMENT_H_
#define EMOAUG_AUGMENT_H_

#include <array>
#include <string>
#include <vector>

#include "emoaug/corpus.h"
#include "emoaug/dsp.h"
#include "emoaug/model.h"

namespace emoaug {

// Style-swapped augmentation: each plan row renders the source utterance's
// content units under the style of a same-speaker, same-emotion reference.

struct PlanRow {
  std::string source_id;
  std::string ref_id;
  std::string out_id;
  // Set when the reference was drawn with replacement because the cell had
  // fewer candidates than requested.
  bool with_replacement = false;
};

struct AugmentationPlan {
  std::vector<PlanRow> rows;
  int n = 0;
  bool balance = false;
  uint64_t seed = 0;
  std::vector<std::string> warnings;  // e.g. skipped singleton cells
};

// Per-class utterance counts in the fixed emotion order.
std::array<int64_t, 4> ClassCounts(const Manifest& manifest);

// Extra samples per class needed to raise every class to the max count.
std::array<int64_t, 4> BalanceQuotas(const std::array<int64_t, 4>& counts);

// Builds the style-swap plan. Without balancing: n references per source,
// drawn uniformly without replacement from the rest of its (speaker, emotion)
// cell, switching to with-replacement (flagged) once the cell is exhausted.
// With balancing: per-class quotas (BalanceQuotas, plus n * max-count when
// n > 0) distributed round-robin over that class's eligible utterances.
// Sources in singleton cells are skipped with a warning.
AugmentationPlan BuildPlan(const Manifest& manifest, int n, bool balance,
                           uint64_t seed);

// Verifies the plan invariants (same speaker, same emotion, source != ref,
// ids resolvable); throws ContractError on violation.
void ValidatePlan(const AugmentationPlan& plan, const Manifest& manifest);

// Free-running style transfer of one plan row: decode the source's units
// under the reference mel's style. Returns the generated mel; *truncated is
// set when the decode hit the length cap.
MelSpectrogram TransferStyle(EmoAugModel* model, const UnitSequence& units,
                             const MelSpectrogram& reference_mel, uint64_t seed,
                             bool* truncated);

struct RenderResult {
  std::vector<AugmentedRecord> records;
  std::vector<std::string> failures;  // "out_id: reason", run continues
};

struct RenderOptions {
  DspConfig dsp;
  int griffin_lim_iters = 60;
  // Worker threads; <= 0 reads EMOAUG_WORKERS (default 1).
  int workers = 0;
  // Drop rows whose decode was truncated instead of flagging them.
  bool drop_truncated = false;
};

// Renders every plan row to a WAV under out_dir/wav and writes
// out_dir/augmented.jsonl. Deterministic for a fixed plan (per-row seeds are
// derived from plan.seed and the row's out_id).
RenderResult RenderPlan(const AugmentationPlan& plan, const Manifest& manifest,
                        const UnitStore& units, EmoAugModel* model,
                        const RenderOptions& opts, const std::string& out_dir);

}  // namespace emoaug

#endif  // EMOAUG_AUGMENT_H_
