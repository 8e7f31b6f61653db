// src/augment.cc

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

#include "emoaug/augment.h"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace emoaug {

namespace {

using CellKey = std::pair<std::string, std::string>;  // (speaker, emotion)

std::map<CellKey, std::vector<const UtteranceRecord*>> GroupCells(
    const Manifest& manifest) {
  std::map<CellKey, std::vector<const UtteranceRecord*>> cells;
  for (const auto& r : manifest) cells[{r.speaker, r.emotion}].push_back(&r);
  return cells;
}

// A reference draw order for one source: the rest of its cell, shuffled; a
// request past the end wraps around (with-replacement regime).
std::vector<const UtteranceRecord*> OthersShuffled(
    const std::vector<const UtteranceRecord*>& cell,
    const UtteranceRecord* self, Rng* rng) {
  std::vector<const UtteranceRecord*> others;
  for (const auto* r : cell)
    if (r != self) others.push_back(r);
  std::shuffle(others.begin(), others.end(), *rng);
  return others;
}

}  // namespace

std::array<int64_t, 4> ClassCounts(const Manifest& manifest) {
  std::array<int64_t, 4> counts{};
  for (const auto& r : manifest) ++counts[EmotionIndex(r.emotion)];
  return counts;
}

std::array<int64_t, 4> BalanceQuotas(const std::array<int64_t, 4>& counts) {
  const int64_t mx = *std::max_element(counts.begin(), counts.end());
  std::array<int64_t, 4> quotas{};
  for (size_t i = 0; i < counts.size(); ++i) quotas[i] = mx - counts[i];
  return quotas;
}

AugmentationPlan BuildPlan(const Manifest& manifest, int n, bool balance,
                           uint64_t seed) {
  EMOAUG_CHECK(n >= 0, ConfigError, "augmentation count must be >= 0");
  {
    std::unordered_map<std::string, int> seen;
    for (const auto& r : manifest) {
      EMOAUG_CHECK(++seen[r.utt_id] == 1, DataError,
                   "duplicate utt_id in manifest: " << r.utt_id);
    }
  }

  AugmentationPlan plan;
  plan.n = n;
  plan.balance = balance;
  plan.seed = seed;
  Rng rng(seed);
  const auto cells = GroupCells(manifest);

  auto warn_singleton = [&plan](const CellKey& key) {
    plan.warnings.push_back("skipping singleton cell (speaker=" + key.first +
                            ", emotion=" + key.second +
                            "): no same-speaker same-emotion reference");
  };

  // Per-source output counter for unique output ids.
  std::unordered_map<std::string, int> out_counter;
  auto emit = [&](const UtteranceRecord* src, const UtteranceRecord* ref,
                  bool with_repl) {
    PlanRow row;
    row.source_id = src->utt_id;
    row.ref_id = ref->utt_id;
    row.out_id = src->utt_id + "_aug" + std::to_string(out_counter[src->utt_id]++);
    row.with_replacement = with_repl;
    plan.rows.push_back(std::move(row));
  };

  if (!balance) {
    if (n == 0) return plan;
    for (const auto& src : manifest) {
      const auto& cell = cells.at({src.speaker, src.emotion});
      if (cell.size() < 2) {
        warn_singleton({src.speaker, src.emotion});
        continue;
      }
      const auto others = OthersShuffled(cell, &src, &rng);
      for (int j = 0; j < n; ++j) {
        const bool with_repl = static_cast<size_t>(j) >= others.size();
        emit(&src, others[j % others.size()], with_repl);
      }
    }
    return plan;
  }

  // Balancing: per-class totals rise to the max count; any n on top adds
  // n * max per class so post-augmentation classes stay equal.
  const auto counts = ClassCounts(manifest);
  const auto quotas = BalanceQuotas(counts);
  const int64_t mx = *std::max_element(counts.begin(), counts.end());
  for (size_t e = 0; e < kEmotions.size(); ++e) {
    const int64_t want = quotas[e] + static_cast<int64_t>(n) * mx;
    if (want == 0) continue;
    // Eligible sources for this class, in manifest order, cells of size >= 2.
    std::vector<const UtteranceRecord*> eligible;
    for (const auto& src : manifest) {
      if (src.emotion != kEmotions[e]) continue;
      if (cells.at({src.speaker, src.emotion}).size() < 2) {
        warn_singleton({src.speaker, src.emotion});
        continue;
      }
      eligible.push_back(&src);
    }
    if (eligible.empty()) {
      plan.warnings.push_back(std::string("class ") + kEmotions[e] +
                              ": no eligible sources, quota unmet");
      continue;
    }
    // Round-robin over the class's sources; each source keeps its own
    // shuffled reference order, wrapping with replacement when exhausted.
    std::unordered_map<const UtteranceRecord*,
                       std::vector<const UtteranceRecord*>> ref_order;
    std::unordered_map<const UtteranceRecord*, size_t> next_ref;
    for (int64_t i = 0; i < want; ++i) {
      const UtteranceRecord* src = eligible[i % eligible.size()];
      auto it = ref_order.find(src);
      if (it == ref_order.end()) {
        it = ref_order
                 .emplace(src, OthersShuffled(
                                   cells.at({src->speaker, src->emotion}), src,
                                   &rng))
                 .first;
      }
      const auto& others = it->second;
      const size_t j = next_ref[src]++;
      emit(src, others[j % others.size()], j >= others.size());
    }
  }
  return plan;
}

void ValidatePlan(const AugmentationPlan& plan, const Manifest& manifest) {
  std::unordered_map<std::string, const UtteranceRecord*> by_id;
  for (const auto& r : manifest) by_id[r.utt_id] = &r;
  for (const auto& row : plan.rows) {
    auto si = by_id.find(row.source_id);
    auto ri = by_id.find(row.ref_id);
    EMOAUG_CHECK(si != by_id.end() && ri != by_id.end(), ContractError,
                 "plan row " << row.out_id << " references unknown utterances");
    EMOAUG_CHECK(row.source_id != row.ref_id, ContractError,
                 "plan row " << row.out_id << " pairs an utterance with itself");
    EMOAUG_CHECK(si->second->speaker == ri->second->speaker, ContractError,
                 "plan row " << row.out_id << " crosses speakers");
    EMOAUG_CHECK(si->second->emotion == ri->second->emotion, ContractError,
                 "plan row " << row.out_id << " crosses emotions");
  }
}

MelSpectrogram TransferStyle(EmoAugModel* model, const UnitSequence& units,
                             const MelSpectrogram& reference_mel, uint64_t seed,
                             bool* truncated) {
  Rng rng(seed);
  DecodeResult res = model->Transfer(units, reference_mel, &rng);
  if (truncated != nullptr) *truncated = res.truncated;
  MelSpectrogram out;
  out.frames = res.mel->value.transpose();  // n_mels x T -> T x n_mels
  out.cfg = reference_mel.cfg;
  return out;
}

RenderResult RenderPlan(const AugmentationPlan& plan, const Manifest& manifest,
                        const UnitStore& units, EmoAugModel* model,
                        const RenderOptions& opts, const std::string& out_dir) {
  ValidatePlan(plan, manifest);
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(out_dir) / "wav");

  std::unordered_map<std::string, const UtteranceRecord*> by_id;
  for (const auto& r : manifest) by_id[r.utt_id] = &r;

  int workers = opts.workers;
  if (workers <= 0) {
    const char* env = std::getenv("EMOAUG_WORKERS");
    workers = env != nullptr ? std::max(1, std::atoi(env)) : 1;
  }
  workers = std::min<int>(workers, std::max<size_t>(1, plan.rows.size()));

  RenderResult result;
  result.records.resize(plan.rows.size());
  std::vector<char> keep(plan.rows.size(), 0);
  std::mutex failures_mu;
  // Reference mels are cached per worker-independent map guarded by a mutex;
  // re-analysis dominates for large n otherwise.
  std::mutex cache_mu;
  std::unordered_map<std::string, MelSpectrogram> mel_cache;

  auto ref_mel = [&](const UtteranceRecord* rec) {
    {
      std::lock_guard<std::mutex> lock(cache_mu);
      auto it = mel_cache.find(rec->utt_id);
      if (it != mel_cache.end()) return it->second;
    }
    MelSpectrogram m = ComputeMelSpectrogram(LoadWaveform(rec->audio_path),
                                             opts.dsp);
    std::lock_guard<std::mutex> lock(cache_mu);
    return mel_cache.emplace(rec->utt_id, std::move(m)).first->second;
  };

  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t i = next.fetch_add(1); i < plan.rows.size();
         i = next.fetch_add(1)) {
      const PlanRow& row = plan.rows[i];
      try {
        auto ui = units.find(row.source_id);
        EMOAUG_CHECK(ui != units.end(), DataError,
                     "no unit sequence for " << row.source_id);
        const UtteranceRecord* src = by_id.at(row.source_id);
        const UtteranceRecord* ref = by_id.at(row.ref_id);
        const uint64_t row_seed =
            plan.seed ^ Fnv1a64(row.out_id);
        bool truncated = false;
        MelSpectrogram mel =
            TransferStyle(model, ui->second, ref_mel(ref), row_seed, &truncated);
        if (truncated && opts.drop_truncated) continue;
        Waveform wav = InvertMel(mel, opts.griffin_lim_iters);
        const std::string wav_path =
            (fs::path(out_dir) / "wav" / (row.out_id + ".wav")).string();
        SaveWaveform(wav_path, wav);

        AugmentedRecord& rec = result.records[i];
        rec.out_id = row.out_id;
        rec.wav_path = wav_path;
        rec.speaker = src->speaker;
        rec.emotion = src->emotion;
        rec.source_id = row.source_id;
        rec.ref_id = row.ref_id;
        rec.truncated = truncated;
        rec.method = "emoaug";
        keep[i] = 1;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(failures_mu);
        result.failures.push_back(row.out_id + ": " + e.what());
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // Compact in plan order so the manifest is deterministic.
  std::vector<AugmentedRecord> kept;
  for (size_t i = 0; i < result.records.size(); ++i)
    if (keep[i]) kept.push_back(std::move(result.records[i]));
  result.records = std::move(kept);
  SaveAugmentedManifest((fs::path(out_dir) / "augmented.jsonl").string(),
                        result.records);
  return result;
}

}  // namespace emoaug
