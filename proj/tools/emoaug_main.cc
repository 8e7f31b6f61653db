// tools/emoaug_main.cc

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

// Command-line driver for the style-transfer augmentation pipeline.
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "emoaug/augment.h"
#include "emoaug/baseline_aug.h"
#include "emoaug/experiment.h"
#include "emoaug/ser.h"
#include "emoaug/toy_corpus.h"

namespace fs = std::filesystem;
using namespace emoaug;

namespace {

ExperimentConfig LoadConfigOrPreset(const std::string& config_path,
                                    bool toy_preset) {
  if (!config_path.empty()) return LoadExperimentConfig(config_path);
  ExperimentConfig cfg =
      toy_preset ? ExperimentConfig::ToyPreset() : ExperimentConfig();
  cfg.model.Resolve();
  return cfg;
}

MelSpectrogram MelOf(const UtteranceRecord& rec, const DspConfig& dsp) {
  return ComputeMelSpectrogram(LoadWaveform(rec.audio_path), dsp);
}

std::vector<TrainItem> BuildTrainItems(const Manifest& manifest,
                                       const UnitStore& units,
                                       const DspConfig& dsp) {
  std::vector<TrainItem> items;
  for (const auto& rec : manifest) {
    auto it = units.find(rec.utt_id);
    EMOAUG_CHECK(it != units.end(), DataError,
                 "no unit sequence for " << rec.utt_id);
    TrainItem item;
    item.utt_id = rec.utt_id;
    item.units = it->second;
    item.mel = MelOf(rec, dsp);
    items.push_back(std::move(item));
  }
  return items;
}

// Pooled mel-statistics examples for the bundled SER representation.
std::vector<SerExample> BaseExamples(const Manifest& manifest,
                                     const DspConfig& dsp) {
  std::vector<SerExample> out;
  for (const auto& rec : manifest) {
    SerExample e;
    e.utt_id = rec.utt_id;
    e.features = MelStatsFeature(MelOf(rec, dsp));
    e.label = EmotionIndex(rec.emotion);
    e.session = rec.session;
    out.push_back(std::move(e));
  }
  return out;
}

void AugExamples(const std::vector<AugmentedRecord>& rows,
                 const Manifest& base, const DspConfig& dsp,
                 std::vector<SerExample>* examples,
                 std::map<std::string, std::string>* source_session) {
  std::map<std::string, std::string> session_of;
  for (const auto& r : base) session_of[r.utt_id] = r.session;
  for (const auto& r : rows) {
    SerExample e;
    e.utt_id = r.out_id;
    Waveform x = LoadWaveform(r.wav_path);
    e.features = MelStatsFeature(ComputeMelSpectrogram(x, dsp));
    e.label = EmotionIndex(r.emotion);
    e.augmented = true;
    auto it = session_of.find(r.source_id);
    EMOAUG_CHECK(it != session_of.end(), DataError,
                 "augmented row " << r.out_id << " has unknown source "
                                  << r.source_id);
    e.session = it->second;
    (*source_session)[r.out_id] = it->second;
    examples->push_back(std::move(e));
  }
}

ConfusionMatrix ReadConfusionCsv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open confusion csv: " + path);
  std::string line;
  std::getline(is, line);  // header
  ConfusionMatrix cm;
  for (int t = 0; t < kNumClasses; ++t) {
    EMOAUG_CHECK(static_cast<bool>(std::getline(is, line)), FormatError,
                 path << ": expected " << kNumClasses << " data rows");
    std::istringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');  // class label
    for (int p = 0; p < kNumClasses; ++p) {
      EMOAUG_CHECK(static_cast<bool>(std::getline(ss, cell, ',')), FormatError,
                   path << ": short row " << t);
      cm.counts(t, p) = std::stoll(cell);
    }
  }
  return cm;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Style-transfer data augmentation for speech emotion recognition"};
  app.require_subcommand(1);

  std::string config_path, manifest_path, units_path, codebook_path;
  std::string model_path, out_path, aug_manifest_path;
  bool toy_preset = false;
  app.add_option("--config", config_path, "Experiment config JSON")
      ->envname("EMOAUG_CONFIG");
  app.add_flag("--toy", toy_preset, "Use the toy-scale preset defaults");

  // --- toy-gen ---
  auto* toy_gen = app.add_subcommand("toy-gen", "Generate the synthetic corpus");
  int tg_speakers = 4, tg_per_cell = 10, tg_sessions = 5;
  uint64_t tg_seed = 0;
  std::string tg_imbalance;
  toy_gen->add_option("--out", out_path, "Output directory")->required();
  toy_gen->add_option("--speakers", tg_speakers);
  toy_gen->add_option("--per-cell", tg_per_cell);
  toy_gen->add_option("--sessions", tg_sessions);
  toy_gen->add_option("--seed", tg_seed);
  toy_gen->add_option("--imbalance", tg_imbalance,
                      "Per-emotion per-cell counts, e.g. 10,16,17,8");

  // --- quantize-fit ---
  auto* qfit = app.add_subcommand("quantize-fit", "Fit the unit codebook");
  qfit->add_option("--manifest", manifest_path)->required();
  qfit->add_option("--out", out_path, "Codebook file")->required();

  // --- quantize ---
  auto* quant = app.add_subcommand("quantize", "Quantize + deduplicate units");
  quant->add_option("--manifest", manifest_path)->required();
  quant->add_option("--codebook", codebook_path)->required();
  quant->add_option("--out", out_path, "Unit store JSONL")->required();

  // --- train / finetune ---
  auto* train = app.add_subcommand("train", "Train the style-transfer model");
  auto* finetune = app.add_subcommand("finetune", "Low-LR fine-tuning pass");
  std::string init_model;
  for (auto* cmd : {train, finetune}) {
    cmd->add_option("--manifest", manifest_path)->required();
    cmd->add_option("--units", units_path)->required();
    cmd->add_option("--out", out_path, "Checkpoint path")->required();
  }
  finetune->add_option("--model", init_model, "Checkpoint to start from")
      ->required();

  // --- transfer ---
  auto* transfer = app.add_subcommand("transfer", "One style-swapped decode");
  std::string source_id, ref_wav;
  transfer->add_option("--manifest", manifest_path)->required();
  transfer->add_option("--units", units_path)->required();
  transfer->add_option("--model", model_path)->required();
  transfer->add_option("--source", source_id, "Source utterance id")->required();
  transfer->add_option("--ref-wav", ref_wav, "Style reference WAV")->required();
  transfer->add_option("--out", out_path, "Output WAV")->required();

  // --- augment ---
  auto* augment = app.add_subcommand("augment", "Style-swap augmentation run");
  int aug_n = -1;
  bool aug_balance = false;
  augment->add_option("--manifest", manifest_path)->required();
  augment->add_option("--units", units_path)->required();
  augment->add_option("--model", model_path)->required();
  augment->add_option("--out", out_path, "Output directory")->required();
  augment->add_option("--n", aug_n, "Augmentations per utterance");
  augment->add_flag("--balance", aug_balance, "Equalize class counts");

  // --- baseline-aug ---
  auto* baseline = app.add_subcommand("baseline-aug", "Comparison augmenters");
  std::string bl_method = "speed";
  baseline->add_option("--manifest", manifest_path)->required();
  baseline->add_option("--method", bl_method, "copypaste | speed | pitch");
  baseline->add_option("--out", out_path, "Output directory")->required();

  // --- ser-train / ser-eval ---
  auto* ser_train = app.add_subcommand("ser-train", "Train one SER fold");
  auto* ser_eval =
      app.add_subcommand("ser-eval", "Full leave-one-session-out evaluation");
  int fold_index = 0;
  for (auto* cmd : {ser_train, ser_eval}) {
    cmd->add_option("--manifest", manifest_path)->required();
    cmd->add_option("--aug", aug_manifest_path, "Augmented manifest JSONL");
    cmd->add_option("--out", out_path, "Output directory")->required();
  }
  ser_train->add_option("--fold", fold_index, "Fold index (0-4)");

  // --- report ---
  auto* report = app.add_subcommand("report", "Recall deltas vs. a baseline");
  std::string baseline_dir, augmented_dir;
  report->add_option("--baseline", baseline_dir, "Baseline ser-eval dir")
      ->required();
  report->add_option("--augmented", augmented_dir, "Augmented ser-eval dir")
      ->required();
  report->add_option("--out", out_path, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg = LoadConfigOrPreset(config_path, toy_preset);

    if (toy_gen->parsed()) {
      ToyCorpusConfig tc;
      tc.n_speakers = tg_speakers;
      tc.n_per_cell = tg_per_cell;
      tc.n_sessions = tg_sessions;
      if (!tg_imbalance.empty()) {
        std::istringstream ss(tg_imbalance);
        std::string tok;
        while (std::getline(ss, tok, ','))
          tc.per_emotion_counts.push_back(std::stoi(tok));
      }
      ToyCorpus corpus = GenerateToyCorpus(tc, tg_seed, out_path);
      std::cout << "wrote " << corpus.manifest.size() << " utterances to "
                << out_path << "\n";
      WriteRunReport((fs::path(out_path) / "run.json").string(), "toy-gen", cfg,
                     {out_path + "/manifest.jsonl", out_path + "/truth.jsonl"});
    } else if (qfit->parsed()) {
      Manifest manifest = LoadManifest(manifest_path);
      MelFeatureExtractor fx(cfg.dsp);
      std::vector<Eigen::MatrixXd> mats;
      int64_t total = 0;
      for (const auto& rec : manifest) {
        mats.push_back(fx.Extract(LoadWaveform(rec.audio_path)));
        total += mats.back().rows();
      }
      Eigen::MatrixXd frames(total, fx.Dim());
      int64_t off = 0;
      for (const auto& m : mats) {
        frames.middleRows(off, m.rows()) = m;
        off += m.rows();
      }
      KMeansOptions opts;
      opts.max_iters = cfg.quantizer.max_iters;
      KMeansCodebook cb =
          FitCodebook(frames, cfg.quantizer.k, cfg.quantizer.seed, opts);
      SaveCodebook(out_path, cb);
      std::cout << "codebook k=" << cb.K() << " dim=" << cb.Dim()
                << " inertia=" << Inertia(frames, cb) << "\n";
      WriteRunReport(out_path + ".run.json", "quantize-fit", cfg, {out_path});
    } else if (quant->parsed()) {
      Manifest manifest = LoadManifest(manifest_path);
      KMeansCodebook cb = LoadCodebook(codebook_path);
      MelFeatureExtractor fx(cfg.dsp);
      UnitStore store;
      for (const auto& rec : manifest) {
        UnitSequence u =
            QuantizeFrames(fx.Extract(LoadWaveform(rec.audio_path)), cb);
        store.emplace(rec.utt_id, Deduplicate(u));
      }
      SaveUnitStore(out_path, store);
      std::cout << "quantized " << store.size() << " utterances\n";
      WriteRunReport(out_path + ".run.json", "quantize", cfg, {out_path});
    } else if (train->parsed() || finetune->parsed()) {
      Manifest manifest = LoadManifest(manifest_path);
      UnitStore store = LoadUnitStore(units_path);
      std::vector<TrainItem> all = BuildTrainItems(manifest, store, cfg.dsp);
      std::vector<TrainItem> tr, val;
      Trainer::SplitValidation(std::move(all), 1000, cfg.seed, &tr, &val);

      EmoAugModel model(cfg.model, cfg.seed);
      std::optional<double> flat_lr;
      if (finetune->parsed()) {
        model.Load(init_model);
        flat_lr = cfg.train.finetune_lr;
      }
      Trainer trainer(&model, cfg.train, flat_lr);
      FitResult fit = trainer.Fit(tr, val, out_path, out_path + ".log.csv");
      std::cout << "best val loss " << fit.best_val_loss << " after "
                << fit.epochs_run << " epochs"
                << (fit.early_stopped ? " (early stop)" : "") << "\n";
      WriteRunReport(out_path + ".run.json",
                     finetune->parsed() ? "finetune" : "train", cfg,
                     {out_path, out_path + ".log.csv"});
    } else if (transfer->parsed()) {
      UnitStore store = LoadUnitStore(units_path);
      auto it = store.find(source_id);
      EMOAUG_CHECK(it != store.end(), DataError,
                   "no unit sequence for " << source_id);
      EmoAugModel model(cfg.model, cfg.seed);
      model.Load(model_path);
      MelSpectrogram ref =
          ComputeMelSpectrogram(LoadWaveform(ref_wav), cfg.dsp);
      bool truncated = false;
      MelSpectrogram mel =
          TransferStyle(&model, it->second, ref, cfg.seed, &truncated);
      SaveWaveform(out_path, InvertMel(mel));
      std::cout << "wrote " << out_path << " (" << mel.NumFrames() << " frames"
                << (truncated ? ", truncated" : "") << ")\n";
      WriteRunReport(out_path + ".run.json", "transfer", cfg, {out_path});
    } else if (augment->parsed()) {
      Manifest manifest = LoadManifest(manifest_path);
      UnitStore store = LoadUnitStore(units_path);
      EmoAugModel model(cfg.model, cfg.seed);
      model.Load(model_path);
      const int n = aug_n >= 0 ? aug_n : cfg.augment.n;
      const bool balance = aug_balance || cfg.augment.balance;
      AugmentationPlan plan = BuildPlan(manifest, n, balance, cfg.seed);
      for (const auto& w : plan.warnings) std::cerr << "warning: " << w << "\n";
      RenderOptions ropts;
      ropts.dsp = cfg.dsp;
      RenderResult res =
          RenderPlan(plan, manifest, store, &model, ropts, out_path);
      for (const auto& f : res.failures) std::cerr << "failed: " << f << "\n";
      std::cout << "rendered " << res.records.size() << "/" << plan.rows.size()
                << " rows to " << out_path << "\n";
      WriteRunReport((fs::path(out_path) / "run.json").string(), "augment", cfg,
                     {out_path + "/augmented.jsonl"});
    } else if (baseline->parsed()) {
      Manifest manifest = LoadManifest(manifest_path);
      BaselineAugConfig bc;
      bc.method = bl_method;
      auto rows = RunBaselineAug(manifest, bc, cfg.seed, out_path);
      std::cout << "rendered " << rows.size() << " rows to " << out_path << "\n";
      WriteRunReport((fs::path(out_path) / "run.json").string(), "baseline-aug",
                     cfg, {out_path + "/augmented.jsonl"});
    } else if (ser_train->parsed() || ser_eval->parsed()) {
      Manifest manifest = LoadManifest(manifest_path);
      std::vector<SerExample> base = BaseExamples(manifest, cfg.dsp);
      std::vector<SerExample> aug;
      std::map<std::string, std::string> source_session;
      if (!aug_manifest_path.empty()) {
        AugExamples(LoadAugmentedManifest(aug_manifest_path), manifest, cfg.dsp,
                    &aug, &source_session);
      }
      fs::create_directories(out_path);
      if (ser_train->parsed()) {
        std::set<std::string> sessions;
        for (const auto& e : base) sessions.insert(e.session);
        auto folds =
            MakeFolds({sessions.begin(), sessions.end()});
        EMOAUG_CHECK(fold_index >= 0 && fold_index < 5, ConfigError,
                     "--fold must be in [0, 4]");
        FoldDataset data =
            AssembleFold(folds[fold_index], base, aug, source_session);
        FoldResult fr = RunFold(folds[fold_index], data, cfg.ser);
        WriteConfusionCsv((fs::path(out_path) / "confusion.csv").string(),
                          fr.confusion);
        std::cout << "fold " << fold_index << ": WA " << fr.metrics.wa
                  << " UA " << fr.metrics.ua << " (aug used " << fr.n_aug_used
                  << ", dropped " << fr.n_aug_dropped << ")\n";
      } else {
        CrossValResult cv =
            RunCrossValidation(base, aug, source_session, cfg.ser);
        WriteSummaryCsv((fs::path(out_path) / "summary.csv").string(), cv);
        WriteConfusionCsv((fs::path(out_path) / "confusion.csv").string(),
                          cv.aggregate);
        WriteConfusionHeatmapBmp(
            (fs::path(out_path) / "confusion.bmp").string(), cv.aggregate);
        std::cout << "mean WA " << cv.mean_wa << " mean UA " << cv.mean_ua
                  << " over " << cv.folds.size() << " folds\n";
      }
      WriteRunReport((fs::path(out_path) / "run.json").string(),
                     ser_train->parsed() ? "ser-train" : "ser-eval", cfg,
                     {out_path});
    } else if (report->parsed()) {
      Metrics mb = ComputeMetrics(
          ReadConfusionCsv((fs::path(baseline_dir) / "confusion.csv").string()));
      Metrics ma = ComputeMetrics(ReadConfusionCsv(
          (fs::path(augmented_dir) / "confusion.csv").string()));
      const std::string csv = RecallDeltaCsv(mb, ma);
      std::ofstream os(out_path);
      if (!os) throw IoError("cannot write report: " + out_path);
      os << csv;
      std::cout << csv;
      WriteRunReport(out_path + ".run.json", "report", cfg, {out_path});
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
