// bindings/module.cc

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

// Python bindings for the main pipeline operations: mel features, unit
// quantization, style transfer, baseline augmenters, balancing arithmetic,
// and the evaluation metrics. Heavy batch work (training, rendering whole
// augmentation plans) stays in the C++ CLI.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "emoaug/augment.h"
#include "emoaug/baseline_aug.h"
#include "emoaug/dsp.h"
#include "emoaug/experiment.h"
#include "emoaug/kmeans.h"
#include "emoaug/model.h"
#include "emoaug/ser.h"
#include "emoaug/toy_corpus.h"
#include "emoaug/wav.h"

namespace py = pybind11;
using namespace emoaug;

namespace {

DspConfig MakeDsp(int sample_rate, int n_fft, int win_length, int hop_length,
                  int n_mels, double fmin, double fmax) {
  DspConfig cfg;
  cfg.sample_rate = sample_rate;
  cfg.n_fft = n_fft;
  cfg.win_length = win_length;
  cfg.hop_length = hop_length;
  cfg.n_mels = n_mels;
  cfg.fmin = fmin;
  cfg.fmax = fmax;
  cfg.Validate();
  return cfg;
}

Waveform MakeWaveform(const Eigen::VectorXd& samples, int sample_rate) {
  Waveform x;
  x.sample_rate = sample_rate;
  x.samples.assign(samples.data(), samples.data() + samples.size());
  return x;
}

Eigen::VectorXd SamplesOf(const Waveform& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.samples.data(),
                                           x.samples.size());
}

// Thin owner pairing a model with its parsed configuration, the unit the
// python surface works with.
struct PyModel {
  ExperimentConfig cfg;
  EmoAugModel model;

  PyModel(const std::string& config_json, uint64_t seed)
      : cfg(ParseExperimentConfig(config_json)), model(cfg.model, seed) {}
};

}  // namespace

PYBIND11_MODULE(_emoaug, m) {
  m.doc() =
      "Speaking-style-transfer data augmentation for speech emotion "
      "recognition";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);

  // --- audio & features --------------------------------------------------
  m.def(
      "load_wav",
      [](const std::string& path, int target_sample_rate) {
        WavLoadOptions opts;
        opts.target_sample_rate = target_sample_rate;
        Waveform x = LoadWaveform(path, opts);
        return py::make_tuple(SamplesOf(x), x.sample_rate);
      },
      py::arg("path"), py::arg("target_sample_rate") = 16000,
      "Load a 16-bit PCM WAV as (samples, sample_rate), resampling if "
      "needed.");
  m.def(
      "save_wav",
      [](const std::string& path, const Eigen::VectorXd& samples,
         int sample_rate) { SaveWaveform(path, MakeWaveform(samples, sample_rate)); },
      py::arg("path"), py::arg("samples"), py::arg("sample_rate") = 16000);
  m.def(
      "mel_spectrogram",
      [](const Eigen::VectorXd& samples, int sample_rate, int n_fft,
         int win_length, int hop_length, int n_mels, double fmin, double fmax) {
        const DspConfig cfg = MakeDsp(sample_rate, n_fft, win_length,
                                      hop_length, n_mels, fmin, fmax);
        return ComputeMelSpectrogram(MakeWaveform(samples, sample_rate), cfg)
            .frames;
      },
      py::arg("samples"), py::arg("sample_rate") = 16000,
      py::arg("n_fft") = 1024, py::arg("win_length") = 1024,
      py::arg("hop_length") = 256, py::arg("n_mels") = 80,
      py::arg("fmin") = 0.0, py::arg("fmax") = 8000.0,
      "Log-mel spectrogram, frames x bands.");
  m.def(
      "invert_mel",
      [](const Eigen::MatrixXd& frames, int sample_rate, int n_fft,
         int win_length, int hop_length, int n_mels, double fmin, double fmax,
         int n_iters) {
        MelSpectrogram mel;
        mel.frames = frames;
        mel.cfg = MakeDsp(sample_rate, n_fft, win_length, hop_length, n_mels,
                          fmin, fmax);
        return SamplesOf(InvertMel(mel, n_iters));
      },
      py::arg("frames"), py::arg("sample_rate") = 16000,
      py::arg("n_fft") = 1024, py::arg("win_length") = 1024,
      py::arg("hop_length") = 256, py::arg("n_mels") = 80,
      py::arg("fmin") = 0.0, py::arg("fmax") = 8000.0, py::arg("n_iters") = 60,
      "Griffin-Lim inversion of a log-mel spectrogram to samples.");

  // --- discrete units -----------------------------------------------------
  py::class_<KMeansCodebook>(m, "Codebook")
      .def_readonly("centroids", &KMeansCodebook::centroids)
      .def_property_readonly("k", &KMeansCodebook::K)
      .def_property_readonly("dim", &KMeansCodebook::Dim)
      .def("save", [](const KMeansCodebook& cb,
                      const std::string& path) { SaveCodebook(path, cb); })
      .def_static("load", &LoadCodebook);
  m.def(
      "fit_codebook",
      [](const Eigen::MatrixXd& frames, int k, uint64_t seed, int max_iters) {
        KMeansOptions opts;
        opts.max_iters = max_iters;
        return FitCodebook(frames, k, seed, opts);
      },
      py::arg("frames"), py::arg("k"), py::arg("seed") = 0,
      py::arg("max_iters") = 100);
  m.def(
      "quantize",
      [](const Eigen::MatrixXd& frames, const KMeansCodebook& cb) {
        return QuantizeFrames(frames, cb).units;
      },
      py::arg("frames"), py::arg("codebook"),
      "Nearest-centroid unit labels per frame.");
  m.def(
      "deduplicate",
      [](const std::vector<int>& units, int k) {
        UnitSequence u;
        u.units = units;
        u.k = k;
        return Deduplicate(u).units;
      },
      py::arg("units"), py::arg("k") = 0,
      "Collapse adjacent repeated units.");

  // --- style transfer ------------------------------------------------------
  m.def("toy_config_json",
        [] { return ExperimentConfigJson(ExperimentConfig::ToyPreset()); });
  m.def("default_config_json", [] {
    ExperimentConfig cfg;
    cfg.model.Resolve();
    return ExperimentConfigJson(cfg);
  });
  py::class_<PyModel>(m, "Model")
      .def(py::init<const std::string&, uint64_t>(), py::arg("config_json"),
           py::arg("seed") = 0)
      .def("load",
           [](PyModel& self, const std::string& path) {
             self.model.Load(path);
           })
      .def("save",
           [](const PyModel& self, const std::string& path) {
             self.model.Save(path);
           })
      .def(
          "transfer",
          [](PyModel& self, const std::vector<int>& units,
             const Eigen::MatrixXd& ref_mel, uint64_t seed) {
            UnitSequence u;
            u.units = units;
            u.k = self.cfg.model.semantic.vocab;
            UnitSequence dedup = u;
            if (!dedup.deduped) dedup = Deduplicate(u);
            MelSpectrogram ref;
            ref.frames = ref_mel;
            ref.cfg = self.cfg.dsp;
            bool truncated = false;
            MelSpectrogram out =
                TransferStyle(&self.model, dedup, ref, seed, &truncated);
            return py::make_tuple(out.frames, truncated);
          },
          py::arg("units"), py::arg("ref_mel"), py::arg("seed") = 0,
          "Decode source units under a reference style; returns "
          "(mel_frames, truncated).")
      .def(
          "encode_style",
          [](PyModel& self, const Eigen::MatrixXd& mel) {
            MelSpectrogram m2;
            m2.frames = mel;
            m2.cfg = self.cfg.dsp;
            Rng rng(0);
            return Eigen::VectorXd(
                self.model.EncodeStyle(m2, Mode::kEval, &rng)->value);
          },
          py::arg("mel"), "Fixed-dimension style embedding of an utterance.");

  // --- baseline augmenters -------------------------------------------------
  m.def(
      "speed_perturb",
      [](const Eigen::VectorXd& samples, int sample_rate, double factor) {
        return SamplesOf(SpeedPerturb(MakeWaveform(samples, sample_rate), factor));
      },
      py::arg("samples"), py::arg("sample_rate"), py::arg("factor"));
  m.def(
      "pitch_shift",
      [](const Eigen::VectorXd& samples, int sample_rate, int semitones) {
        return SamplesOf(
            PitchShift(MakeWaveform(samples, sample_rate), semitones));
      },
      py::arg("samples"), py::arg("sample_rate"), py::arg("semitones"));
  m.def(
      "copy_paste",
      [](const Eigen::VectorXd& a, const Eigen::VectorXd& b, int sample_rate) {
        return SamplesOf(CopyPaste(MakeWaveform(a, sample_rate),
                                   MakeWaveform(b, sample_rate)));
      },
      py::arg("a"), py::arg("b"), py::arg("sample_rate"));

  // --- balancing & metrics --------------------------------------------------
  m.def(
      "balance_quotas",
      [](const std::array<int64_t, 4>& counts) { return BalanceQuotas(counts); },
      py::arg("counts"),
      "Per-class augmentation quotas that equalize class counts.");
  m.def(
      "compute_metrics",
      [](const Eigen::Matrix<int64_t, 4, 4>& counts) {
        ConfusionMatrix cm;
        cm.counts = counts;
        Metrics mt = ComputeMetrics(cm);
        py::dict d;
        d["wa"] = mt.wa;
        d["ua"] = mt.ua;
        d["recall"] = mt.recall;
        d["missing_classes"] = mt.missing_classes;
        return d;
      },
      py::arg("confusion"),
      "Weighted/unweighted accuracy from a 4x4 confusion matrix.");
  m.def("make_folds", [](const std::vector<std::string>& sessions) {
    py::list out;
    for (const auto& f : MakeFolds(sessions)) {
      py::dict d;
      d["test"] = f.test_session;
      d["val"] = f.val_session;
      d["train"] = f.train_sessions;
      out.append(d);
    }
    return out;
  });

  // --- toy corpus -----------------------------------------------------------
  m.def(
      "generate_toy_corpus",
      [](const std::string& out_dir, int speakers, int per_cell, uint64_t seed,
         const std::vector<int>& imbalance) {
        ToyCorpusConfig cfg;
        cfg.n_speakers = speakers;
        cfg.n_per_cell = per_cell;
        cfg.per_emotion_counts = imbalance;
        return GenerateToyCorpus(cfg, seed, out_dir).manifest.size();
      },
      py::arg("out_dir"), py::arg("speakers") = 4, py::arg("per_cell") = 10,
      py::arg("seed") = 0, py::arg("imbalance") = std::vector<int>{},
      "Write the synthetic corpus; returns the utterance count.");

  m.def("emotions", [] {
    return std::vector<std::string>(kEmotions.begin(), kEmotions.end());
  });
}
