// src/experiment.cc

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

#include "emoaug/experiment.h"

#include <chrono>
#include <fstream>
#include <set>

#include <json.hpp>

namespace emoaug {

using nlohmann::json;

namespace {

// Rejects keys that the schema does not know; catches config typos early.
void CheckKeys(const json& j, const std::set<std::string>& allowed,
               const std::string& scope) {
  EMOAUG_CHECK(j.is_object(), ConfigError, scope << ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    EMOAUG_CHECK(allowed.count(it.key()) == 1, ConfigError,
                 scope << ": unknown key '" << it.key() << "'");
  }
}

template <typename T>
void Get(const json& j, const char* key, T* out) {
  if (j.contains(key)) *out = j.at(key).get<T>();
}

json DspJson(const DspConfig& c) {
  return {{"sample_rate", c.sample_rate}, {"n_fft", c.n_fft},
          {"win_length", c.win_length},   {"hop_length", c.hop_length},
          {"n_mels", c.n_mels},           {"fmin", c.fmin},
          {"fmax", c.fmax},               {"log_floor_amp", c.log_floor_amp}};
}

void DspFromJson(const json& j, DspConfig* c) {
  CheckKeys(j,
            {"sample_rate", "n_fft", "win_length", "hop_length", "n_mels",
             "fmin", "fmax", "log_floor_amp"},
            "dsp");
  Get(j, "sample_rate", &c->sample_rate);
  Get(j, "n_fft", &c->n_fft);
  Get(j, "win_length", &c->win_length);
  Get(j, "hop_length", &c->hop_length);
  Get(j, "n_mels", &c->n_mels);
  Get(j, "fmin", &c->fmin);
  Get(j, "fmax", &c->fmax);
  Get(j, "log_floor_amp", &c->log_floor_amp);
}

json ModelJson(const ModelConfig& m) {
  return {{"semantic",
           {{"vocab", m.semantic.vocab},
            {"embed_dim", m.semantic.embed_dim},
            {"conv_channels", m.semantic.conv_channels},
            {"conv_kernel", m.semantic.conv_kernel},
            {"n_conv_layers", m.semantic.n_conv_layers},
            {"lstm_hidden", m.semantic.lstm_hidden},
            {"dropout", m.semantic.dropout}}},
          {"style",
           {{"n_mels", m.style.n_mels},
            {"channels", m.style.channels},
            {"res2_scale", m.style.res2_scale},
            {"se_bottleneck", m.style.se_bottleneck},
            {"kernel", m.style.kernel},
            {"dilations", m.style.dilations},
            {"attention_channels", m.style.attention_channels},
            {"embed_dim", m.style.embed_dim}}},
          {"decoder",
           {{"prenet_dim", m.decoder.prenet_dim},
            {"prenet_dropout", m.decoder.prenet_dropout},
            {"prenet_dropout_inference", m.decoder.prenet_dropout_inference},
            {"attention_rnn_dim", m.decoder.attention_rnn_dim},
            {"decoder_rnn_dim", m.decoder.decoder_rnn_dim},
            {"attention_dim", m.decoder.attention_dim},
            {"location_filters", m.decoder.location_filters},
            {"location_kernel", m.decoder.location_kernel},
            {"stop_threshold", m.decoder.stop_threshold},
            {"max_len_factor", m.decoder.max_len_factor},
            {"attention_window", m.decoder.attention_window},
            {"completion_dwell_factor", m.decoder.completion_dwell_factor},
            {"completion_dwell_min", m.decoder.completion_dwell_min},
            {"max_dwell", m.decoder.max_dwell}}}};
}

void ModelFromJson(const json& j, ModelConfig* m) {
  CheckKeys(j, {"semantic", "style", "decoder"}, "model");
  if (j.contains("semantic")) {
    const json& s = j.at("semantic");
    CheckKeys(s,
              {"vocab", "embed_dim", "conv_channels", "conv_kernel",
               "n_conv_layers", "lstm_hidden", "dropout"},
              "model.semantic");
    Get(s, "vocab", &m->semantic.vocab);
    Get(s, "embed_dim", &m->semantic.embed_dim);
    Get(s, "conv_channels", &m->semantic.conv_channels);
    Get(s, "conv_kernel", &m->semantic.conv_kernel);
    Get(s, "n_conv_layers", &m->semantic.n_conv_layers);
    Get(s, "lstm_hidden", &m->semantic.lstm_hidden);
    Get(s, "dropout", &m->semantic.dropout);
  }
  if (j.contains("style")) {
    const json& s = j.at("style");
    CheckKeys(s,
              {"n_mels", "channels", "res2_scale", "se_bottleneck", "kernel",
               "dilations", "attention_channels", "embed_dim"},
              "model.style");
    Get(s, "n_mels", &m->style.n_mels);
    Get(s, "channels", &m->style.channels);
    Get(s, "res2_scale", &m->style.res2_scale);
    Get(s, "se_bottleneck", &m->style.se_bottleneck);
    Get(s, "kernel", &m->style.kernel);
    Get(s, "dilations", &m->style.dilations);
    Get(s, "attention_channels", &m->style.attention_channels);
    Get(s, "embed_dim", &m->style.embed_dim);
  }
  if (j.contains("decoder")) {
    const json& d = j.at("decoder");
    CheckKeys(d,
              {"prenet_dim", "prenet_dropout", "prenet_dropout_inference",
               "attention_rnn_dim", "decoder_rnn_dim", "attention_dim",
               "location_filters", "location_kernel", "stop_threshold",
               "max_len_factor", "attention_window", "completion_dwell_factor",
               "completion_dwell_min", "max_dwell"},
              "model.decoder");
    Get(d, "prenet_dim", &m->decoder.prenet_dim);
    Get(d, "prenet_dropout", &m->decoder.prenet_dropout);
    Get(d, "prenet_dropout_inference", &m->decoder.prenet_dropout_inference);
    Get(d, "attention_rnn_dim", &m->decoder.attention_rnn_dim);
    Get(d, "decoder_rnn_dim", &m->decoder.decoder_rnn_dim);
    Get(d, "attention_dim", &m->decoder.attention_dim);
    Get(d, "location_filters", &m->decoder.location_filters);
    Get(d, "location_kernel", &m->decoder.location_kernel);
    Get(d, "stop_threshold", &m->decoder.stop_threshold);
    Get(d, "max_len_factor", &m->decoder.max_len_factor);
    Get(d, "attention_window", &m->decoder.attention_window);
    Get(d, "completion_dwell_factor", &m->decoder.completion_dwell_factor);
    Get(d, "completion_dwell_min", &m->decoder.completion_dwell_min);
    Get(d, "max_dwell", &m->decoder.max_dwell);
  }
}

json TrainJson(const TrainConfig& t) {
  return {{"base_lr", t.base_lr},
          {"paralinguistic_lr", t.paralinguistic_lr},
          {"finetune_lr", t.finetune_lr},
          {"weight_decay", t.weight_decay},
          {"decay_factor", t.decay_factor},
          {"decay_every", t.decay_every},
          {"grad_clip", t.grad_clip},
          {"gate_pos_weight", t.gate_pos_weight},
          {"guided_attention_weight", t.guided_attention_weight},
          {"guided_attention_sigma", t.guided_attention_sigma},
          {"sampling_max", t.sampling_max},
          {"sampling_ramp_iters", t.sampling_ramp_iters},
          {"early_stop_patience", t.early_stop_patience},
          {"batch_size", t.batch_size},
          {"max_epochs", t.max_epochs},
          {"seed", t.seed}};
}

void TrainFromJson(const json& j, TrainConfig* t) {
  CheckKeys(j,
            {"base_lr", "paralinguistic_lr", "finetune_lr", "weight_decay",
             "decay_factor", "decay_every", "grad_clip", "gate_pos_weight",
             "guided_attention_weight", "guided_attention_sigma",
             "sampling_max", "sampling_ramp_iters", "early_stop_patience",
             "batch_size", "max_epochs", "seed"},
            "train");
  Get(j, "base_lr", &t->base_lr);
  Get(j, "paralinguistic_lr", &t->paralinguistic_lr);
  Get(j, "finetune_lr", &t->finetune_lr);
  Get(j, "weight_decay", &t->weight_decay);
  Get(j, "decay_factor", &t->decay_factor);
  Get(j, "decay_every", &t->decay_every);
  Get(j, "grad_clip", &t->grad_clip);
  Get(j, "gate_pos_weight", &t->gate_pos_weight);
  Get(j, "guided_attention_weight", &t->guided_attention_weight);
  Get(j, "guided_attention_sigma", &t->guided_attention_sigma);
  Get(j, "sampling_max", &t->sampling_max);
  Get(j, "sampling_ramp_iters", &t->sampling_ramp_iters);
  Get(j, "early_stop_patience", &t->early_stop_patience);
  Get(j, "batch_size", &t->batch_size);
  Get(j, "max_epochs", &t->max_epochs);
  Get(j, "seed", &t->seed);
}

json SerJson(const SerTrainConfig& s) {
  return {{"hidden_dim", s.hidden_dim},
          {"trainable_backbone", s.trainable_backbone},
          {"backbone_lr", s.backbone_lr},
          {"head_lr", s.head_lr},
          {"max_epochs", s.max_epochs},
          {"batch_size", s.batch_size},
          {"patience", s.patience},
          {"seed", s.seed}};
}

void SerFromJson(const json& j, SerTrainConfig* s) {
  CheckKeys(j,
            {"hidden_dim", "trainable_backbone", "backbone_lr", "head_lr",
             "max_epochs", "batch_size", "patience", "seed"},
            "ser");
  Get(j, "hidden_dim", &s->hidden_dim);
  Get(j, "trainable_backbone", &s->trainable_backbone);
  Get(j, "backbone_lr", &s->backbone_lr);
  Get(j, "head_lr", &s->head_lr);
  Get(j, "max_epochs", &s->max_epochs);
  Get(j, "batch_size", &s->batch_size);
  Get(j, "patience", &s->patience);
  Get(j, "seed", &s->seed);
}

}  // namespace

void ExperimentConfig::Validate() const {
  dsp.Validate();
  train.Validate();
  ser.Validate();
  EMOAUG_CHECK(quantizer.k >= 2, ConfigError, "quantizer.k must be >= 2");
  EMOAUG_CHECK(quantizer.max_iters > 0, ConfigError,
               "quantizer.max_iters must be positive");
  EMOAUG_CHECK(augment.n >= 0, ConfigError, "augment.n must be >= 0");
  EMOAUG_CHECK(model.semantic.vocab == quantizer.k, ConfigError,
               "model.semantic.vocab (" << model.semantic.vocab
                                        << ") must equal quantizer.k ("
                                        << quantizer.k << ")");
  EMOAUG_CHECK(model.style.n_mels == dsp.n_mels, ConfigError,
               "model.style.n_mels must equal dsp.n_mels");
  EMOAUG_CHECK(!work_dir.empty(), ConfigError, "work_dir must be set");
}

ExperimentConfig ExperimentConfig::ToyPreset() {
  ExperimentConfig cfg;
  cfg.dsp.n_fft = 512;
  cfg.dsp.win_length = 512;
  cfg.dsp.hop_length = 128;
  cfg.dsp.n_mels = 40;
  cfg.quantizer.k = 32;
  cfg.model = ModelConfig::Toy(cfg.quantizer.k, cfg.dsp.n_mels);
  cfg.train.batch_size = 8;
  cfg.train.max_epochs = 40;
  cfg.train.sampling_ramp_iters = 2000;
  cfg.ser.max_epochs = 80;
  cfg.ser.head_lr = 1e-2;
  cfg.ser.backbone_lr = 1e-3;
  return cfg;
}

std::string ExperimentConfigJson(const ExperimentConfig& cfg) {
  json j = {{"dsp", DspJson(cfg.dsp)},
            {"quantizer",
             {{"k", cfg.quantizer.k},
              {"seed", cfg.quantizer.seed},
              {"max_iters", cfg.quantizer.max_iters}}},
            {"model", ModelJson(cfg.model)},
            {"train", TrainJson(cfg.train)},
            {"augment", {{"n", cfg.augment.n}, {"balance", cfg.augment.balance}}},
            {"ser", SerJson(cfg.ser)},
            {"seed", cfg.seed},
            {"work_dir", cfg.work_dir}};
  return j.dump(2) + "\n";
}

ExperimentConfig ParseExperimentConfig(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  CheckKeys(j, {"dsp", "quantizer", "model", "train", "augment", "ser", "seed",
                "work_dir"},
            "config");
  ExperimentConfig cfg;
  try {
    if (j.contains("dsp")) DspFromJson(j.at("dsp"), &cfg.dsp);
    if (j.contains("quantizer")) {
      const json& q = j.at("quantizer");
      CheckKeys(q, {"k", "seed", "max_iters"}, "quantizer");
      Get(q, "k", &cfg.quantizer.k);
      Get(q, "seed", &cfg.quantizer.seed);
      Get(q, "max_iters", &cfg.quantizer.max_iters);
    }
    if (j.contains("model")) ModelFromJson(j.at("model"), &cfg.model);
    if (j.contains("train")) TrainFromJson(j.at("train"), &cfg.train);
    if (j.contains("augment")) {
      const json& a = j.at("augment");
      CheckKeys(a, {"n", "balance"}, "augment");
      Get(a, "n", &cfg.augment.n);
      Get(a, "balance", &cfg.augment.balance);
    }
    if (j.contains("ser")) SerFromJson(j.at("ser"), &cfg.ser);
    Get(j, "seed", &cfg.seed);
    Get(j, "work_dir", &cfg.work_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  cfg.model.Resolve();
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(is)),
                   std::istreambuf_iterator<char>());
  return ParseExperimentConfig(text);
}

void SaveExperimentConfig(const std::string& path, const ExperimentConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write config: " + path);
  os << ExperimentConfigJson(cfg);
}

std::string ConfigHash(const ExperimentConfig& cfg) {
  return HexHash(Fnv1a64(ExperimentConfigJson(cfg)));
}

void WriteRunReport(const std::string& path, const std::string& command,
                    const ExperimentConfig& cfg,
                    const std::vector<std::string>& outputs) {
  const auto now = std::chrono::system_clock::now();
  json j = {{"command", command},
            {"config_hash", ConfigHash(cfg)},
            {"seed", cfg.seed},
            {"unix_time", std::chrono::duration_cast<std::chrono::seconds>(
                              now.time_since_epoch())
                              .count()},
            {"outputs", outputs}};
  std::ofstream os(path);
  if (!os) throw IoError("cannot write run report: " + path);
  os << j.dump(2) << "\n";
}

}  // namespace emoaug
