// src/corpus.cc

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

#include "emoaug/corpus.h"

#include <fstream>

#include <json.hpp>

namespace emoaug {

using nlohmann::json;

int EmotionIndex(const std::string& emotion) {
  for (size_t i = 0; i < kEmotions.size(); ++i)
    if (emotion == kEmotions[i]) return static_cast<int>(i);
  throw DataError("unknown emotion label: " + emotion);
}

namespace {

std::vector<json> ReadJsonl(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open manifest: " + path);
  std::vector<json> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void WriteJsonl(const std::string& path, const std::vector<json>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write manifest: " + path);
  for (const auto& r : rows) os << r.dump() << "\n";
  if (!os) throw IoError("short write: " + path);
}

}  // namespace

Manifest LoadManifest(const std::string& path) {
  Manifest m;
  for (const auto& j : ReadJsonl(path)) {
    UtteranceRecord r;
    r.utt_id = j.at("utt_id").get<std::string>();
    r.audio_path = j.at("audio").get<std::string>();
    r.speaker = j.at("speaker").get<std::string>();
    r.emotion = j.at("emotion").get<std::string>();
    r.session = j.at("session").get<std::string>();
    r.duration = j.value("duration", 0.0);
    EmotionIndex(r.emotion);  // validate against the closed set
    m.push_back(std::move(r));
  }
  return m;
}

void SaveManifest(const std::string& path, const Manifest& manifest) {
  std::vector<json> rows;
  rows.reserve(manifest.size());
  for (const auto& r : manifest) {
    rows.push_back({{"utt_id", r.utt_id},
                    {"audio", r.audio_path},
                    {"speaker", r.speaker},
                    {"emotion", r.emotion},
                    {"session", r.session},
                    {"duration", r.duration}});
  }
  WriteJsonl(path, rows);
}

std::vector<AugmentedRecord> LoadAugmentedManifest(const std::string& path) {
  std::vector<AugmentedRecord> out;
  for (const auto& j : ReadJsonl(path)) {
    AugmentedRecord r;
    r.out_id = j.at("out_id").get<std::string>();
    r.wav_path = j.at("wav").get<std::string>();
    r.speaker = j.at("speaker").get<std::string>();
    r.emotion = j.at("emotion").get<std::string>();
    r.source_id = j.at("source_id").get<std::string>();
    r.ref_id = j.value("ref_id", std::string());
    r.truncated = j.value("truncated", false);
    r.method = j.value("method", std::string("emoaug"));
    out.push_back(std::move(r));
  }
  return out;
}

void SaveAugmentedManifest(const std::string& path,
                           const std::vector<AugmentedRecord>& rows) {
  std::vector<json> js;
  js.reserve(rows.size());
  for (const auto& r : rows) {
    js.push_back({{"out_id", r.out_id},
                  {"wav", r.wav_path},
                  {"speaker", r.speaker},
                  {"emotion", r.emotion},
                  {"source_id", r.source_id},
                  {"ref_id", r.ref_id},
                  {"truncated", r.truncated},
                  {"method", r.method}});
  }
  WriteJsonl(path, js);
}

UnitStore LoadUnitStore(const std::string& path) {
  UnitStore store;
  for (const auto& j : ReadJsonl(path)) {
    UnitSequence u;
    u.units = j.at("units").get<std::vector<int>>();
    u.deduped = j.value("deduped", false);
    u.k = j.value("k", 0);
    store.emplace(j.at("utt_id").get<std::string>(), std::move(u));
  }
  return store;
}

void SaveUnitStore(const std::string& path, const UnitStore& store) {
  std::vector<json> rows;
  rows.reserve(store.size());
  for (const auto& [id, u] : store) {
    rows.push_back(
        {{"utt_id", id}, {"units", u.units}, {"deduped", u.deduped}, {"k", u.k}});
  }
  WriteJsonl(path, rows);
}

}  // namespace emoaug
