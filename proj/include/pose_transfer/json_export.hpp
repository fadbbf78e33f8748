// Copyright 2026 The pose_transfer Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Human-readable JSON form of a pose sequence, for debugging and interop.
//
//   {
//     "version": 1, "fps": 25.0,
//     "components": [{"name": "BODY", "dims": 2, "points": ["NOSE", ...]}, ...],
//     "frames": F, "persons": P,
//     "data": [[[[x, y], ...] per person] per frame],
//     "confidence": [[[c, ...] per person] per frame]
//   }
//
// Zero-confidence coordinates are exported as 0, like the binary writer.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "json.hpp"
#include "pose_transfer/error.hpp"
#include "pose_transfer/io.hpp"
#include "pose_transfer/pose.hpp"

namespace pose_transfer {

inline std::string export_json(const PoseSequence& seq, int indent = 1) {
  ensure_valid(seq);
  const PoseSequence canon = canonicalize(seq);
  nlohmann::json doc;
  doc["version"] = canon.header.version;
  doc["fps"] = canon.header.fps;
  auto& components = doc["components"] = nlohmann::json::array();
  for (const auto& c : canon.header.components)
    components.push_back({{"name", c.name}, {"dims", c.dims}, {"points", c.point_names}});
  doc["frames"] = canon.frames;
  doc["persons"] = canon.persons;
  auto& data = doc["data"] = nlohmann::json::array();
  auto& conf = doc["confidence"] = nlohmann::json::array();
  for (std::size_t t = 0; t < canon.frames; ++t) {
    auto frame_data = nlohmann::json::array();
    auto frame_conf = nlohmann::json::array();
    for (std::size_t p = 0; p < canon.persons; ++p) {
      auto person_data = nlohmann::json::array();
      auto person_conf = nlohmann::json::array();
      for (std::size_t k = 0; k < canon.keypoints(); ++k) {
        auto pt = canon.point(t, p, k);
        person_data.push_back(nlohmann::json(std::vector<float>(pt.begin(), pt.end())));
        person_conf.push_back(canon.conf(t, p, k));
      }
      frame_data.push_back(std::move(person_data));
      frame_conf.push_back(std::move(person_conf));
    }
    data.push_back(std::move(frame_data));
    conf.push_back(std::move(frame_conf));
  }
  return doc.dump(indent);
}

inline PoseSequence import_json(std::string_view text) {
  PoseSequence seq;
  try {
    const auto doc = nlohmann::json::parse(text);
    seq.header.version = doc.at("version").get<std::uint16_t>();
    seq.header.fps = doc.at("fps").get<float>();
    for (const auto& c : doc.at("components"))
      seq.header.components.push_back({c.at("name").get<std::string>(),
                                       c.at("points").get<std::vector<std::string>>(),
                                       c.at("dims").get<int>()});
    seq.frames = doc.at("frames").get<std::size_t>();
    seq.persons = doc.at("persons").get<std::size_t>();
    for (const auto& frame : doc.at("data"))
      for (const auto& person : frame)
        for (const auto& point : person)
          for (const auto& v : point) seq.data.push_back(v.get<float>());
    for (const auto& frame : doc.at("confidence"))
      for (const auto& person : frame)
        for (const auto& c : person) seq.confidence.push_back(c.get<float>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed pose JSON: ") + e.what());
  }
  ensure_valid(seq);
  return seq;
}

}  // namespace pose_transfer
