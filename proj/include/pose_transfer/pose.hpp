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

// Pose data model shared by every module.
//
// Coordinates follow the image convention of most landmark estimators:
// x grows to the right, y grows downwards.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pose_transfer/error.hpp"

namespace pose_transfer {

inline constexpr std::string_view kBody = "BODY";
inline constexpr std::string_view kFace = "FACE";
inline constexpr std::string_view kLeftHand = "LEFT_HAND";
inline constexpr std::string_view kRightHand = "RIGHT_HAND";

inline constexpr std::string_view kLeftShoulder = "LEFT_SHOULDER";
inline constexpr std::string_view kRightShoulder = "RIGHT_SHOULDER";
inline constexpr std::string_view kLeftWrist = "LEFT_WRIST";
inline constexpr std::string_view kRightWrist = "RIGHT_WRIST";

struct ComponentDescriptor {
  std::string name;
  std::vector<std::string> point_names;
  int dims = 2;

  std::size_t size() const { return point_names.size(); }

  std::optional<std::size_t> PointIndex(std::string_view point) const {
    auto it = std::find(point_names.begin(), point_names.end(), point);
    if (it == point_names.end()) return std::nullopt;
    return static_cast<std::size_t>(it - point_names.begin());
  }

  bool operator==(const ComponentDescriptor&) const = default;
};

struct PoseHeader {
  std::uint16_t version = 1;
  float fps = 25.0f;
  std::vector<ComponentDescriptor> components;

  std::size_t total_points() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.size();
    return n;
  }

  // Dimensionality of the first component; validate() checks they agree.
  int dims() const { return components.empty() ? 0 : components.front().dims; }

  const ComponentDescriptor* Find(std::string_view name) const {
    for (const auto& c : components)
      if (c.name == name) return &c;
    return nullptr;
  }

  // Index of the component's first keypoint in the flattened keypoint axis.
  std::optional<std::size_t> ComponentOffset(std::string_view name) const {
    std::size_t offset = 0;
    for (const auto& c : components) {
      if (c.name == name) return offset;
      offset += c.size();
    }
    return std::nullopt;
  }

  // Flattened keypoint index of `point` inside `component`.
  std::optional<std::size_t> KeypointIndex(std::string_view component,
                                           std::string_view point) const {
    auto offset = ComponentOffset(component);
    if (!offset) return std::nullopt;
    auto local = Find(component)->PointIndex(point);
    if (!local) return std::nullopt;
    return *offset + *local;
  }

  bool operator==(const PoseHeader&) const = default;
};

// Half-open keypoint range [begin, end) of one component.
struct KeypointRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

inline std::optional<KeypointRange> ComponentRange(const PoseHeader& header,
                                                   std::string_view name) {
  auto offset = header.ComponentOffset(name);
  if (!offset) return std::nullopt;
  return KeypointRange{*offset, *offset + header.Find(name)->size()};
}

// The tensor P: frames x persons x keypoints x dims, plus per-keypoint
// confidence. Confidence 0 marks a missing keypoint whose coordinates carry
// no meaning.
struct PoseSequence {
  PoseHeader header;
  std::size_t frames = 0;
  std::size_t persons = 1;
  std::vector<float> data;        // [frames][persons][keypoints][dims]
  std::vector<float> confidence;  // [frames][persons][keypoints]

  static PoseSequence Zeros(PoseHeader header, std::size_t frames, std::size_t persons = 1) {
    PoseSequence seq;
    const std::size_t kp = header.total_points();
    const std::size_t dims = static_cast<std::size_t>(std::max(header.dims(), 0));
    seq.header = std::move(header);
    seq.frames = frames;
    seq.persons = persons;
    seq.data.assign(frames * persons * kp * dims, 0.0f);
    seq.confidence.assign(frames * persons * kp, 0.0f);
    return seq;
  }

  std::size_t keypoints() const { return header.total_points(); }
  std::size_t dims() const { return static_cast<std::size_t>(std::max(header.dims(), 0)); }

  std::span<float> point(std::size_t frame, std::size_t person, std::size_t keypoint) {
    return {data.data() + PointOffset(frame, person, keypoint), dims()};
  }
  std::span<const float> point(std::size_t frame, std::size_t person,
                               std::size_t keypoint) const {
    return {data.data() + PointOffset(frame, person, keypoint), dims()};
  }

  float& conf(std::size_t frame, std::size_t person, std::size_t keypoint) {
    return confidence[(frame * persons + person) * keypoints() + keypoint];
  }
  float conf(std::size_t frame, std::size_t person, std::size_t keypoint) const {
    return confidence[(frame * persons + person) * keypoints() + keypoint];
  }

  bool operator==(const PoseSequence&) const = default;

 private:
  std::size_t PointOffset(std::size_t frame, std::size_t person, std::size_t keypoint) const {
    return ((frame * persons + person) * keypoints() + keypoint) * dims();
  }
};

// A single frame standing for one person's appearance (P0 in the transfer
// rule, or a corpus mean frame).
struct AppearanceFrame {
  PoseHeader header;
  std::vector<float> points;      // [keypoints][dims]
  std::vector<float> confidence;  // [keypoints]
  bool normalized = false;

  std::size_t keypoints() const { return header.total_points(); }
  std::size_t dims() const { return static_cast<std::size_t>(std::max(header.dims(), 0)); }

  std::span<const float> point(std::size_t keypoint) const {
    return {points.data() + keypoint * dims(), dims()};
  }
  std::span<float> point(std::size_t keypoint) {
    return {points.data() + keypoint * dims(), dims()};
  }

  static AppearanceFrame FromFrame(const PoseSequence& seq, std::size_t frame,
                                   std::size_t person = 0, bool normalized = false) {
    AppearanceFrame out;
    out.header = seq.header;
    out.normalized = normalized;
    const std::size_t kp = seq.keypoints();
    const std::size_t dims = seq.dims();
    const auto first = seq.point(frame, person, 0).data();
    out.points.assign(first, first + kp * dims);
    const auto conf_first = seq.confidence.begin() +
                            static_cast<std::ptrdiff_t>((frame * seq.persons + person) * kp);
    out.confidence.assign(conf_first, conf_first + static_cast<std::ptrdiff_t>(kp));
    return out;
  }

  // One-frame, one-person sequence, the on-disk form of a mean frame.
  PoseSequence ToSequence() const {
    PoseSequence seq;
    seq.header = header;
    seq.frames = 1;
    seq.persons = 1;
    seq.data = points;
    seq.confidence = confidence;
    return seq;
  }

  bool operator==(const AppearanceFrame&) const = default;
};

namespace detail {

inline void CheckHeader(const PoseHeader& header, std::vector<Violation>& out) {
  if (!(std::isfinite(header.fps) && header.fps > 0.0f))
    out.push_back({"header.fps", std::nullopt, "fps must be finite and > 0"});
  if (header.components.empty()) {
    out.push_back({"header.components", std::nullopt, "no components"});
    return;
  }
  std::set<std::string> names;
  const int dims = header.components.front().dims;
  if (dims != 2 && dims != 3)
    out.push_back({"header.dims", std::nullopt, "dimensionality must be 2 or 3"});
  for (const auto& c : header.components) {
    if (c.name.empty())
      out.push_back({"header.components", std::nullopt, "empty component name"});
    else if (!names.insert(c.name).second)
      out.push_back({"header.components", std::nullopt, "duplicate component " + c.name});
    if (c.dims != dims)
      out.push_back({"header.dims", std::nullopt, "component " + c.name + " has dims " +
                                                      std::to_string(c.dims) + ", expected " +
                                                      std::to_string(dims)});
    std::set<std::string> points;
    for (const auto& p : c.point_names)
      if (p.empty() || !points.insert(p).second)
        out.push_back({"header.point_names", std::nullopt,
                       "empty or duplicate point name '" + p + "' in " + c.name});
    if (c.name == kBody) {
      for (auto required : {kLeftShoulder, kRightShoulder, kLeftWrist, kRightWrist})
        if (!c.PointIndex(required))
          out.push_back({"header.point_names", std::nullopt,
                         "BODY lacks required landmark " + std::string(required)});
    }
  }
  if (header.total_points() == 0)
    out.push_back({"header.components", std::nullopt, "zero keypoints"});
}

}  // namespace detail

// Lists every broken invariant of `seq`; an empty result means valid.
inline std::vector<Violation> validate(const PoseSequence& seq) {
  std::vector<Violation> out;
  detail::CheckHeader(seq.header, out);
  if (seq.frames < 1) out.push_back({"frames", std::nullopt, "sequence has no frames"});
  if (seq.persons < 1) out.push_back({"persons", std::nullopt, "sequence has no persons"});
  if (!out.empty()) return out;

  const std::size_t kp = seq.keypoints();
  const std::size_t dims = seq.dims();
  const std::size_t expected_conf = seq.frames * seq.persons * kp;
  if (seq.data.size() != expected_conf * dims || seq.confidence.size() != expected_conf) {
    out.push_back({"shape", std::nullopt,
                   "header implies " + std::to_string(expected_conf * dims) +
                       " coordinates and " + std::to_string(expected_conf) +
                       " confidences, got " + std::to_string(seq.data.size()) + " and " +
                       std::to_string(seq.confidence.size())});
    return out;
  }

  for (std::size_t t = 0; t < seq.frames; ++t) {
    bool bad_conf = false;
    bool bad_coord = false;
    for (std::size_t p = 0; p < seq.persons; ++p) {
      for (std::size_t k = 0; k < kp; ++k) {
        const float c = seq.conf(t, p, k);
        if (!(c >= 0.0f && c <= 1.0f)) {
          bad_conf = true;
          continue;
        }
        if (c > 0.0f)
          for (float v : seq.point(t, p, k))
            if (!std::isfinite(v)) bad_coord = true;
      }
    }
    if (bad_conf) out.push_back({"confidence", t, "confidence outside [0, 1]"});
    if (bad_coord) out.push_back({"data", t, "non-finite coordinate with nonzero confidence"});
  }
  return out;
}

inline void ensure_valid(const PoseSequence& seq) {
  auto violations = validate(seq);
  if (!violations.empty()) throw ValidationError(std::move(violations));
}

// Copies the requested components, kept in header order.
inline PoseSequence select_components(const PoseSequence& seq,
                                      const std::vector<std::string>& names) {
  for (const auto& name : names)
    if (!seq.header.Find(name)) throw Error("unknown component '" + name + "'");

  PoseSequence out;
  out.header.version = seq.header.version;
  out.header.fps = seq.header.fps;
  std::vector<KeypointRange> ranges;
  for (const auto& c : seq.header.components) {
    if (std::find(names.begin(), names.end(), c.name) == names.end()) continue;
    out.header.components.push_back(c);
    ranges.push_back(*ComponentRange(seq.header, c.name));
  }
  out.frames = seq.frames;
  out.persons = seq.persons;
  const std::size_t dims = seq.dims();
  out.data.reserve(seq.frames * seq.persons * out.keypoints() * dims);
  out.confidence.reserve(seq.frames * seq.persons * out.keypoints());
  for (std::size_t t = 0; t < seq.frames; ++t)
    for (std::size_t p = 0; p < seq.persons; ++p)
      for (const auto& r : ranges)
        for (std::size_t k = r.begin; k < r.end; ++k) {
          auto pt = seq.point(t, p, k);
          out.data.insert(out.data.end(), pt.begin(), pt.end());
          out.confidence.push_back(seq.conf(t, p, k));
        }
  return out;
}

}  // namespace pose_transfer
