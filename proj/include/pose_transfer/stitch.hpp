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

// Sentence assembly from per-sign clips: neutral-posture cropping,
// appearance unification and linear transitions.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pose_transfer/appearance.hpp"
#include "pose_transfer/error.hpp"
#include "pose_transfer/metrics.hpp"
#include "pose_transfer/pose.hpp"

namespace pose_transfer {

struct StitchConfig {
  std::size_t transition_frames = 8;
  // Movement below this (normalized units per frame) may count as rest.
  double rest_threshold = 0.02;
  bool unify_appearance = true;
  // Unset: the first cropped clip's appearance.
  std::optional<AppearanceFrame> target_appearance;
  TransferPolicy policy;

  void Validate() const {
    if (!(rest_threshold >= 0.0)) throw Error("rest_threshold must be >= 0");
  }
};

struct StitchResult {
  PoseSequence sequence;
  // One zone per junction, as flow-series indices: every transition from the
  // last frame of clip i to the first frame of clip i + 1.
  std::vector<FrameRange> zones;
};

// Copy of frames [begin, end).
inline PoseSequence slice_frames(const PoseSequence& seq, std::size_t begin, std::size_t end) {
  if (begin >= end || end > seq.frames) throw Error("invalid frame slice");
  PoseSequence out;
  out.header = seq.header;
  out.frames = end - begin;
  out.persons = seq.persons;
  const std::size_t conf_stride = seq.persons * seq.keypoints();
  const std::size_t data_stride = conf_stride * seq.dims();
  out.data.assign(seq.data.begin() + static_cast<std::ptrdiff_t>(begin * data_stride),
                  seq.data.begin() + static_cast<std::ptrdiff_t>(end * data_stride));
  out.confidence.assign(seq.confidence.begin() + static_cast<std::ptrdiff_t>(begin * conf_stride),
                        seq.confidence.begin() + static_cast<std::ptrdiff_t>(end * conf_stride));
  return out;
}

namespace detail {

// Both wrists below the shoulder line (y grows downwards). An undetected
// wrist counts as lowered; undetected shoulders mean "unknown", not rest.
inline bool wrists_lowered(const PoseSequence& seq, std::size_t t) {
  const auto ls = seq.header.KeypointIndex(kBody, kLeftShoulder);
  const auto rs = seq.header.KeypointIndex(kBody, kRightShoulder);
  const auto lw = seq.header.KeypointIndex(kBody, kLeftWrist);
  const auto rw = seq.header.KeypointIndex(kBody, kRightWrist);
  if (!ls || !rs || !lw || !rw) return false;
  if (seq.conf(t, 0, *ls) <= 0.0f || seq.conf(t, 0, *rs) <= 0.0f) return false;
  const double shoulder_y = 0.5 * (seq.point(t, 0, *ls)[1] + seq.point(t, 0, *rs)[1]);
  for (std::size_t w : {*lw, *rw})
    if (seq.conf(t, 0, w) > 0.0f && seq.point(t, 0, w)[1] <= shoulder_y) return false;
  return true;
}

}  // namespace detail

// Drops leading frames that are at rest (flow to the next frame below the
// threshold, wrists lowered) and, symmetrically, trailing rest frames. At
// least one frame always survives.
inline PoseSequence crop_neutral(const PoseSequence& seq, const StitchConfig& config) {
  config.Validate();
  if (seq.frames < 2) return seq;
  const auto flow = flow_series(seq).values;
  const std::size_t n = seq.frames;
  std::size_t begin = 0;
  while (begin < n - 1 && flow[begin] < config.rest_threshold && detail::wrists_lowered(seq, begin))
    ++begin;
  std::size_t last = n - 1;
  while (last > 0 && flow[last - 1] < config.rest_threshold && detail::wrists_lowered(seq, last))
    --last;
  if (begin > last) return slice_frames(seq, n / 2, n / 2 + 1);
  return slice_frames(seq, begin, last + 1);
}

inline StitchResult stitch(const std::vector<PoseSequence>& clips, const StitchConfig& config) {
  config.Validate();
  if (clips.empty()) throw Error("nothing to stitch: empty clip list");
  for (std::size_t i = 0; i < clips.size(); ++i) {
    ensure_valid(clips[i]);
    require_compatible(clips.front().header, clips[i].header);
    if (clips[i].persons != clips.front().persons)
      throw Error("clip " + std::to_string(i) + " has a different person count");
  }

  std::vector<PoseSequence> prepared;
  prepared.reserve(clips.size());
  for (const auto& clip : clips) prepared.push_back(crop_neutral(clip, config));
  if (config.unify_appearance) {
    const AppearanceFrame target = config.target_appearance
                                       ? *config.target_appearance
                                       : extract_appearance(prepared.front(), config.policy);
    for (auto& clip : prepared) clip = transfer_appearance(clip, target, config.policy);
  }

  const std::size_t gap = config.transition_frames;
  std::size_t total = gap * (prepared.size() - 1);
  for (const auto& clip : prepared) total += clip.frames;

  StitchResult result;
  PoseSequence& out = result.sequence;
  out.header = prepared.front().header;
  out.frames = total;
  out.persons = prepared.front().persons;
  out.data.reserve(total * out.persons * out.keypoints() * out.dims());
  out.confidence.reserve(total * out.persons * out.keypoints());

  std::size_t written = 0;
  for (std::size_t i = 0; i < prepared.size(); ++i) {
    const PoseSequence& clip = prepared[i];
    if (i > 0) {
      const PoseSequence& prev = prepared[i - 1];
      result.zones.push_back({written - 1, written + gap});
      const std::size_t slots = out.persons * out.keypoints();
      const std::size_t dims = out.dims();
      const float* from = prev.data.data() + (prev.frames - 1) * slots * dims;
      const float* to = clip.data.data();
      const float* from_conf = prev.confidence.data() + (prev.frames - 1) * slots;
      const float* to_conf = clip.confidence.data();
      for (std::size_t j = 1; j <= gap; ++j) {
        const double alpha = static_cast<double>(j) / static_cast<double>(gap + 1);
        for (std::size_t v = 0; v < slots * dims; ++v) {
          const double a = from[v];
          out.data.push_back(static_cast<float>(a + alpha * (static_cast<double>(to[v]) - a)));
        }
        for (std::size_t s = 0; s < slots; ++s)
          out.confidence.push_back(std::min(from_conf[s], to_conf[s]));
      }
      written += gap;
    }
    out.data.insert(out.data.end(), clip.data.begin(), clip.data.end());
    out.confidence.insert(out.confidence.end(), clip.confidence.begin(), clip.confidence.end());
    written += clip.frames;
  }
  return result;
}

}  // namespace pose_transfer
