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

// Appearance transfer between normalized pose sequences.
//
// A signer's appearance is one reference frame P0. Transferring the
// appearance of B onto a sequence by A replaces A's reference frame with B's
// for every frame of the transferred components:
//
//   out[t][k] = source[t][k] - source_appearance[k] + target_appearance[k]
//
// The per-keypoint offset is constant over time, so frame-to-frame motion is
// untouched. Hands are never transferred: their shape is sign content.

#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "pose_transfer/error.hpp"
#include "pose_transfer/normalize.hpp"
#include "pose_transfer/pose.hpp"

namespace pose_transfer {

enum class HandAnchor {
  kRigidFollowWrist,  // translate each hand by its body wrist's offset
  kPassThrough        // leave hand coordinates untouched
};

enum class AppearanceSelector {
  kFirstFrame,
  kFirstConfidentFrame  // first frame with >= 90% of BODY keypoints confident
};

inline constexpr double kConfidentBodyFraction = 0.9;

struct TransferPolicy {
  std::vector<std::string> transferred_components{std::string(kBody), std::string(kFace)};
  HandAnchor hand_anchor = HandAnchor::kRigidFollowWrist;
  AppearanceSelector selector = AppearanceSelector::kFirstFrame;

  void Validate() const {
    for (const auto& name : transferred_components)
      if (name == kLeftHand || name == kRightHand)
        throw Error("hand component " + name + " cannot be appearance-transferred");
  }
};

// Index of the frame that holds the signer's appearance.
inline std::size_t select_appearance_frame(const PoseSequence& seq, const TransferPolicy& policy) {
  if (policy.selector == AppearanceSelector::kFirstFrame) return 0;
  const auto body = ComponentRange(seq.header, kBody);
  if (!body) throw Error("FIRST_CONFIDENT_FRAME needs a BODY component");
  const std::size_t n = body->end - body->begin;
  for (std::size_t t = 0; t < seq.frames; ++t) {
    std::size_t confident = 0;
    for (std::size_t k = body->begin; k < body->end; ++k)
      if (seq.conf(t, 0, k) > 0.0f) ++confident;
    if (static_cast<double>(confident) >= kConfidentBodyFraction * static_cast<double>(n)) return t;
  }
  throw Error("no frame has at least 90% of BODY keypoints confident");
}

inline AppearanceFrame extract_appearance(const PoseSequence& seq, const TransferPolicy& policy = {}) {
  return AppearanceFrame::FromFrame(seq, select_appearance_frame(seq, policy), 0, true);
}

// Throws naming the first component whose layout differs.
inline void require_compatible(const PoseHeader& a, const PoseHeader& b) {
  const std::size_t n = std::max(a.components.size(), b.components.size());
  for (std::size_t i = 0; i < n; ++i) {
    const ComponentDescriptor* ca = i < a.components.size() ? &a.components[i] : nullptr;
    const ComponentDescriptor* cb = i < b.components.size() ? &b.components[i] : nullptr;
    if (ca && cb && *ca == *cb) continue;
    const std::string name = ca ? ca->name : cb->name;
    throw Error("incompatible skeletons: component " + name + " differs" +
                (ca && cb && ca->name != cb->name ? " (vs " + cb->name + ")" : std::string()));
  }
}

inline PoseSequence transfer_appearance(const PoseSequence& source,
                                        const AppearanceFrame& target_appearance,
                                        const TransferPolicy& policy = {}) {
  policy.Validate();
  ensure_valid(source);
  require_compatible(source.header, target_appearance.header);
  require_normalized(source, "source sequence");
  require_normalized(target_appearance, "target appearance");

  const std::size_t anchor = select_appearance_frame(source, policy);
  const AppearanceFrame source_appearance = AppearanceFrame::FromFrame(source, anchor);
  const std::size_t kp = source.keypoints();
  const std::size_t dims = source.dims();

  // Constant per-keypoint displacement, zero for untouched keypoints.
  std::vector<double> offset(kp * dims, 0.0);
  std::vector<bool> transferred(kp, false);
  std::vector<bool> present(kp, true);
  std::vector<float> cap(kp, 1.0f);
  for (const auto& name : policy.transferred_components) {
    const auto range = ComponentRange(source.header, name);
    if (!range) continue;
    for (std::size_t k = range->begin; k < range->end; ++k) {
      transferred[k] = true;
      cap[k] = std::min(source_appearance.confidence[k], target_appearance.confidence[k]);
      present[k] = cap[k] > 0.0f;
      if (!present[k]) continue;
      for (std::size_t d = 0; d < dims; ++d)
        offset[k * dims + d] = static_cast<double>(target_appearance.point(k)[d]) -
                               static_cast<double>(source_appearance.point(k)[d]);
    }
  }

  struct HandShift {
    KeypointRange range;
    std::vector<double> shift;
  };
  std::vector<HandShift> hands;
  if (policy.hand_anchor == HandAnchor::kRigidFollowWrist) {
    for (auto [hand, wrist] : {std::pair{kLeftHand, kLeftWrist}, std::pair{kRightHand, kRightWrist}}) {
      const auto range = ComponentRange(source.header, hand);
      const auto w = source.header.KeypointIndex(kBody, wrist);
      // A hand whose wrist has no offset stays where it is.
      if (!range || !w || !transferred[*w] || !present[*w]) continue;
      hands.push_back({*range, {offset.begin() + static_cast<std::ptrdiff_t>(*w * dims),
                                offset.begin() + static_cast<std::ptrdiff_t>((*w + 1) * dims)}});
    }
  }

  PoseSequence out = source;
  for (std::size_t t = 0; t < source.frames; ++t) {
    for (std::size_t k = 0; k < kp; ++k) {
      if (!transferred[k]) continue;
      float& conf = out.conf(t, 0, k);
      if (!present[k]) {
        conf = 0.0f;
        continue;
      }
      conf = std::min(conf, cap[k]);
      auto dst = out.point(t, 0, k);
      if (t == anchor) {
        std::copy_n(target_appearance.point(k).begin(), dims, dst.begin());
        continue;
      }
      const auto src = source.point(t, 0, k);
      for (std::size_t d = 0; d < dims; ++d)
        dst[d] = static_cast<float>(static_cast<double>(src[d]) + offset[k * dims + d]);
    }
    for (const auto& hand : hands)
      for (std::size_t k = hand.range.begin; k < hand.range.end; ++k) {
        const auto src = source.point(t, 0, k);
        auto dst = out.point(t, 0, k);
        for (std::size_t d = 0; d < dims; ++d)
          dst[d] = static_cast<float>(static_cast<double>(src[d]) + hand.shift[d]);
      }
  }
  return out;
}

// Replaces the signer's appearance with a corpus mean frame.
inline PoseSequence remove_appearance(const PoseSequence& seq, const AppearanceFrame& mean,
                                      const TransferPolicy& policy = {}) {
  return transfer_appearance(seq, mean, policy);
}

}  // namespace pose_transfer
