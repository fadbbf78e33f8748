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

// Shoulder-width normalization into the common coordinate frame used by
// appearance transfer.

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pose_transfer/error.hpp"
#include "pose_transfer/pose.hpp"

namespace pose_transfer {

// x -> x * scale + offset, applied per coordinate.
struct NormalizationParams {
  double scale = 1.0;
  std::vector<double> offset;

  static NormalizationParams Identity(std::size_t dims) { return {1.0, std::vector<double>(dims, 0.0)}; }

  bool operator==(const NormalizationParams&) const = default;
};

enum class ScaleStatistic {
  kAllFrames,           // confidence-weighted mean over every frame
  kFirstConfidentFrame  // the anchor frame alone
};

// Shoulder width of a normalized pose.
inline constexpr double kNormalizedShoulderWidth = 1.0;
// Largest shoulder-width deviation accepted as "already normalized".
inline constexpr double kNormalizedTolerance = 0.1;
inline constexpr double kDegenerateShoulderWidth = 1e-9;

struct ShoulderIndices {
  std::size_t left;
  std::size_t right;
};

inline ShoulderIndices shoulder_indices(const PoseHeader& header) {
  auto left = header.KeypointIndex(kBody, kLeftShoulder);
  auto right = header.KeypointIndex(kBody, kRightShoulder);
  if (!left || !right) throw Error("pose has no BODY component with both shoulder landmarks");
  return {*left, *right};
}

inline double distance(std::span<const float> a, std::span<const float> b) {
  double sq = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = static_cast<double>(a[d]) - static_cast<double>(b[d]);
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

// Confidence-weighted mean shoulder distance of one person; nullopt when no
// frame has both shoulders confident. Each frame weighs min(conf_left, conf_right).
inline std::optional<double> mean_shoulder_width(const PoseSequence& seq, std::size_t person = 0) {
  const auto sh = shoulder_indices(seq.header);
  double sum = 0.0;
  double weight = 0.0;
  for (std::size_t t = 0; t < seq.frames; ++t) {
    const double w = std::min(seq.conf(t, person, sh.left), seq.conf(t, person, sh.right));
    if (w <= 0.0) continue;
    sum += w * distance(seq.point(t, person, sh.left), seq.point(t, person, sh.right));
    weight += w;
  }
  if (weight <= 0.0) return std::nullopt;
  return sum / weight;
}

inline std::optional<double> shoulder_width(const AppearanceFrame& frame) {
  const auto sh = shoulder_indices(frame.header);
  if (frame.confidence[sh.left] <= 0.0f || frame.confidence[sh.right] <= 0.0f) return std::nullopt;
  return distance(frame.point(sh.left), frame.point(sh.right));
}

inline std::optional<std::size_t> first_confident_shoulder_frame(const PoseSequence& seq,
                                                                 std::size_t person = 0) {
  const auto sh = shoulder_indices(seq.header);
  for (std::size_t t = 0; t < seq.frames; ++t)
    if (seq.conf(t, person, sh.left) > 0.0f && seq.conf(t, person, sh.right) > 0.0f) return t;
  return std::nullopt;
}

// Params that bring person 0 to unit shoulder width with the mid-shoulder
// point of the first confident frame at the origin.
inline NormalizationParams compute_normalization(
    const PoseSequence& seq, ScaleStatistic statistic = ScaleStatistic::kAllFrames) {
  const auto sh = shoulder_indices(seq.header);
  const auto anchor = first_confident_shoulder_frame(seq);
  if (!anchor) throw Error("cannot normalize: no frame has both shoulders confident");

  const auto left = seq.point(*anchor, 0, sh.left);
  const auto right = seq.point(*anchor, 0, sh.right);
  const double width = statistic == ScaleStatistic::kAllFrames ? *mean_shoulder_width(seq)
                                                               : distance(left, right);
  if (!(width >= kDegenerateShoulderWidth))
    throw Error("cannot normalize: degenerate pose, mean shoulder distance " +
                std::to_string(width));

  NormalizationParams params;
  params.scale = 1.0 / width;
  params.offset.resize(seq.dims());
  for (std::size_t d = 0; d < seq.dims(); ++d) {
    const double mid = 0.5 * (static_cast<double>(left[d]) + static_cast<double>(right[d]));
    params.offset[d] = -mid * params.scale;
  }
  return params;
}

// Applies the affine map to every person and frame; confidence is copied.
inline PoseSequence apply_normalization(const PoseSequence& seq, const NormalizationParams& params) {
  if (!(std::isfinite(params.scale) && params.scale > 0.0))
    throw Error("normalization scale must be finite and > 0");
  if (params.offset.size() != seq.dims())
    throw Error("normalization offset has " + std::to_string(params.offset.size()) +
                " dims, pose has " + std::to_string(seq.dims()));
  PoseSequence out = seq;
  const std::size_t dims = seq.dims();
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = static_cast<float>(static_cast<double>(seq.data[i]) * params.scale +
                                     params.offset[i % dims]);
  return out;
}

inline NormalizationParams invert_normalization(const NormalizationParams& params) {
  NormalizationParams inv;
  inv.scale = 1.0 / params.scale;
  inv.offset.reserve(params.offset.size());
  for (double o : params.offset) inv.offset.push_back(o == 0.0 ? 0.0 : -o / params.scale);
  return inv;
}

struct Normalized {
  PoseSequence sequence;
  NormalizationParams params;
};

inline Normalized normalize(const PoseSequence& seq,
                            ScaleStatistic statistic = ScaleStatistic::kAllFrames) {
  auto params = compute_normalization(seq, statistic);
  return {apply_normalization(seq, params), std::move(params)};
}

// Throws unless person 0's mean shoulder width is within kNormalizedTolerance of 1.
inline void require_normalized(const PoseSequence& seq, std::string_view what) {
  const auto width = mean_shoulder_width(seq);
  if (!width) throw Error(std::string(what) + ": no confident shoulders to check normalization");
  if (std::abs(*width - kNormalizedShoulderWidth) > kNormalizedTolerance)
    throw Error(std::string(what) + " is not normalized: shoulder width deviates from 1 by " +
                std::to_string(std::abs(*width - kNormalizedShoulderWidth)));
}

inline void require_normalized(const AppearanceFrame& frame, std::string_view what) {
  const auto width = shoulder_width(frame);
  if (!width) throw Error(std::string(what) + ": shoulders missing from appearance frame");
  if (std::abs(*width - kNormalizedShoulderWidth) > kNormalizedTolerance)
    throw Error(std::string(what) + " is not normalized: shoulder width deviates from 1 by " +
                std::to_string(std::abs(*width - kNormalizedShoulderWidth)));
}

}  // namespace pose_transfer
