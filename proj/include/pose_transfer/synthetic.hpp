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

// A Holistic-style landmark layout (33 body points, a reduced 20-point face
// contour, two 21-point hands) and a parametric 2D rest pose for it. Used to
// synthesize signers for the evaluation harness and test fixtures.

#pragma once

#include <array>
#include <numbers>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pose_transfer/pose.hpp"

namespace pose_transfer::synthetic {

inline const std::vector<std::string>& body_point_names() {
  static const std::vector<std::string> names = {
      "NOSE",           "LEFT_EYE_INNER",   "LEFT_EYE",        "LEFT_EYE_OUTER",
      "RIGHT_EYE_INNER", "RIGHT_EYE",       "RIGHT_EYE_OUTER", "LEFT_EAR",
      "RIGHT_EAR",      "MOUTH_LEFT",       "MOUTH_RIGHT",     "LEFT_SHOULDER",
      "RIGHT_SHOULDER", "LEFT_ELBOW",       "RIGHT_ELBOW",     "LEFT_WRIST",
      "RIGHT_WRIST",    "LEFT_PINKY",       "RIGHT_PINKY",     "LEFT_INDEX",
      "RIGHT_INDEX",    "LEFT_THUMB",       "RIGHT_THUMB",     "LEFT_HIP",
      "RIGHT_HIP",      "LEFT_KNEE",        "RIGHT_KNEE",      "LEFT_ANKLE",
      "RIGHT_ANKLE",    "LEFT_HEEL",        "RIGHT_HEEL",      "LEFT_FOOT_INDEX",
      "RIGHT_FOOT_INDEX"};
  return names;
}

inline const std::vector<std::string>& hand_point_names() {
  static const std::vector<std::string> names = {
      "WRIST",            "THUMB_CMC",         "THUMB_MCP",         "THUMB_IP",
      "THUMB_TIP",        "INDEX_FINGER_MCP",  "INDEX_FINGER_PIP",  "INDEX_FINGER_DIP",
      "INDEX_FINGER_TIP", "MIDDLE_FINGER_MCP", "MIDDLE_FINGER_PIP", "MIDDLE_FINGER_DIP",
      "MIDDLE_FINGER_TIP", "RING_FINGER_MCP",  "RING_FINGER_PIP",   "RING_FINGER_DIP",
      "RING_FINGER_TIP",  "PINKY_MCP",         "PINKY_PIP",         "PINKY_DIP",
      "PINKY_TIP"};
  return names;
}

inline constexpr std::size_t kFacePoints = 20;
inline constexpr std::size_t kHandPoints = 21;

inline PoseHeader holistic_header(int dims = 2, float fps = 25.0f) {
  PoseHeader header;
  header.fps = fps;
  std::vector<std::string> face;
  for (std::size_t i = 0; i < kFacePoints; ++i) face.push_back("FACE_" + std::to_string(i));
  header.components = {{std::string(kBody), body_point_names(), dims},
                       {std::string(kFace), face, dims},
                       {std::string(kLeftHand), hand_point_names(), dims},
                       {std::string(kRightHand), hand_point_names(), dims}};
  return header;
}

using Point2 = std::array<double, 2>;

// Relaxed standing pose, normalized: shoulders at (+-0.5, 0), y downwards.
// LEFT_* landmarks sit at positive x.
inline std::vector<Point2> rest_body() {
  return {{0.0, -0.70},   {0.04, -0.78},  {0.08, -0.78},  {0.12, -0.78},  {-0.04, -0.78},
          {-0.08, -0.78}, {-0.12, -0.78}, {0.18, -0.72},  {-0.18, -0.72}, {0.05, -0.60},
          {-0.05, -0.60}, {0.50, 0.0},    {-0.50, 0.0},   {0.60, 0.60},   {-0.60, 0.60},
          {0.55, 1.10},   {-0.55, 1.10},  {0.60, 1.25},   {-0.60, 1.25},  {0.55, 1.28},
          {-0.55, 1.28},  {0.50, 1.20},   {-0.50, 1.20},  {0.30, 1.40},   {-0.30, 1.40},
          {0.30, 2.10},   {-0.30, 2.10},  {0.30, 2.80},   {-0.30, 2.80},  {0.32, 2.90},
          {-0.32, 2.90},  {0.35, 2.95},   {-0.35, 2.95}};
}

// Oval face contour around the nose.
inline std::vector<Point2> rest_face() {
  std::vector<Point2> face;
  for (std::size_t i = 0; i < kFacePoints; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(kFacePoints);
    face.push_back({0.20 * std::cos(a), -0.72 + 0.27 * std::sin(a)});
  }
  return face;
}

// Per-finger curl in [0, 1]: thumb, index, middle, ring, pinky.
using HandShape = std::array<double, 5>;

inline constexpr HandShape kRelaxedHand = {0.2, 0.2, 0.2, 0.2, 0.2};

// 21 hand landmarks relative to the wrist. `orientation` rotates the whole
// hand (radians, 0 = fingers pointing down). `left` mirrors the layout.
inline std::vector<Point2> hand_points(const HandShape& curl, double orientation, bool left) {
  static constexpr std::array<double, 5> kSpread = {-0.9, -0.25, 0.0, 0.2, 0.4};
  static constexpr std::array<std::array<double, 4>, 5> kSegments = {{
      {0.04, 0.05, 0.035, 0.03},
      {0.10, 0.045, 0.03, 0.025},
      {0.10, 0.05, 0.032, 0.026},
      {0.095, 0.045, 0.03, 0.024},
      {0.09, 0.035, 0.025, 0.02},
  }};
  const double mirror = left ? -1.0 : 1.0;
  std::vector<Point2> pts{{0.0, 0.0}};
  for (std::size_t f = 0; f < 5; ++f) {
    double angle = orientation + mirror * kSpread[f];
    double x = 0.0;
    double y = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      if (j > 0) angle += mirror * 1.1 * curl[f];
      // Direction (0, 1) rotated by `angle`.
      x += kSegments[f][j] * -std::sin(angle);
      y += kSegments[f][j] * std::cos(angle);
      pts.push_back({x, y});
    }
  }
  return pts;
}

// Writes a 2D point into frame t / person 0, zero for any extra dimension.
inline void set_point(PoseSequence& seq, std::size_t t, std::size_t k, Point2 p, float conf = 1.0f) {
  auto dst = seq.point(t, 0, k);
  dst[0] = static_cast<float>(p[0]);
  dst[1] = static_cast<float>(p[1]);
  for (std::size_t d = 2; d < dst.size(); ++d) dst[d] = 0.0f;
  seq.conf(t, 0, k) = conf;
}

// `frames` copies of the rest pose, hands relaxed at the wrists.
inline PoseSequence rest_sequence(std::size_t frames, int dims = 2) {
  PoseSequence seq = PoseSequence::Zeros(holistic_header(dims), frames);
  const auto body = rest_body();
  const auto face = rest_face();
  const std::size_t face_at = *seq.header.ComponentOffset(kFace);
  const std::size_t left_at = *seq.header.ComponentOffset(kLeftHand);
  const std::size_t right_at = *seq.header.ComponentOffset(kRightHand);
  const auto lw = body[15];
  const auto rw = body[16];
  const auto left = hand_points(kRelaxedHand, 0.0, true);
  const auto right = hand_points(kRelaxedHand, 0.0, false);
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k < body.size(); ++k) set_point(seq, t, k, body[k]);
    for (std::size_t k = 0; k < face.size(); ++k) set_point(seq, t, face_at + k, face[k]);
    for (std::size_t k = 0; k < kHandPoints; ++k) {
      set_point(seq, t, left_at + k, {lw[0] + left[k][0], lw[1] + left[k][1]});
      set_point(seq, t, right_at + k, {rw[0] + right[k][0], rw[1] + right[k][1]});
    }
  }
  return seq;
}

}  // namespace pose_transfer::synthetic
