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

#include <catch_amalgamated.hpp>

#include "test_support.hpp"

namespace pt = pose_transfer;
namespace syn = pose_transfer::synthetic;

namespace {

// Raises both wrists and hands above the shoulders in frames [begin, end),
// drifting a little every frame so the motion never reads as rest.
pt::PoseSequence raise_hands(pt::PoseSequence seq, std::size_t begin, std::size_t end) {
  const auto left = *pt::ComponentRange(seq.header, pt::kLeftHand);
  const auto right = *pt::ComponentRange(seq.header, pt::kRightHand);
  std::vector<std::size_t> moved = {15, 16};
  for (std::size_t k = left.begin; k < right.end; ++k) moved.push_back(k);
  for (std::size_t t = begin; t < end; ++t)
    for (std::size_t k : moved) {
      seq.point(t, 0, k)[1] -= 1.5f;
      seq.point(t, 0, k)[0] += 0.05f * static_cast<float>(t - begin);
    }
  return seq;
}

pt::StitchConfig no_crop(std::size_t gap = 8) {
  pt::StitchConfig config;
  config.transition_frames = gap;
  config.rest_threshold = 0.0;
  return config;
}

}  // namespace

TEST_CASE("crop_neutral trims rest frames at both ends", "[stitch]") {
  // 10 still frames, 10 frames of raised-hand motion, 10 still frames. The
  // last leading rest frame is 9 (its successor moves); the first trailing
  // rest frame is 20 (its predecessor moves).
  const auto seq = raise_hands(syn::rest_sequence(30), 10, 20);
  const auto cropped = pt::crop_neutral(seq, {});
  REQUIRE(cropped.frames == 12);
  CHECK(pt::testing::bitwise_equal(cropped, pt::slice_frames(seq, 9, 21)));
}

TEST_CASE("crop_neutral keeps raised still hands", "[stitch]") {
  // Hands held up but perfectly still are not at rest.
  const auto seq = raise_hands(syn::rest_sequence(6), 0, 3);
  auto held = seq;
  for (std::size_t t = 0; t < 3; ++t)
    for (std::size_t v = 0; v < held.keypoints() * 2; ++v)
      held.data[t * held.keypoints() * 2 + v] = seq.data[v];
  const auto cropped = pt::crop_neutral(held, {});
  CHECK(cropped.frames == 4);
  CHECK(pt::testing::bitwise_equal(cropped, pt::slice_frames(held, 0, 4)));
}

TEST_CASE("crop_neutral keeps one frame of a still clip", "[stitch]") {
  const auto seq = syn::rest_sequence(10);
  const auto cropped = pt::crop_neutral(seq, {});
  CHECK(cropped.frames == 1);
  CHECK(pt::testing::bitwise_equal(cropped, pt::slice_frames(seq, 5, 6)));
}

TEST_CASE("crop_neutral with a zero threshold is the identity", "[stitch]") {
  const auto seq = raise_hands(syn::rest_sequence(30), 10, 20);
  CHECK(pt::testing::bitwise_equal(pt::crop_neutral(seq, no_crop()), seq));
  pt::StitchConfig bad;
  bad.rest_threshold = -1.0;
  CHECK_THROWS_AS(pt::crop_neutral(seq, bad), pt::Error);
}

TEST_CASE("stitching a single clip returns it", "[stitch]") {
  std::mt19937_64 rng(1);
  const auto a = pt::testing::random_signing(rng, 12);
  const auto result = pt::stitch({a}, no_crop());
  CHECK(pt::testing::bitwise_equal(result.sequence, a));
  CHECK(result.zones.empty());
}

TEST_CASE("stitch output length and zones", "[stitch]") {
  std::mt19937_64 rng(2);
  std::vector<pt::PoseSequence> clips;
  for (std::size_t n : {5u, 9u, 3u}) clips.push_back(pt::testing::random_signing(rng, n));
  for (std::size_t gap : {0u, 1u, 8u}) {
    const auto result = pt::stitch(clips, no_crop(gap));
    CHECK(result.sequence.frames == 5 + 9 + 3 + 2 * gap);
    REQUIRE(result.zones.size() == 2);
    CHECK(result.zones[0] == pt::FrameRange{4, 4 + gap + 1});
    CHECK(result.zones[1] == pt::FrameRange{5 + gap + 8, 5 + gap + 8 + gap + 1});
    CHECK(pt::validate(result.sequence).empty());
  }
}

TEST_CASE("transitions interpolate linearly", "[stitch]") {
  std::mt19937_64 rng(3);
  auto a = pt::testing::random_signing(rng, 4);
  auto b = pt::testing::random_signing(rng, 4);
  auto config = no_crop(3);
  config.unify_appearance = false;
  const auto out = pt::stitch({a, b}, config).sequence;
  const std::size_t kp = a.keypoints();
  for (std::size_t j = 1; j <= 3; ++j)
    for (std::size_t k = 0; k < kp; k += 7) {
      const double x0 = a.point(3, 0, k)[0];
      const double x1 = b.point(0, 0, k)[0];
      CHECK_THAT(out.point(3 + j, 0, k)[0], Catch::Matchers::WithinAbs(x0 + (x1 - x0) * j / 4.0, 1e-6));
    }

  // Equal boundary frames give constant transitions.
  b = pt::testing::random_signing(rng, 4);
  for (std::size_t v = 0; v < kp * 2; ++v) b.data[v] = a.data[3 * kp * 2 + v];
  const auto flat = pt::stitch({a, b}, config).sequence;
  for (std::size_t j = 1; j <= 3; ++j)
    CHECK(pt::testing::bitwise_equal(pt::slice_frames(flat, 3 + j, 4 + j).data, pt::slice_frames(a, 3, 4).data));
}

TEST_CASE("transition confidence is the minimum of both boundaries", "[stitch]") {
  std::mt19937_64 rng(4);
  auto a = pt::testing::random_signing(rng, 2);
  auto b = pt::testing::random_signing(rng, 2);
  a.conf(1, 0, 3) = 0.25f;
  b.conf(0, 0, 3) = 0.5f;
  auto config = no_crop(2);
  config.unify_appearance = false;
  const auto out = pt::stitch({a, b}, config).sequence;
  CHECK(out.conf(2, 0, 3) == 0.25f);
  CHECK(out.conf(3, 0, 3) == 0.25f);
}

TEST_CASE("appearance unification smooths every transition", "[stitch][property]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<pt::PoseSequence> clips;
    for (int i = 0; i < 4; ++i) clips.push_back(pt::testing::random_signing(rng, 10, 0.15, 0.01));
    auto config = no_crop();
    const auto unified = pt::stitch(clips, config);
    config.unify_appearance = false;
    const auto plain = pt::stitch(clips, config);
    REQUIRE(unified.zones == plain.zones);
    const auto report =
        pt::stitch_zone_report(pt::flow_series(unified.sequence), pt::flow_series(plain.sequence), unified.zones);
    for (const auto& zone : report.zones) CHECK(zone.peak_a < zone.peak_b);
    CHECK(report.outside_max_abs_diff <= 1e-6);
  }
}

TEST_CASE("stitching clips that share an appearance changes nothing", "[stitch]") {
  std::mt19937_64 rng(6);
  const auto a = pt::testing::random_signing(rng, 10);
  auto config = no_crop();
  const auto unified = pt::stitch({a, a, a}, config).sequence;
  config.unify_appearance = false;
  CHECK(pt::testing::bitwise_equal(unified, pt::stitch({a, a, a}, config).sequence));
}

TEST_CASE("stitching is associative without cropping", "[stitch]") {
  std::mt19937_64 rng(7);
  const auto a = pt::testing::random_signing(rng, 6);
  const auto b = pt::testing::random_signing(rng, 7);
  const auto c = pt::testing::random_signing(rng, 5);
  for (bool unify : {false, true}) {
    auto config = no_crop(4);
    config.unify_appearance = unify;
    const auto flat = pt::stitch({a, b, c}, config).sequence;
    const auto left = pt::stitch({pt::stitch({a, b}, config).sequence, c}, config).sequence;
    REQUIRE(left.frames == flat.frames);
    CHECK(pt::testing::max_abs_diff(left.data, flat.data) <= 1e-6);
    CHECK(left.confidence == flat.confidence);
  }
}

TEST_CASE("explicit stitch targets", "[stitch]") {
  std::mt19937_64 rng(8);
  const auto a = pt::testing::random_signing(rng, 5);
  const auto b = pt::testing::random_signing(rng, 5);
  auto config = no_crop();
  config.target_appearance = pt::testing::random_appearance(rng);
  const auto out = pt::stitch({a, b}, config).sequence;
  // Body and face of the anchor frame come from the target verbatim.
  const std::size_t n = pt::ComponentRange(out.header, pt::kFace)->end * out.dims();
  const auto& want = config.target_appearance->points;
  CHECK(std::equal(want.begin(), want.begin() + static_cast<std::ptrdiff_t>(n), out.data.begin()));
}

TEST_CASE("stitch errors", "[stitch]") {
  CHECK_THROWS_WITH(pt::stitch({}, {}), Catch::Matchers::ContainsSubstring("empty"));
  const auto a = syn::rest_sequence(3);
  const auto b = syn::rest_sequence(3, 3);
  CHECK_THROWS_WITH(pt::stitch({a, b}, {}), Catch::Matchers::ContainsSubstring("incompatible"));
}
