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
using Catch::Matchers::WithinAbs;

namespace {

constexpr std::size_t kLeftShoulder = 11;
constexpr std::size_t kRightShoulder = 12;

pt::PoseSequence with_shoulders(std::size_t frames, std::array<float, 2> left, std::array<float, 2> right) {
  auto seq = pt::synthetic::rest_sequence(frames);
  for (std::size_t t = 0; t < frames; ++t) {
    seq.point(t, 0, kLeftShoulder)[0] = left[0];
    seq.point(t, 0, kLeftShoulder)[1] = left[1];
    seq.point(t, 0, kRightShoulder)[0] = right[0];
    seq.point(t, 0, kRightShoulder)[1] = right[1];
  }
  return seq;
}

}  // namespace

TEST_CASE("compute_normalization scales shoulders to unit width", "[normalize]") {
  const auto params = pt::compute_normalization(with_shoulders(4, {0, 0}, {2, 0}));
  CHECK(params.scale == 0.5);
  REQUIRE(params.offset.size() == 2);
  CHECK(params.offset[0] == -0.5);
  CHECK(params.offset[1] == 0.0);
  // The mid-shoulder point (1, 0) lands on the origin.
  CHECK(1.0 * params.scale + params.offset[0] == 0.0);
}

TEST_CASE("compute_normalization is the identity on a normalized pose", "[normalize]") {
  const auto params = pt::compute_normalization(with_shoulders(3, {-0.5f, 0}, {0.5f, 0}));
  CHECK(params.scale == 1.0);
  CHECK(params.offset[0] == 0.0);
  CHECK(params.offset[1] == 0.0);
}

TEST_CASE("compute_normalization rejects degenerate and shoulderless poses", "[normalize]") {
  CHECK_THROWS_WITH(pt::compute_normalization(with_shoulders(3, {1, 1}, {1, 1})),
                    Catch::Matchers::ContainsSubstring("degenerate"));
  auto hidden = pt::synthetic::rest_sequence(3);
  for (std::size_t t = 0; t < 3; ++t) hidden.conf(t, 0, kLeftShoulder) = 0.0f;
  CHECK_THROWS_WITH(pt::compute_normalization(hidden),
                    Catch::Matchers::ContainsSubstring("no frame has both shoulders"));
  auto no_body = pt::select_components(pt::synthetic::rest_sequence(2), {"FACE"});
  CHECK_THROWS_AS(pt::compute_normalization(no_body), pt::Error);
}

TEST_CASE("scale statistic is confidence weighted over all frames", "[normalize]") {
  // Width 2 in frame 0, width 4 in frame 1, frame 2 hidden with junk.
  auto seq = with_shoulders(3, {0, 0}, {2, 0});
  seq.point(1, 0, kRightShoulder)[0] = 4.0f;
  seq.point(2, 0, kRightShoulder)[0] = 1000.0f;
  seq.conf(2, 0, kRightShoulder) = 0.0f;
  seq.conf(1, 0, kLeftShoulder) = 0.5f;
  // Weights 1 and 0.5: mean width (2 + 0.5 * 4) / 1.5.
  CHECK_THAT(pt::compute_normalization(seq).scale, WithinAbs(1.5 / 4.0, 1e-12));
  CHECK(pt::compute_normalization(seq, pt::ScaleStatistic::kFirstConfidentFrame).scale == 0.5);
}

TEST_CASE("offset anchors on the first frame with confident shoulders", "[normalize]") {
  auto seq = with_shoulders(2, {0, 0}, {2, 0});
  seq.conf(0, 0, kLeftShoulder) = 0.0f;
  seq.point(1, 0, kLeftShoulder)[1] = 2.0f;
  seq.point(1, 0, kRightShoulder)[1] = 2.0f;
  const auto params = pt::compute_normalization(seq);
  CHECK(params.offset[1] == -1.0);
}

TEST_CASE("apply_normalization is an affine map on every coordinate", "[normalize]") {
  auto seq = pt::synthetic::rest_sequence(1);
  seq.point(0, 0, 0)[0] = 1.0f;
  seq.point(0, 0, 0)[1] = 1.0f;
  const auto out = pt::apply_normalization(seq, {2.0, {0.0, 0.0}});
  CHECK(out.point(0, 0, 0)[0] == 2.0f);
  CHECK(out.point(0, 0, 0)[1] == 2.0f);
  CHECK(pt::testing::bitwise_equal(out.confidence, seq.confidence));

  CHECK(pt::testing::bitwise_equal(pt::apply_normalization(seq, pt::NormalizationParams::Identity(2)), seq));
  CHECK_THROWS_AS(pt::apply_normalization(seq, {0.0, {0.0, 0.0}}), pt::Error);
  CHECK_THROWS_AS(pt::apply_normalization(seq, {1.0, {0.0}}), pt::Error);
}

TEST_CASE("normalized output has unit mean shoulder width", "[normalize]") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    auto seq = pt::testing::random_signing(rng, 12);
    seq = pt::apply_normalization(seq, {3.7 + i, {120.0, -40.0}});
    const auto out = pt::normalize(seq).sequence;
    CHECK_THAT(*pt::mean_shoulder_width(out), WithinAbs(1.0, 1e-6));
  }
}

TEST_CASE("invert_normalization", "[normalize]") {
  const auto inv = pt::invert_normalization({0.5, {1.0, 0.0}});
  CHECK(inv.scale == 2.0);
  CHECK(inv.offset == std::vector<double>{-2.0, 0.0});
  CHECK(pt::invert_normalization(pt::NormalizationParams::Identity(3)) == pt::NormalizationParams::Identity(3));
}

TEST_CASE("apply then invert round-trips within 1e-6", "[normalize][property]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> scale(0.25, 4.0);
  std::uniform_real_distribution<double> offset(-2.0, 2.0);
  for (int i = 0; i < 200; ++i) {
    const auto seq = pt::testing::random_signing(rng, 6, 0.08, 0.05, i % 2 ? 3 : 2);
    pt::NormalizationParams params{scale(rng), {}};
    for (std::size_t d = 0; d < seq.dims(); ++d) params.offset.push_back(offset(rng));
    const auto back = pt::apply_normalization(pt::apply_normalization(seq, params), pt::invert_normalization(params));
    REQUIRE(pt::testing::max_abs_diff(back.data, seq.data) <= 1e-6);
  }
}

TEST_CASE("normalization preserves distance ratios", "[normalize][property]") {
  std::mt19937_64 rng(23);
  const auto seq = pt::apply_normalization(pt::testing::random_signing(rng, 4), {5.0, {10.0, 3.0}});
  const auto out = pt::normalize(seq).sequence;
  const double ref_in = pt::distance(seq.point(0, 0, 0), seq.point(0, 0, 40));
  const double ref_out = pt::distance(out.point(0, 0, 0), out.point(0, 0, 40));
  for (std::size_t k = 1; k < seq.keypoints(); k += 7) {
    const double in = pt::distance(seq.point(3, 0, k), seq.point(1, 0, k / 2)) / ref_in;
    const double o = pt::distance(out.point(3, 0, k), out.point(1, 0, k / 2)) / ref_out;
    CHECK_THAT(o, WithinAbs(in, 1e-5));
  }
}

TEST_CASE("normalization is invariant to uniform pre-scaling", "[normalize][property]") {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 20; ++i) {
    const auto seq = pt::testing::random_signing(rng, 8);
    const auto scaled = pt::apply_normalization(seq, {0.3 + 0.4 * i, {0.0, 0.0}});
    CHECK(pt::testing::max_abs_diff(pt::normalize(scaled).sequence.data, pt::normalize(seq).sequence.data) <= 1e-6);
  }
}

TEST_CASE("require_normalized enforces the 0.1 tolerance", "[normalize]") {
  const auto seq = pt::synthetic::rest_sequence(2);
  CHECK_NOTHROW(pt::require_normalized(seq, "seq"));
  CHECK_NOTHROW(pt::require_normalized(pt::apply_normalization(seq, {1.09, {0.0, 0.0}}), "seq"));
  CHECK_THROWS_WITH(pt::require_normalized(pt::apply_normalization(seq, {1.2, {0.0, 0.0}}), "seq"),
                    Catch::Matchers::ContainsSubstring("deviates from 1 by 0.2"));
}
