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
using Catch::Matchers::WithinAbs;

namespace {

// Unweighted-by-hand reference: mean displacement over keypoints confident
// in both frames, weighting each by the smaller confidence.
std::vector<double> reference_flow(const pt::PoseSequence& seq) {
  std::vector<double> out;
  for (std::size_t t = 1; t < seq.frames; ++t) {
    long double num = 0, den = 0;
    for (std::size_t k = 0; k < seq.keypoints(); ++k) {
      const long double w = std::min(seq.conf(t - 1, 0, k), seq.conf(t, 0, k));
      if (w == 0) continue;
      const long double dx = seq.point(t, 0, k)[0] - seq.point(t - 1, 0, k)[0];
      const long double dy = seq.point(t, 0, k)[1] - seq.point(t - 1, 0, k)[1];
      num += w * std::sqrt(dx * dx + dy * dy);
      den += w;
    }
    out.push_back(den == 0 ? 0.0 : double(num / den));
  }
  return out;
}

}  // namespace

TEST_CASE("flow of a still sequence is zero", "[metrics]") {
  const auto series = pt::flow_series(syn::rest_sequence(5));
  CHECK(series.values == std::vector<double>(4, 0.0));
  CHECK(series.empty_transitions.empty());
}

TEST_CASE("flow of a uniformly moving sequence", "[metrics]") {
  auto seq = syn::rest_sequence(4);
  for (std::size_t t = 0; t < 4; ++t)
    for (std::size_t k = 0; k < seq.keypoints(); ++k) seq.point(t, 0, k)[0] += static_cast<float>(t);
  const auto series = pt::flow_series(seq);
  REQUIRE(series.values.size() == 3);
  for (double v : series.values) CHECK_THAT(v, WithinAbs(1.0, 1e-6));
  CHECK_THAT(pt::flow_auc(series), WithinAbs(3.0, 1e-5));
}

TEST_CASE("flow matches a reference computation", "[metrics][property]") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<float> unit(0.0f, 1.0f);
  for (int trial = 0; trial < 50; ++trial) {
    auto seq = pt::testing::random_signing(rng, 8);
    for (auto& c : seq.confidence) c = unit(rng) < 0.2f ? 0.0f : unit(rng);
    const auto series = pt::flow_series(seq);
    const auto expect = reference_flow(seq);
    for (std::size_t i = 0; i < expect.size(); ++i) CHECK_THAT(series.values[i], WithinAbs(expect[i], 1e-9));
    long double auc = 0;
    for (double v : expect) auc += v;
    CHECK_THAT(pt::flow_auc(series), WithinAbs(double(auc), 1e-9));
  }
}

TEST_CASE("flow restricted to components", "[metrics]") {
  auto seq = syn::rest_sequence(2);
  const auto face = *pt::ComponentRange(seq.header, pt::kFace);
  for (std::size_t k = face.begin; k < face.end; ++k) seq.point(1, 0, k)[1] += 2.0f;
  CHECK_THAT(pt::flow_series(seq, {std::string(pt::kFace)}).values[0], WithinAbs(2.0, 1e-6));
  CHECK(pt::flow_series(seq, {std::string(pt::kBody)}).values[0] == 0.0);
  CHECK_THROWS_WITH(pt::flow_series(seq, {"TAIL"}), Catch::Matchers::ContainsSubstring("TAIL"));
}

TEST_CASE("flow transitions with no confident keypoints", "[metrics]") {
  auto seq = syn::rest_sequence(3);
  for (std::size_t k = 0; k < seq.keypoints(); ++k) seq.conf(1, 0, k) = 0.0f;
  const auto series = pt::flow_series(seq);
  CHECK(series.values == std::vector<double>{0.0, 0.0});
  CHECK(series.empty_transitions == std::vector<std::size_t>{0, 1});
}

TEST_CASE("flow needs two frames", "[metrics]") {
  CHECK_THROWS_AS(pt::flow_series(syn::rest_sequence(1)), pt::Error);
}

TEST_CASE("flow scales with the sequence and ignores translation", "[metrics][property]") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto seq = pt::testing::random_signing(rng, 6);
    const auto base = pt::flow_series(seq).values;
    // Power-of-two scaling is exact in binary floating point.
    const auto scaled = pt::flow_series(pt::apply_normalization(seq, {4.0, {0.0, 0.0}})).values;
    const auto moved = pt::flow_series(pt::apply_normalization(seq, {1.0, {0.375, -0.25}})).values;
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(scaled[i] == 4.0 * base[i]);
      CHECK_THAT(moved[i], WithinAbs(base[i], 1e-6));
    }
  }
}

TEST_CASE("stitch zone report", "[metrics]") {
  pt::FlowSeries a{{1, 5, 5, 1, 2}, {}, {}};
  pt::FlowSeries b{{1, 9, 7, 1, 2.5}, {}, {}};
  const auto report = pt::stitch_zone_report(a, b, {{1, 3}});
  REQUIRE(report.zones.size() == 1);
  CHECK(report.zones[0].peak_a == 5);
  CHECK(report.zones[0].peak_b == 9);
  CHECK(report.zones[0].auc_a == 10);
  CHECK(report.zones[0].auc_b == 16);
  CHECK(report.outside_max_abs_diff == 0.5);
  CHECK_THROWS_AS(pt::stitch_zone_report(a, b, {{4, 6}}), pt::Error);
  CHECK_THROWS_AS(pt::stitch_zone_report(a, {{1}, {}, {}}, {}), pt::Error);
}

TEST_CASE("flow CSV", "[metrics]") {
  pt::FlowSeries s{{0.5, 0.1, 2}, {}, {}};
  CHECK(pt::flow_csv(s) == "frame,flow\n1,0.5\n2,0.1\n3,2\n");
}
