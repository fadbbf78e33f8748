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

#include "json.hpp"
#include "test_support.hpp"

namespace pt = pose_transfer;
using pt::FormatError;

namespace {

pt::PoseSequence two_frame_fixture() {
  std::mt19937_64 rng(11);
  return pt::testing::random_signing(rng, 2);
}

pt::PoseSequence one_point(float x, float y, float conf) {
  pt::PoseHeader header;
  header.fps = 30.0f;
  header.components.push_back({"A", {"p"}, 2});
  auto seq = pt::PoseSequence::Zeros(header, 1);
  seq.point(0, 0, 0)[0] = x;
  seq.point(0, 0, 0)[1] = y;
  seq.conf(0, 0, 0) = conf;
  return seq;
}

FormatError::Kind read_error_kind(const std::vector<std::uint8_t>& bytes) {
  try {
    pt::read_pose(bytes);
  } catch (const FormatError& e) {
    return e.kind();
  }
  FAIL("expected a format error");
  return FormatError::Kind::kMalformed;
}

}  // namespace

TEST_CASE("write_pose produces the documented byte layout", "[io]") {
  const auto bytes = pt::write_pose(one_point(1.0f, -2.0f, 0.5f));
  const std::vector<std::uint8_t> expected = {
      'P', 'O', 'S', 'E',                  // magic
      0x01, 0x00,                          // version
      0x00, 0x00, 0xf0, 0x41,              // fps 30.0f
      0x01, 0x00,                          // one component
      0x01, 0x00, 'A',                     // name
      0x01, 0x00,                          // one point
      0x02, 0x00,                          // dims
      0x01, 0x00, 'p',                     // point name
      0x01, 0x00, 0x00, 0x00,              // frames
      0x01, 0x00,                          // persons
      0x00, 0x00, 0x80, 0x3f,              // x = 1.0f
      0x00, 0x00, 0x00, 0xc0,              // y = -2.0f
      0x00, 0x00, 0x00, 0x3f,              // confidence 0.5f
  };
  CHECK(bytes == expected);
}

TEST_CASE("read_pose parses a canonical fixture", "[io]") {
  const auto fixture = two_frame_fixture();
  const auto seq = pt::read_pose(pt::write_pose(fixture));
  CHECK(seq.frames == 2);
  CHECK(pt::testing::bitwise_equal(seq, fixture));
}

TEST_CASE("read_pose rejects bad magic", "[io]") {
  auto bytes = pt::write_pose(two_frame_fixture());
  std::copy_n("XXXX", 4, bytes.begin());
  CHECK(read_error_kind(bytes) == FormatError::Kind::kNotPoseFile);
  CHECK(read_error_kind({}) == FormatError::Kind::kNotPoseFile);
}

TEST_CASE("read_pose rejects other versions", "[io]") {
  auto bytes = pt::write_pose(two_frame_fixture());
  bytes[4] = 2;
  try {
    pt::read_pose(bytes);
    FAIL("expected an error");
  } catch (const FormatError& e) {
    CHECK(e.kind() == FormatError::Kind::kUnsupportedVersion);
    CHECK(std::string(e.what()).find("version 2") != std::string::npos);
  }
}

TEST_CASE("read_pose reports how many bytes a truncated payload lacks", "[io]") {
  auto bytes = pt::write_pose(two_frame_fixture());
  const std::size_t full = bytes.size();
  bytes.resize(full - 4);
  try {
    pt::read_pose(bytes);
    FAIL("expected an error");
  } catch (const FormatError& e) {
    CHECK(e.kind() == FormatError::Kind::kTruncated);
    CHECK(e.missing_bytes() == 4);
    const std::string msg = e.what();
    CHECK(msg.find("expected " + std::to_string(full)) != std::string::npos);
    CHECK(msg.find("got " + std::to_string(full - 4)) != std::string::npos);
    CHECK(msg.find("4 missing") != std::string::npos);
  }
}

TEST_CASE("read_pose reports truncation inside the header", "[io]") {
  auto bytes = pt::write_pose(two_frame_fixture());
  bytes.resize(20);
  CHECK(read_error_kind(bytes) == FormatError::Kind::kTruncated);
}

TEST_CASE("read_pose rejects trailing bytes", "[io]") {
  auto bytes = pt::write_pose(two_frame_fixture());
  bytes.push_back(0);
  CHECK(read_error_kind(bytes) == FormatError::Kind::kTrailingBytes);
}

TEST_CASE("read_pose rejects NaN coordinates with nonzero confidence", "[io]") {
  auto bytes = pt::write_pose(one_point(1.0f, 2.0f, 1.0f));
  // x is the first payload float, 12 bytes from the end.
  const std::uint32_t nan_bits = 0x7fc00000u;
  for (int b = 0; b < 4; ++b) bytes[bytes.size() - 12 + b] = static_cast<std::uint8_t>(nan_bits >> (8 * b));
  CHECK_THROWS_AS(pt::read_pose(bytes), pt::ValidationError);
}

TEST_CASE("write_pose canonicalizes zero-confidence coordinates", "[io]") {
  const auto seq = one_point(std::nanf(""), 7.0f, 0.0f);
  const auto back = pt::read_pose(pt::write_pose(seq));
  CHECK(back.point(0, 0, 0)[0] == 0.0f);
  CHECK(back.point(0, 0, 0)[1] == 0.0f);
  CHECK(pt::testing::bitwise_equal(back, pt::canonicalize(seq)));
}

TEST_CASE("write_pose rejects invalid sequences", "[io]") {
  auto seq = two_frame_fixture();
  seq.frames = 0;
  seq.data.clear();
  seq.confidence.clear();
  CHECK_THROWS_AS(pt::write_pose(seq), pt::ValidationError);
}

TEST_CASE("round trip is exact and rewriting is byte-identical", "[io][property]") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const auto seq = pt::testing::random_small(rng);
    const auto bytes = pt::write_pose(seq);
    const auto back = pt::read_pose(bytes);
    REQUIRE(pt::testing::bitwise_equal(back, pt::canonicalize(seq)));
    REQUIRE(pt::write_pose(back) == bytes);
  }
}

TEST_CASE("mutated files fail with library errors only", "[io][fuzz]") {
  std::mt19937_64 rng(99);
  const auto base = pt::write_pose(two_frame_fixture());
  std::uniform_int_distribution<std::size_t> pos(0, base.size() - 1);
  std::uniform_int_distribution<int> byte(0, 255);
  int rejected = 0;
  for (int i = 0; i < 2000; ++i) {
    auto bytes = base;
    const int edits = 1 + i % 4;
    for (int e = 0; e < edits; ++e) bytes[pos(rng)] = static_cast<std::uint8_t>(byte(rng));
    if (i % 5 == 0) bytes.resize(pos(rng));
    try {
      const auto seq = pt::read_pose(bytes);
      REQUIRE(pt::validate(seq).empty());
    } catch (const pt::Error&) {
      ++rejected;
    }
  }
  CHECK(rejected > 0);
}

TEST_CASE("remap tables rename landmarks at read time", "[io]") {
  const auto table = pt::parse_remap_table(
      "# foreign names\n"
      "POSE_LANDMARKS = BODY\n"
      "\n"
      "L_SHOULDER=LEFT_SHOULDER  # trailing comment\n");
  REQUIRE(table.size() == 2);
  CHECK(table.at("POSE_LANDMARKS") == "BODY");

  auto seq = pt::synthetic::rest_sequence(1);
  seq.header.components[0].name = "POSE_LANDMARKS";
  seq.header.components[0].point_names[11] = "L_SHOULDER";
  const auto back = pt::read_pose(pt::write_pose(seq), &table);
  CHECK(back.header == pt::synthetic::holistic_header());

  CHECK_THROWS_AS(pt::parse_remap_table("BODY\n"), pt::Error);
  CHECK_THROWS_AS(pt::parse_remap_table("=BODY\n"), pt::Error);
}

TEST_CASE("JSON export holds the coordinates and imports back", "[io][json]") {
  const auto seq = one_point(0.25f, -1.5f, 1.0f);
  const auto doc = nlohmann::json::parse(pt::export_json(seq));
  CHECK(doc["data"][0][0][0] == nlohmann::json::array({0.25, -1.5}));
  CHECK(doc["components"][0]["name"] == "A");

  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const auto original = pt::testing::random_small(rng);
    CHECK(pt::testing::bitwise_equal(pt::import_json(pt::export_json(original)), pt::canonicalize(original)));
  }
}

TEST_CASE("JSON export rejects a sequence without components", "[io][json]") {
  pt::PoseSequence seq;
  seq.frames = 1;
  CHECK_THROWS_AS(pt::export_json(seq), pt::ValidationError);
  CHECK_THROWS_AS(pt::import_json("{\"version\": 1}"), pt::Error);
}
