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

// Binary pose container.
//
// Layout, all little-endian:
//   "POSE" | version u16 (=1) | fps f32 | component count u16 |
//   per component: name (u16 length + UTF-8), point count u16, dims u16,
//                  point names (u16 length + UTF-8 each) |
//   frames u32 | persons u16 |
//   coordinates f32[frames][persons][points][dims] |
//   confidence f32[frames][persons][points]

#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pose_transfer/error.hpp"
#include "pose_transfer/pose.hpp"

namespace pose_transfer {

inline constexpr std::string_view kPoseMagic = "POSE";
inline constexpr std::uint16_t kPoseFormatVersion = 1;

// Foreign landmark or component name -> canonical name.
using RemapTable = std::map<std::string, std::string, std::less<>>;

// Parses `name=canonical` lines. Blank lines and `#` comments are skipped.
inline RemapTable parse_remap_table(std::string_view text) {
  auto trim = [](std::string_view s) {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return std::string_view{};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
  };
  RemapTable table;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    auto from = trim(line.substr(0, eq == std::string_view::npos ? 0 : eq));
    auto to = eq == std::string_view::npos ? std::string_view{} : trim(line.substr(eq + 1));
    if (from.empty() || to.empty())
      throw Error("remap table line " + std::to_string(line_no) + ": expected name=canonical");
    table.insert_or_assign(std::string(from), std::string(to));
  }
  return table;
}

inline void apply_remap(PoseHeader& header, const RemapTable& table) {
  auto map = [&](std::string& name) {
    if (auto it = table.find(name); it != table.end()) name = it->second;
  };
  for (auto& c : header.components) {
    map(c.name);
    for (auto& p : c.point_names) map(p);
  }
}

// Copy of `seq` with the coordinates of zero-confidence keypoints set to 0.
inline PoseSequence canonicalize(const PoseSequence& seq) {
  PoseSequence out = seq;
  const std::size_t dims = seq.dims();
  for (std::size_t i = 0; i < out.confidence.size(); ++i)
    if (out.confidence[i] == 0.0f)
      for (std::size_t d = 0; d < dims; ++d) out.data[i * dims + d] = 0.0f;
  return out;
}

namespace detail {

inline std::optional<std::size_t> CheckedProduct(std::initializer_list<std::size_t> factors) {
  std::size_t out = 1;
  for (std::size_t f : factors) {
    if (f != 0 && out > std::numeric_limits<std::size_t>::max() / f) return std::nullopt;
    out *= f;
  }
  return out;
}

class ByteWriter {
 public:
  void U16(std::uint64_t v, std::string_view what) {
    if (v > std::numeric_limits<std::uint16_t>::max())
      throw Error(std::string(what) + " does not fit the format (" + std::to_string(v) + ")");
    Put(v, 2);
  }
  void U32(std::uint64_t v, std::string_view what) {
    if (v > std::numeric_limits<std::uint32_t>::max())
      throw Error(std::string(what) + " does not fit the format (" + std::to_string(v) + ")");
    Put(v, 4);
  }
  void F32(float v) { Put(std::bit_cast<std::uint32_t>(v), 4); }
  void Str(std::string_view s) {
    U16(s.size(), "name length");
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }
  void Raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }
  void Reserve(std::size_t n) { bytes_.reserve(n); }

  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  void Put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }

  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t position() const { return pos_; }

  void Need(std::size_t n, std::string_view what) const {
    if (remaining() < n) {
      const std::size_t missing = n - remaining();
      throw FormatError(FormatError::Kind::kTruncated,
                        "truncated pose file: reading " + std::string(what) + " at byte " +
                            std::to_string(pos_) + " needs " + std::to_string(n) +
                            " bytes, " + std::to_string(remaining()) + " available (" +
                            std::to_string(missing) + " missing)",
                        missing);
    }
  }

  std::uint64_t Uint(int width, std::string_view what) {
    Need(static_cast<std::size_t>(width), what);
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    pos_ += static_cast<std::size_t>(width);
    return v;
  }
  std::uint16_t U16(std::string_view what) { return static_cast<std::uint16_t>(Uint(2, what)); }
  std::uint32_t U32(std::string_view what) { return static_cast<std::uint32_t>(Uint(4, what)); }
  float F32(std::string_view what) { return std::bit_cast<float>(U32(what)); }

  std::string Str(std::string_view what) {
    const std::size_t n = U16(what);
    Need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  // Bulk float read; caller has checked the length.
  void Floats(std::vector<float>& out, std::size_t count) {
    out.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t v = 0;
      for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(bytes_[pos_ + b]) << (8 * b);
      out[i] = std::bit_cast<float>(v);
      pos_ += 4;
    }
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Canonical serialization. Zero-confidence coordinates are written as 0.0.
inline std::vector<std::uint8_t> write_pose(const PoseSequence& seq) {
  ensure_valid(seq);
  detail::ByteWriter w;
  w.Reserve(64 + (seq.data.size() + seq.confidence.size()) * 4);
  w.Raw(kPoseMagic);
  w.U16(kPoseFormatVersion, "version");
  w.F32(seq.header.fps);
  w.U16(seq.header.components.size(), "component count");
  for (const auto& c : seq.header.components) {
    w.Str(c.name);
    w.U16(c.point_names.size(), "point count of " + c.name);
    w.U16(static_cast<std::uint64_t>(c.dims), "dims");
    for (const auto& p : c.point_names) w.Str(p);
  }
  w.U32(seq.frames, "frame count");
  w.U16(seq.persons, "person count");
  const std::size_t dims = seq.dims();
  for (std::size_t i = 0; i < seq.data.size(); ++i)
    w.F32(seq.confidence[i / dims] == 0.0f ? 0.0f : seq.data[i]);
  for (float c : seq.confidence) w.F32(c);
  return w.Take();
}

// Parses and validates one pose file. Never reads past the buffer; every
// malformed input surfaces as FormatError or ValidationError.
inline PoseSequence read_pose(std::span<const std::uint8_t> bytes,
                              const RemapTable* remap = nullptr) {
  if (bytes.size() < kPoseMagic.size() ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()), kPoseMagic.size()) !=
          kPoseMagic)
    throw FormatError(FormatError::Kind::kNotPoseFile, "not a pose file (bad magic bytes)");

  detail::ByteReader r(bytes.subspan(kPoseMagic.size()));
  PoseSequence seq;
  seq.header.version = r.U16("version");
  if (seq.header.version != kPoseFormatVersion)
    throw FormatError(FormatError::Kind::kUnsupportedVersion,
                      "unsupported pose format version " + std::to_string(seq.header.version) +
                          " (supported: " + std::to_string(kPoseFormatVersion) + ")");
  seq.header.fps = r.F32("fps");
  const std::size_t component_count = r.U16("component count");
  for (std::size_t i = 0; i < component_count; ++i) {
    ComponentDescriptor c;
    c.name = r.Str("component name");
    const std::size_t points = r.U16("point count");
    c.dims = r.U16("dims");
    if (c.dims != 2 && c.dims != 3)
      throw FormatError(FormatError::Kind::kMalformed,
                        "component " + c.name + " declares unsupported dims " +
                            std::to_string(c.dims));
    if (!seq.header.components.empty() && c.dims != seq.header.components.front().dims)
      throw FormatError(FormatError::Kind::kMalformed,
                        "component " + c.name + " dims disagree with the first component");
    c.point_names.reserve(points);
    for (std::size_t p = 0; p < points; ++p) c.point_names.push_back(r.Str("point name"));
    seq.header.components.push_back(std::move(c));
  }
  seq.frames = r.U32("frame count");
  seq.persons = r.U16("person count");

  const std::size_t header_bytes = kPoseMagic.size() + r.position();
  const auto slots = detail::CheckedProduct({seq.frames, seq.persons, seq.keypoints()});
  const auto payload = slots ? detail::CheckedProduct({*slots, seq.dims() + 1, 4}) : std::nullopt;
  if (!payload || *payload > std::numeric_limits<std::size_t>::max() - header_bytes)
    throw FormatError(FormatError::Kind::kTruncated,
                      "truncated pose file: declared payload exceeds any addressable size");
  if (r.remaining() < *payload) {
    const std::size_t actual = bytes.size();
    const std::size_t expected = header_bytes + *payload;
    throw FormatError(FormatError::Kind::kTruncated,
                      "truncated pose file: expected " + std::to_string(expected) +
                          " bytes, got " + std::to_string(actual) + " (" +
                          std::to_string(expected - actual) + " missing)",
                      expected - actual);
  }
  if (r.remaining() > *payload)
    throw FormatError(FormatError::Kind::kTrailingBytes,
                      std::to_string(r.remaining() - *payload) + " trailing bytes after payload");
  r.Floats(seq.data, *slots * seq.dims());
  r.Floats(seq.confidence, *slots);

  if (remap) apply_remap(seq.header, *remap);
  ensure_valid(seq);
  return seq;
}

}  // namespace pose_transfer
