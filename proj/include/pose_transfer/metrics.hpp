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

// Pose-level optical flow: how much the skeleton moves between consecutive
// frames, in normalized units per frame.

#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pose_transfer/error.hpp"
#include "pose_transfer/normalize.hpp"
#include "pose_transfer/pose.hpp"

namespace pose_transfer {

struct FlowSeries {
  // values[i] is the movement from frame i to frame i + 1.
  std::vector<double> values;
  std::vector<std::string> component_mask;
  // Transitions where no keypoint was confident in both frames (value 0).
  std::vector<std::size_t> empty_transitions;
};

// Confidence-weighted mean Euclidean keypoint displacement of person 0 per
// transition. A keypoint counts with weight min(conf[t-1], conf[t]). An
// empty `components` list means every component.
inline FlowSeries flow_series(const PoseSequence& seq, std::vector<std::string> components = {}) {
  if (seq.frames < 2) throw Error("flow needs at least 2 frames, got " + std::to_string(seq.frames));
  if (components.empty())
    for (const auto& c : seq.header.components) components.push_back(c.name);
  std::vector<KeypointRange> ranges;
  for (const auto& name : components) {
    auto r = ComponentRange(seq.header, name);
    if (!r) throw Error("unknown component '" + name + "'");
    ranges.push_back(*r);
  }

  FlowSeries series;
  series.component_mask = std::move(components);
  series.values.reserve(seq.frames - 1);
  for (std::size_t t = 1; t < seq.frames; ++t) {
    double sum = 0.0;
    double weight = 0.0;
    for (const auto& r : ranges)
      for (std::size_t k = r.begin; k < r.end; ++k) {
        const double w = std::min(seq.conf(t - 1, 0, k), seq.conf(t, 0, k));
        if (w <= 0.0) continue;
        sum += w * distance(seq.point(t - 1, 0, k), seq.point(t, 0, k));
        weight += w;
      }
    if (weight > 0.0) {
      series.values.push_back(sum / weight);
    } else {
      series.values.push_back(0.0);
      series.empty_transitions.push_back(t - 1);
    }
  }
  return series;
}

// Area under the flow curve with unit frame spacing.
inline double flow_auc(const FlowSeries& series) {
  double total = 0.0;
  for (double v : series.values) total += v;
  return total;
}

// Half-open range [begin, end) of flow-series indices.
struct FrameRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }
  bool operator==(const FrameRange&) const = default;
};

struct ZoneStats {
  FrameRange zone;
  double peak_a = 0.0;
  double peak_b = 0.0;
  double auc_a = 0.0;
  double auc_b = 0.0;
};

struct StitchZoneReport {
  std::vector<ZoneStats> zones;
  // Largest |a[i] - b[i]| over indices outside every zone.
  double outside_max_abs_diff = 0.0;
};

inline StitchZoneReport stitch_zone_report(const FlowSeries& a, const FlowSeries& b,
                                           const std::vector<FrameRange>& zones) {
  if (a.values.size() != b.values.size())
    throw Error("flow series lengths differ: " + std::to_string(a.values.size()) + " vs " +
                std::to_string(b.values.size()));
  const std::size_t n = a.values.size();
  std::vector<bool> in_zone(n, false);
  StitchZoneReport report;
  for (const auto& zone : zones) {
    if (zone.begin > zone.end || zone.end > n)
      throw Error("zone [" + std::to_string(zone.begin) + ", " + std::to_string(zone.end) +
                  ") outside flow series of length " + std::to_string(n));
    ZoneStats stats{zone};
    for (std::size_t i = zone.begin; i < zone.end; ++i) {
      in_zone[i] = true;
      stats.peak_a = std::max(stats.peak_a, a.values[i]);
      stats.peak_b = std::max(stats.peak_b, b.values[i]);
      stats.auc_a += a.values[i];
      stats.auc_b += b.values[i];
    }
    report.zones.push_back(stats);
  }
  for (std::size_t i = 0; i < n; ++i)
    if (!in_zone[i])
      report.outside_max_abs_diff =
          std::max(report.outside_max_abs_diff, std::abs(a.values[i] - b.values[i]));
  return report;
}

// Shortest round-trip decimal form.
inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

// CSV with header `frame,flow`; `frame` is the index of the later frame.
inline std::string flow_csv(const FlowSeries& series) {
  std::string out = "frame,flow\n";
  for (std::size_t i = 0; i < series.values.size(); ++i)
    out += std::to_string(i + 1) + "," + format_number(series.values[i]) + "\n";
  return out;
}

}  // namespace pose_transfer
