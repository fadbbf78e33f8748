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

// Streaming mean appearance frame over a corpus of pose files.
//
// Every file is normalized on its own, then folded into a MeanAccumulator:
// a confidence-weighted sum per keypoint kept in double precision with
// Neumaier compensation. Accumulators merge by componentwise addition, so
// shards can be reduced in any tree shape.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "pose_transfer/appearance.hpp"
#include "pose_transfer/error.hpp"
#include "pose_transfer/normalize.hpp"
#include "pose_transfer/pose.hpp"

namespace pose_transfer {

// Compensated running sum.
class NeumaierSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      compensation_ += (sum_ - t) + x;
    else
      compensation_ += (x - t) + sum_;
    sum_ = t;
  }
  void Merge(const NeumaierSum& other) {
    Add(other.sum_);
    Add(other.compensation_);
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

class MeanAccumulator {
 public:
  MeanAccumulator() = default;
  explicit MeanAccumulator(PoseHeader layout) { Reset(std::move(layout)); }

  bool empty() const { return !has_layout_; }
  const PoseHeader& layout() const { return layout_; }
  std::uint64_t frames_seen() const { return frames_seen_; }
  double weight(std::size_t keypoint) const { return weight_[keypoint].value(); }
  double weighted_sum(std::size_t keypoint, std::size_t dim) const {
    return weighted_sum_[keypoint * dims_ + dim].value();
  }

  // Folds in person 0 of a normalized sequence.
  void Add(const PoseSequence& seq) {
    ensure_valid(seq);
    require_normalized(seq, "corpus sequence");
    if (!has_layout_)
      Reset(seq.header);
    else
      require_compatible(layout_, seq.header);
    const std::size_t kp = seq.keypoints();
    for (std::size_t t = 0; t < seq.frames; ++t)
      for (std::size_t k = 0; k < kp; ++k) {
        const double c = seq.conf(t, 0, k);
        if (c <= 0.0) continue;
        const auto pt = seq.point(t, 0, k);
        for (std::size_t d = 0; d < dims_; ++d) weighted_sum_[k * dims_ + d].Add(c * pt[d]);
        weight_[k].Add(c);
      }
    frames_seen_ += seq.frames;
  }

  void Merge(const MeanAccumulator& other) {
    if (other.empty()) return;
    if (empty()) {
      *this = other;
      return;
    }
    require_compatible(layout_, other.layout_);
    for (std::size_t i = 0; i < weighted_sum_.size(); ++i) weighted_sum_[i].Merge(other.weighted_sum_[i]);
    for (std::size_t i = 0; i < weight_.size(); ++i) weight_[i].Merge(other.weight_[i]);
    frames_seen_ += other.frames_seen_;
  }

  // Per-keypoint mean, confidence 1 where any weight was seen and 0
  // elsewhere, re-normalized to unit shoulder width with the mid-shoulder
  // point at the origin.
  AppearanceFrame Finalize() const {
    if (empty()) throw Error("cannot finalize an empty accumulator");
    const std::size_t kp = layout_.total_points();
    std::vector<double> mean(kp * dims_, 0.0);
    std::vector<float> conf(kp, 0.0f);
    bool any = false;
    for (std::size_t k = 0; k < kp; ++k) {
      const double w = weight_[k].value();
      if (w <= 0.0) continue;
      any = true;
      conf[k] = 1.0f;
      for (std::size_t d = 0; d < dims_; ++d) mean[k * dims_ + d] = weighted_sum_[k * dims_ + d].value() / w;
    }
    if (!any) throw Error("cannot finalize: every keypoint has zero weight");

    const auto sh = shoulder_indices(layout_);
    if (conf[sh.left] == 0.0f || conf[sh.right] == 0.0f)
      throw Error("cannot finalize: shoulders never observed");
    double width_sq = 0.0;
    std::vector<double> mid(dims_);
    for (std::size_t d = 0; d < dims_; ++d) {
      const double l = mean[sh.left * dims_ + d];
      const double r = mean[sh.right * dims_ + d];
      width_sq += (l - r) * (l - r);
      mid[d] = 0.5 * (l + r);
    }
    const double width = std::sqrt(width_sq);
    if (!(width >= kDegenerateShoulderWidth)) throw Error("cannot finalize: degenerate mean shoulders");

    AppearanceFrame frame;
    frame.header = layout_;
    frame.normalized = true;
    frame.confidence = std::move(conf);
    frame.points.assign(kp * dims_, 0.0f);
    for (std::size_t k = 0; k < kp; ++k) {
      if (frame.confidence[k] == 0.0f) continue;
      for (std::size_t d = 0; d < dims_; ++d)
        frame.points[k * dims_ + d] = static_cast<float>((mean[k * dims_ + d] - mid[d]) / width);
    }
    return frame;
  }

 private:
  void Reset(PoseHeader layout) {
    layout_ = std::move(layout);
    has_layout_ = true;
    dims_ = static_cast<std::size_t>(layout_.dims());
    weighted_sum_.assign(layout_.total_points() * dims_, {});
    weight_.assign(layout_.total_points(), {});
    frames_seen_ = 0;
  }

  PoseHeader layout_;
  bool has_layout_ = false;
  std::size_t dims_ = 0;
  std::vector<NeumaierSum> weighted_sum_;
  std::vector<NeumaierSum> weight_;
  std::uint64_t frames_seen_ = 0;
};

inline MeanAccumulator accumulate(MeanAccumulator acc, const PoseSequence& seq) {
  acc.Add(seq);
  return acc;
}

inline MeanAccumulator merge(const MeanAccumulator& a, const MeanAccumulator& b) {
  MeanAccumulator out = a;
  out.Merge(b);
  return out;
}

inline AppearanceFrame finalize(const MeanAccumulator& acc) { return acc.Finalize(); }

// Manifest: one pose-file path per line, `#` starts a comment. Relative
// paths resolve against `base_dir`.
inline std::vector<std::filesystem::path> parse_manifest(std::string_view text,
                                                         const std::filesystem::path& base_dir = {}) {
  std::vector<std::filesystem::path> paths;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) continue;
    line = line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
    std::filesystem::path p{std::string(line)};
    paths.push_back(p.is_relative() && !base_dir.empty() ? base_dir / p : p);
  }
  return paths;
}

// Loads item i of the corpus as a normalized sequence.
using CorpusLoader = std::function<PoseSequence(std::size_t)>;

// Accumulates `count` corpus items on `workers` threads. Items are claimed
// dynamically but merged strictly in index order, so the result does not
// depend on the worker count or scheduling.
inline MeanAccumulator accumulate_corpus(std::size_t count, const CorpusLoader& load,
                                         unsigned workers = 1) {
  workers = std::max(1u, workers);
  MeanAccumulator total;
  std::map<std::size_t, MeanAccumulator> pending;
  std::size_t next_merge = 0;
  std::atomic<std::size_t> next_item{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;

  auto work = [&] {
    while (!failed) {
      const std::size_t i = next_item++;
      if (i >= count) return;
      MeanAccumulator acc;
      try {
        acc.Add(load(i));
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
      std::lock_guard lock(mu);
      pending.emplace(i, std::move(acc));
      for (auto it = pending.find(next_merge); it != pending.end(); it = pending.find(next_merge)) {
        try {
          total.Merge(it->second);
        } catch (...) {
          if (!error) error = std::current_exception();
          failed = true;
          return;
        }
        pending.erase(it);
        ++next_merge;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
  return total;
}

}  // namespace pose_transfer
