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

// Desk-scale privacy/utility harness.
//
// A synthetic multi-signer corpus stands in for a real sign language
// dataset. Each sample is a class-specific hand trajectory and hand shape,
// performed by a signer with a fixed skeletal appearance (body and face
// offsets) and, optionally, a signer-specific tempo. Two nearest-centroid
// classifiers share one feature pipeline with different label heads:
//
//   SIGN    hand geometry and wrist motion relative to the first frame.
//           Appearance transfer leaves these features unchanged, so this
//           classifier is (unlike a neural model on raw poses) immune to
//           the transfer. Its accuracy is flat across the matrix by design.
//   SIGNER  first-frame body/face geometry around the mid-shoulder point,
//           plus the timing of the wrist motion. The first part is pure
//           appearance; the second is the residual identity signal that
//           appearance transfer cannot remove.
//
// The 4 x 3 matrix trains under ORIGINAL / ANONYMIZED / TRANSFERRED /
// COMBINED data and tests on ORIGINAL / ANONYMIZED / TRANSFERRED data, the
// last by majority vote over a fixed set of target appearances.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pose_transfer/appearance.hpp"
#include "pose_transfer/corpus.hpp"
#include "pose_transfer/error.hpp"
#include "pose_transfer/metrics.hpp"
#include "pose_transfer/normalize.hpp"
#include "pose_transfer/pose.hpp"
#include "pose_transfer/synthetic.hpp"

namespace pose_transfer::eval {

struct SyntheticCorpusSpec {
  std::size_t num_signers = 31;
  std::size_t num_sign_classes = 20;
  std::size_t samples_per_cell = 4;  // per (signer, class); about half go to test
  double signer_appearance_scale = 0.05;
  double motion_noise = 0.005;
  // Spread of the per-signer tempo exponent; 0 removes all motion identity.
  double tempo_jitter = 0.3;
  std::size_t frames = 24;
  std::uint64_t seed = 0;

  void Validate() const {
    if (num_signers < 2 || num_sign_classes < 2 || samples_per_cell < 2)
      throw Error("synthetic corpus counts must all be >= 2");
    if (frames < 3) throw Error("synthetic samples need at least 3 frames");
    if (!(signer_appearance_scale >= 0.0 && motion_noise >= 0.0 && tempo_jitter >= 0.0))
      throw Error("synthetic corpus scales must be >= 0");
  }
};

struct Sample {
  PoseSequence pose;  // normalized
  std::size_t sign = 0;
  std::size_t signer = 0;
};

struct Corpus {
  SyntheticCorpusSpec spec;
  std::vector<Sample> train;
  std::vector<Sample> test;
};

// SplitMix64 finalizer; mixes a master seed with stream identifiers.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                                 std::uint64_t c = 0) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(mix(seed) ^ a) ^ b) ^ c);
}

namespace detail {

enum Stream : std::uint64_t {
  kSignerStream = 1,
  kClassStream,
  kNoiseStream,
  kPoolStream,
  kTrainTransferStream,
  kCombinedStream,
};

using synthetic::Point2;

struct SignerModel {
  std::vector<Point2> body_offset;
  std::vector<Point2> face_offset;
  double tempo = 1.0;  // exponent of the time warp u = s^tempo
};

struct ClassModel {
  std::array<std::vector<Point2>, 2> path;  // wrist displacement polylines, left/right
  std::array<synthetic::HandShape, 2> shape;
  std::array<double, 2> orientation{};
};

inline SignerModel make_signer(const SyntheticCorpusSpec& spec, std::uint64_t id) {
  std::mt19937_64 rng(derive_seed(spec.seed, kSignerStream, id));
  std::normal_distribution<double> normal(0.0, 1.0);
  SignerModel s;
  for (std::size_t k = 0; k < synthetic::body_point_names().size(); ++k)
    s.body_offset.push_back({spec.signer_appearance_scale * normal(rng),
                             spec.signer_appearance_scale * normal(rng)});
  for (std::size_t k = 0; k < synthetic::kFacePoints; ++k)
    s.face_offset.push_back({spec.signer_appearance_scale * normal(rng),
                             spec.signer_appearance_scale * normal(rng)});
  s.tempo = std::exp(spec.tempo_jitter * normal(rng));
  return s;
}

inline ClassModel make_class(const SyntheticCorpusSpec& spec, std::uint64_t id) {
  std::mt19937_64 rng(derive_seed(spec.seed, kClassStream, id));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  ClassModel c;
  for (std::size_t h = 0; h < 2; ++h) {
    // The right hand dominates: larger excursions, mostly upwards.
    const double reach = h == 1 ? 0.9 : 0.35;
    c.path[h] = {{0.0, 0.0}};
    for (int i = 0; i < 3; ++i)
      c.path[h].push_back({reach * sym(rng), -reach * (0.4 + 0.6 * unit(rng))});
    for (auto& curl : c.shape[h]) curl = unit(rng);
    c.orientation[h] = 1.2 * sym(rng);
  }
  return c;
}

// Point at arc-length fraction u of a polyline.
inline Point2 along(const std::vector<Point2>& path, double u) {
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < path.size(); ++i)
    cumulative.push_back(cumulative.back() + std::hypot(path[i][0] - path[i - 1][0],
                                                        path[i][1] - path[i - 1][1]));
  const double target = std::clamp(u, 0.0, 1.0) * cumulative.back();
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (target <= cumulative[i] || i + 1 == path.size()) {
      const double seg = cumulative[i] - cumulative[i - 1];
      const double a = seg > 0.0 ? (target - cumulative[i - 1]) / seg : 0.0;
      return {path[i - 1][0] + a * (path[i][0] - path[i - 1][0]),
              path[i - 1][1] + a * (path[i][1] - path[i - 1][1])};
    }
  }
  return path.front();
}

// Renders one performance in estimator space; `cls == nullptr` holds the
// rest pose for every frame.
inline PoseSequence render(const SyntheticCorpusSpec& spec, const SignerModel& signer,
                           const ClassModel* cls, std::uint64_t noise_seed) {
  std::mt19937_64 rng(noise_seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  PoseSequence seq = PoseSequence::Zeros(synthetic::holistic_header(), spec.frames);
  auto body = synthetic::rest_body();
  auto face = synthetic::rest_face();
  for (std::size_t k = 0; k < body.size(); ++k)
    for (int d = 0; d < 2; ++d) body[k][d] += signer.body_offset[k][d];
  for (std::size_t k = 0; k < face.size(); ++k)
    for (int d = 0; d < 2; ++d) face[k][d] += signer.face_offset[k][d];

  const auto& h = seq.header;
  const std::size_t face_at = *h.ComponentOffset(kFace);
  const std::array<std::size_t, 2> hand_at = {*h.ComponentOffset(kLeftHand),
                                              *h.ComponentOffset(kRightHand)};
  // Body indices moved by each wrist: elbow (half), wrist, pinky, index, thumb.
  const std::array<std::size_t, 2> elbow = {13, 14};
  const std::array<std::array<std::size_t, 4>, 2> carried = {{{15, 17, 19, 21}, {16, 18, 20, 22}}};

  auto jitter = [&](Point2 p) -> Point2 {
    if (spec.motion_noise == 0.0) return p;
    return {p[0] + spec.motion_noise * noise(rng), p[1] + spec.motion_noise * noise(rng)};
  };

  for (std::size_t t = 0; t < spec.frames; ++t) {
    const double s = static_cast<double>(t) / static_cast<double>(spec.frames - 1);
    const double u = std::pow(s, signer.tempo);
    std::vector<Point2> frame_body = body;
    std::array<Point2, 2> wrist{};
    std::array<std::vector<Point2>, 2> hand;
    for (std::size_t side = 0; side < 2; ++side) {
      const Point2 disp = cls ? along(cls->path[side], u) : Point2{0.0, 0.0};
      frame_body[elbow[side]][0] += 0.5 * disp[0];
      frame_body[elbow[side]][1] += 0.5 * disp[1];
      for (std::size_t k : carried[side]) {
        frame_body[k][0] += disp[0];
        frame_body[k][1] += disp[1];
      }
      wrist[side] = frame_body[carried[side][0]];
      synthetic::HandShape curl = synthetic::kRelaxedHand;
      double orientation = 0.0;
      if (cls) {
        const double blend = std::min(1.0, 2.0 * u);
        for (std::size_t f = 0; f < 5; ++f)
          curl[f] += blend * (cls->shape[side][f] - curl[f]);
        orientation = blend * cls->orientation[side];
      }
      hand[side] = synthetic::hand_points(curl, orientation, side == 0);
    }
    for (std::size_t k = 0; k < frame_body.size(); ++k)
      synthetic::set_point(seq, t, k, jitter(frame_body[k]));
    for (std::size_t k = 0; k < face.size(); ++k)
      synthetic::set_point(seq, t, face_at + k, jitter(face[k]));
    for (std::size_t side = 0; side < 2; ++side)
      for (std::size_t k = 0; k < synthetic::kHandPoints; ++k)
        synthetic::set_point(seq, t, hand_at[side] + k,
                             jitter({wrist[side][0] + hand[side][k][0],
                                     wrist[side][1] + hand[side][k][1]}));
  }
  return seq;
}

}  // namespace detail

// Deterministic per seed. Signers and classes are fully crossed; the first
// ceil(n/2) repetitions of every (signer, class) cell are training data.
inline Corpus generate_corpus(const SyntheticCorpusSpec& spec) {
  spec.Validate();
  Corpus corpus;
  corpus.spec = spec;
  std::vector<detail::SignerModel> signers;
  std::vector<detail::ClassModel> classes;
  for (std::size_t s = 0; s < spec.num_signers; ++s) signers.push_back(detail::make_signer(spec, s));
  for (std::size_t c = 0; c < spec.num_sign_classes; ++c) classes.push_back(detail::make_class(spec, c));
  const std::size_t train_reps = spec.samples_per_cell - spec.samples_per_cell / 2;
  for (std::size_t s = 0; s < spec.num_signers; ++s)
    for (std::size_t c = 0; c < spec.num_sign_classes; ++c)
      for (std::size_t r = 0; r < spec.samples_per_cell; ++r) {
        auto raw = detail::render(spec, signers[s], &classes[c],
                                  derive_seed(spec.seed, detail::kNoiseStream,
                                              (s * spec.num_sign_classes + c), r));
        Sample sample{normalize(raw).sequence, c, s};
        (r < train_reps ? corpus.train : corpus.test).push_back(std::move(sample));
      }
  return corpus;
}

// Normalized rest-pose appearance frames of `count` signers who do not occur
// in the corpus. `pool` selects disjoint sets of such signers.
inline std::vector<AppearanceFrame> held_out_appearances(const SyntheticCorpusSpec& spec,
                                                         std::size_t count, std::size_t pool) {
  std::vector<AppearanceFrame> out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint64_t id = spec.num_signers + pool * 1000 + i;
    const auto signer = detail::make_signer(spec, id);
    SyntheticCorpusSpec still = spec;
    still.frames = 3;
    auto raw = detail::render(still, signer, nullptr,
                              derive_seed(spec.seed, detail::kPoolStream, id));
    // Scaled by frame 0 alone so the appearance has exactly unit shoulders.
    out.push_back(extract_appearance(normalize(raw, ScaleStatistic::kFirstConfidentFrame).sequence));
  }
  return out;
}

// Mean appearance frame over every sample of a corpus.
inline AppearanceFrame corpus_mean(const Corpus& corpus) {
  MeanAccumulator acc;
  for (const auto* split : {&corpus.train, &corpus.test})
    for (const auto& s : *split) acc.Add(s.pose);
  return acc.Finalize();
}

// The small synthetic stand-in shipped as data/mean_frame.pose.
inline AppearanceFrame bundled_mean_frame() {
  SyntheticCorpusSpec spec;
  spec.samples_per_cell = 2;
  return corpus_mean(generate_corpus(spec));
}

enum class Task { kSign, kSigner };

inline std::string_view to_string(Task task) { return task == Task::kSign ? "sign" : "signer"; }

// Hand geometry (within-hand pairwise distances averaged over frames) and
// wrist displacement from the first frame at fixed relative times.
inline std::vector<double> sign_features(const PoseSequence& seq) {
  constexpr std::size_t kSamples = 8;
  std::vector<double> f;
  for (auto hand : {kLeftHand, kRightHand}) {
    const auto r = ComponentRange(seq.header, hand);
    if (!r) throw Error("sign features need both hand components");
    const std::size_t start = f.size();
    for (std::size_t i = r->begin; i < r->end; ++i)
      for (std::size_t j = i + 1; j < r->end; ++j) f.push_back(0.0);
    for (std::size_t t = 0; t < seq.frames; ++t) {
      std::size_t slot = start;
      for (std::size_t i = r->begin; i < r->end; ++i)
        for (std::size_t j = i + 1; j < r->end; ++j)
          f[slot++] += distance(seq.point(t, 0, i), seq.point(t, 0, j)) / static_cast<double>(seq.frames);
    }
  }
  for (auto wrist : {kLeftWrist, kRightWrist}) {
    const auto k = seq.header.KeypointIndex(kBody, wrist);
    if (!k) throw Error("sign features need both body wrists");
    const auto origin = seq.point(0, 0, *k);
    for (std::size_t i = 0; i < kSamples; ++i) {
      const double pos = static_cast<double>(i + 1) * static_cast<double>(seq.frames - 1) / kSamples;
      const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
      const std::size_t hi = std::min(lo + 1, seq.frames - 1);
      const double a = pos - static_cast<double>(lo);
      for (std::size_t d = 0; d < seq.dims(); ++d) {
        const double v = (1.0 - a) * seq.point(lo, 0, *k)[d] + a * seq.point(hi, 0, *k)[d];
        f.push_back(v - origin[d]);
      }
    }
  }
  return f;
}

// Relative times (0..1) at which the cumulative wrist path reaches each
// quantile of its total length.
inline std::array<double, 3> motion_timing(const PoseSequence& seq) {
  std::array<std::size_t, 2> wrists = {*seq.header.KeypointIndex(kBody, kLeftWrist),
                                       *seq.header.KeypointIndex(kBody, kRightWrist)};
  std::vector<double> cumulative{0.0};
  for (std::size_t t = 1; t < seq.frames; ++t) {
    double step = 0.0;
    for (std::size_t w : wrists) step += distance(seq.point(t - 1, 0, w), seq.point(t, 0, w));
    cumulative.push_back(cumulative.back() + step);
  }
  std::array<double, 3> out{};
  const std::array<double, 3> quantiles = {0.25, 0.5, 0.75};
  for (std::size_t q = 0; q < 3; ++q) {
    const double target = quantiles[q] * cumulative.back();
    std::size_t t = 1;
    while (t + 1 < cumulative.size() && cumulative[t] < target) ++t;
    const double seg = cumulative[t] - cumulative[t - 1];
    const double a = seg > 0.0 ? (target - cumulative[t - 1]) / seg : 0.0;
    out[q] = (static_cast<double>(t - 1) + a) / static_cast<double>(seq.frames - 1);
  }
  return out;
}

// First-frame body and face keypoints relative to the mid-shoulder point,
// followed by the motion timing.
inline std::vector<double> signer_features(const PoseSequence& seq) {
  const auto sh = shoulder_indices(seq.header);
  std::vector<double> mid(seq.dims());
  for (std::size_t d = 0; d < seq.dims(); ++d)
    mid[d] = 0.5 * (static_cast<double>(seq.point(0, 0, sh.left)[d]) + seq.point(0, 0, sh.right)[d]);
  std::vector<double> f;
  for (auto component : {kBody, kFace}) {
    const auto r = ComponentRange(seq.header, component);
    if (!r) throw Error("signer features need BODY and FACE components");
    for (std::size_t k = r->begin; k < r->end; ++k)
      for (std::size_t d = 0; d < seq.dims(); ++d) f.push_back(seq.point(0, 0, k)[d] - mid[d]);
  }
  for (double v : motion_timing(seq)) f.push_back(v);
  return f;
}

inline std::vector<double> features(const PoseSequence& seq, Task task) {
  return task == Task::kSign ? sign_features(seq) : signer_features(seq);
}

// Centroids built incrementally; ties go to the lowest label.
class NearestCentroid {
 public:
  NearestCentroid() = default;
  explicit NearestCentroid(std::size_t num_labels) : sums_(num_labels), counts_(num_labels, 0) {}

  void Add(const std::vector<double>& feature, std::size_t label) {
    if (label >= sums_.size()) throw Error("label " + std::to_string(label) + " out of range");
    auto& sum = sums_[label];
    if (sum.empty()) sum.assign(feature.size(), 0.0);
    if (sum.size() != feature.size()) throw Error("feature length mismatch");
    for (std::size_t i = 0; i < feature.size(); ++i) sum[i] += feature[i];
    ++counts_[label];
  }

  void Finish() {
    for (std::size_t l = 0; l < sums_.size(); ++l) {
      if (counts_[l] == 0) throw Error("class " + std::to_string(l) + " has no training samples");
      for (double& v : sums_[l]) v /= static_cast<double>(counts_[l]);
    }
    finished_ = true;
  }

  std::size_t Predict(const std::vector<double>& feature) const {
    if (!finished_) throw Error("classifier used before training finished");
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < sums_.size(); ++l) {
      double dist = 0.0;
      for (std::size_t i = 0; i < feature.size(); ++i) {
        const double diff = feature[i] - sums_[l][i];
        dist += diff * diff;
      }
      if (dist < best_dist) {
        best_dist = dist;
        best = l;
      }
    }
    return best;
  }

  std::size_t num_labels() const { return sums_.size(); }

 private:
  std::vector<std::vector<double>> sums_;  // centroids once finished
  std::vector<std::size_t> counts_;
  bool finished_ = false;
};

struct Classifier {
  Task task = Task::kSign;
  NearestCentroid centroids;

  std::size_t Predict(const PoseSequence& seq) const { return centroids.Predict(features(seq, task)); }
};

// `num_labels == 0` takes max(label) + 1.
inline Classifier train_classifier(const std::vector<PoseSequence>& samples,
                                   const std::vector<std::size_t>& labels, Task task,
                                   std::size_t num_labels = 0) {
  if (samples.size() != labels.size()) throw Error("samples and labels differ in length");
  if (samples.empty()) throw Error("no training samples");
  if (num_labels == 0) num_labels = *std::max_element(labels.begin(), labels.end()) + 1;
  Classifier model{task, NearestCentroid(num_labels)};
  for (std::size_t i = 0; i < samples.size(); ++i) model.centroids.Add(features(samples[i], task), labels[i]);
  model.centroids.Finish();
  return model;
}

// Most frequent label; ties go to the lowest label.
inline std::size_t majority_vote(std::span<const std::size_t> predictions) {
  if (predictions.empty()) throw Error("majority vote over no predictions");
  std::vector<std::size_t> counts(*std::max_element(predictions.begin(), predictions.end()) + 1, 0);
  for (std::size_t p : predictions) ++counts[p];
  return static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

enum class TrainCondition { kOriginal, kAnonymized, kTransferred, kCombined };
enum class TestCondition { kOriginal, kAnonymized, kTransferred };

inline constexpr std::array<TrainCondition, 4> kTrainConditions = {
    TrainCondition::kOriginal, TrainCondition::kAnonymized, TrainCondition::kTransferred,
    TrainCondition::kCombined};
inline constexpr std::array<TestCondition, 3> kTestConditions = {
    TestCondition::kOriginal, TestCondition::kAnonymized, TestCondition::kTransferred};

inline std::string_view to_string(TrainCondition c) {
  constexpr std::array<std::string_view, 4> names = {"original", "anonymized", "transferred", "combined"};
  return names[static_cast<std::size_t>(c)];
}
inline std::string_view to_string(TestCondition c) {
  constexpr std::array<std::string_view, 3> names = {"original", "anonymized", "transferred"};
  return names[static_cast<std::size_t>(c)];
}

struct CombinedMix {
  double original = 0.10;
  double anonymized = 0.10;
  double transferred = 0.80;
};

enum class SampleSource { kOriginal, kAnonymized, kTransferred };

// Largest-remainder apportionment of n items; remainder ties favour the
// earlier share.
inline std::array<std::size_t, 3> apportion(std::size_t n, const CombinedMix& mix) {
  const std::array<double, 3> shares = {mix.original, mix.anonymized, mix.transferred};
  double total = 0.0;
  for (double s : shares) {
    if (!(s >= 0.0)) throw Error("mix proportions must be >= 0");
    total += s;
  }
  if (std::abs(total - 1.0) > 1e-9) throw Error("mix proportions sum to " + format_number(total) + ", not 1");
  std::array<std::size_t, 3> counts{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double exact = shares[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[i] = exact - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++counts[order[i % 3]];
  return counts;
}

// Source of each training sample. Samples are dealt round-robin across
// labels (shuffled within a label) before the apportioned blocks are cut, so
// every source covers the labels evenly.
inline std::vector<SampleSource> mix_assignment(const std::vector<std::size_t>& labels,
                                                const CombinedMix& mix, std::uint64_t seed) {
  const auto counts = apportion(labels.size(), mix);
  std::mt19937_64 rng(seed);
  std::size_t num_labels = 0;
  for (std::size_t l : labels) num_labels = std::max(num_labels, l + 1);
  std::vector<std::vector<std::size_t>> by_label(num_labels);
  for (std::size_t i = 0; i < labels.size(); ++i) by_label[labels[i]].push_back(i);
  for (auto& group : by_label) std::shuffle(group.begin(), group.end(), rng);
  std::vector<std::size_t> order;
  for (std::size_t round = 0; order.size() < labels.size(); ++round)
    for (const auto& group : by_label)
      if (round < group.size()) order.push_back(group[round]);

  std::vector<SampleSource> out(labels.size());
  std::size_t pos = 0;
  for (std::size_t source = 0; source < 3; ++source)
    for (std::size_t j = 0; j < counts[source]; ++j)
      out[order[pos++]] = static_cast<SampleSource>(source);
  return out;
}

// The combined training set: each sample kept, anonymized with `mean`, or
// transferred to a seeded random appearance from `pool`; order preserved.
inline std::vector<Sample> mix_training_set(const std::vector<Sample>& samples, const CombinedMix& mix,
                                            std::uint64_t seed, const AppearanceFrame& mean,
                                            const std::vector<AppearanceFrame>& pool) {
  std::vector<std::size_t> labels;
  for (const auto& s : samples) labels.push_back(s.sign);
  const auto sources = mix_assignment(labels, mix, seed);
  std::vector<Sample> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Sample s = samples[i];
    if (sources[i] == SampleSource::kAnonymized) {
      s.pose = remove_appearance(s.pose, mean);
    } else if (sources[i] == SampleSource::kTransferred) {
      if (pool.empty()) throw Error("no appearances to transfer to");
      std::mt19937_64 rng(derive_seed(seed, detail::kCombinedStream, i));
      s.pose = transfer_appearance(s.pose, pool[rng() % pool.size()]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

struct EnsembleConfig {
  std::size_t num_appearances = 10;

  void Validate() const {
    if (num_appearances < 1) throw Error("ensemble needs at least one appearance");
  }
};

struct MatrixConfig {
  CombinedMix combined_mix;
  // Random target appearances per sample in the TRANSFERRED training set.
  std::size_t training_transfers = 3;
};

struct MatrixRow {
  TrainCondition train;
  TestCondition test;
  Task task;
  double accuracy;
  double chance;
};

struct MatrixResult {
  std::vector<MatrixRow> rows;
  AppearanceFrame mean_frame;

  const MatrixRow& at(TrainCondition train, TestCondition test, Task task) const {
    for (const auto& r : rows)
      if (r.train == train && r.test == test && r.task == task) return r;
    throw Error("no such matrix cell");
  }
};

// Runs both tasks over the full 4 x 3 matrix. The anonymization target is
// the mean frame of the training corpus; TRANSFERRED test data is voted over
// `ensemble.num_appearances` held-out appearances shared by every sample.
inline MatrixResult run_matrix(const Corpus& corpus, const MatrixConfig& config = {},
                               const EnsembleConfig& ensemble = {}) {
  ensemble.Validate();
  const auto& spec = corpus.spec;
  const std::uint64_t seed = spec.seed;

  MeanAccumulator acc;
  for (const auto& s : corpus.train) acc.Add(s.pose);
  MatrixResult result;
  result.mean_frame = acc.Finalize();
  const AppearanceFrame& mean = result.mean_frame;
  const auto test_pool = held_out_appearances(spec, ensemble.num_appearances, 0);
  const auto train_pool = held_out_appearances(spec, std::max<std::size_t>(ensemble.num_appearances, 10), 1);

  struct Models {
    NearestCentroid sign;
    NearestCentroid signer;
  };
  auto add = [](Models& m, const Sample& s) {
    m.sign.Add(sign_features(s.pose), s.sign);
    m.signer.Add(signer_features(s.pose), s.signer);
  };
  auto train = [&](TrainCondition condition) {
    Models m{NearestCentroid(spec.num_sign_classes), NearestCentroid(spec.num_signers)};
    switch (condition) {
      case TrainCondition::kOriginal:
        for (const auto& s : corpus.train) add(m, s);
        break;
      case TrainCondition::kAnonymized:
        for (const auto& s : corpus.train) add(m, {remove_appearance(s.pose, mean), s.sign, s.signer});
        break;
      case TrainCondition::kTransferred:
        for (std::size_t i = 0; i < corpus.train.size(); ++i) {
          std::mt19937_64 rng(derive_seed(seed, detail::kTrainTransferStream, i));
          const auto& s = corpus.train[i];
          for (std::size_t j = 0; j < config.training_transfers; ++j)
            add(m, {transfer_appearance(s.pose, train_pool[rng() % train_pool.size()]), s.sign, s.signer});
        }
        break;
      case TrainCondition::kCombined:
        for (const auto& s : mix_training_set(corpus.train, config.combined_mix,
                                              derive_seed(seed, detail::kCombinedStream), mean, train_pool))
          add(m, s);
        break;
    }
    m.sign.Finish();
    m.signer.Finish();
    return m;
  };

  std::vector<std::future<Models>> pending;
  for (auto condition : kTrainConditions) pending.push_back(std::async(std::launch::async, train, condition));
  std::vector<Models> models;
  for (auto& f : pending) models.push_back(f.get());

  // correct[train][test][task]
  using Counts = std::array<std::array<std::array<std::size_t, 2>, 3>, 4>;
  auto evaluate = [&](std::size_t begin, std::size_t end) {
    Counts correct{};
    for (std::size_t i = begin; i < end; ++i) {
      const Sample& s = corpus.test[i];
      const std::array<std::size_t, 2> truth = {s.sign, s.signer};
      std::array<std::vector<double>, 2> original = {sign_features(s.pose), signer_features(s.pose)};
      const auto anon_pose = remove_appearance(s.pose, mean);
      std::array<std::vector<double>, 2> anonymized = {sign_features(anon_pose), signer_features(anon_pose)};
      std::vector<std::array<std::vector<double>, 2>> transferred;
      for (const auto& target : test_pool) {
        const auto pose = transfer_appearance(s.pose, target);
        transferred.push_back({sign_features(pose), signer_features(pose)});
      }
      for (std::size_t m = 0; m < models.size(); ++m) {
        const std::array<const NearestCentroid*, 2> heads = {&models[m].sign, &models[m].signer};
        for (std::size_t task = 0; task < 2; ++task) {
          const auto& head = *heads[task];
          correct[m][0][task] += head.Predict(original[task]) == truth[task];
          correct[m][1][task] += head.Predict(anonymized[task]) == truth[task];
          std::vector<std::size_t> votes;
          for (const auto& f : transferred) votes.push_back(head.Predict(f[task]));
          correct[m][2][task] += majority_vote(votes) == truth[task];
        }
      }
    }
    return correct;
  };

  const std::size_t n = corpus.test.size();
  const std::size_t shards = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<Counts>> parts;
  for (std::size_t p = 0; p < shards; ++p)
    parts.push_back(std::async(std::launch::async, evaluate, n * p / shards, n * (p + 1) / shards));
  Counts correct{};
  for (auto& f : parts) {
    const auto c = f.get();
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t t = 0; t < 2; ++t) correct[a][b][t] += c[a][b][t];
  }

  for (std::size_t task = 0; task < 2; ++task)
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 3; ++b) {
        const double chance = 1.0 / static_cast<double>(task == 0 ? spec.num_sign_classes : spec.num_signers);
        result.rows.push_back({kTrainConditions[a], kTestConditions[b], static_cast<Task>(task),
                               static_cast<double>(correct[a][b][task]) / static_cast<double>(n), chance});
      }
  return result;
}

inline std::string matrix_csv(const MatrixResult& result) {
  std::string out = "train,test,task,accuracy,chance\n";
  for (const auto& r : result.rows)
    out += std::string(to_string(r.train)) + "," + std::string(to_string(r.test)) + "," +
           std::string(to_string(r.task)) + "," + format_number(r.accuracy) + "," + format_number(r.chance) + "\n";
  return out;
}

inline std::string matrix_table(const MatrixResult& result) {
  auto pct = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%7.2f%%", 100.0 * v);
    return std::string(buf);
  };
  std::string out;
  for (auto task : {Task::kSign, Task::kSigner}) {
    out += std::string(task == Task::kSign ? "Sign" : "Signer") + " recognition accuracy\n";
    char head[96];
    std::snprintf(head, sizeof(head), "  %-16s%11s%11s%11s\n", "train \\ test", "original", "anonymized",
                  "transferred");
    out += head;
    double chance = 0.0;
    for (auto train : kTrainConditions) {
      char label[32];
      std::snprintf(label, sizeof(label), "  %-16s", std::string(to_string(train)).c_str());
      out += label;
      for (auto test : kTestConditions) {
        const auto& row = result.at(train, test, task);
        chance = row.chance;
        out += "   " + pct(row.accuracy);
      }
      out += "\n";
    }
    out += "  chance          " + std::string(3, ' ') + pct(chance) + "\n\n";
  }
  return out;
}

}  // namespace pose_transfer::eval
