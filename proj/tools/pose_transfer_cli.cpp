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

// pose-transfer: command-line front end for appearance transfer,
// anonymization, corpus means, stitching, flow curves and the evaluation
// harness.
//
// Exit codes: 0 success, 1 usage or domain error, 2 I/O error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <thread>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "pose_transfer.hpp"

#ifndef POSE_TRANSFER_DEFAULT_MEAN
#define POSE_TRANSFER_DEFAULT_MEAN "data/mean_frame.pose"
#endif

namespace fs = std::filesystem;
namespace pt = pose_transfer;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Usage-level failure detected after parsing (exit 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  bool quiet = false;
  std::uint64_t seed = 0;
  std::string remap_path;
};

std::vector<std::uint8_t> read_file(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("input file not found: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return bytes;
}

std::string read_text(const fs::path& path) {
  auto bytes = read_file(path);
  return {bytes.begin(), bytes.end()};
}

// Writes via a sibling temp file and rename, so a failed run leaves nothing.
void write_atomic(const fs::path& path, std::string_view contents) {
  const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
  const fs::path tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("error writing " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move output into place at " + path.string());
  }
}

class Tool {
 public:
  explicit Tool(const Globals& globals) : globals_(globals) {}

  void Note(const std::string& msg) const {
    if (!globals_.quiet) std::cout << msg << "\n";
  }
  void Warn(const std::string& msg) const { std::cerr << "warning: " << msg << "\n"; }

  pt::PoseSequence Load(const fs::path& path) const {
    const auto bytes = read_file(path);
    try {
      return pt::read_pose(bytes, remap());
    } catch (const pt::Error& e) {
      throw pt::Error(path.string() + ": " + e.what());
    }
  }

  pt::Normalized LoadNormalized(const fs::path& path, pt::ScaleStatistic statistic) const {
    auto seq = Load(path);
    try {
      return pt::normalize(seq, statistic);
    } catch (const pt::Error& e) {
      throw pt::Error(path.string() + ": " + e.what());
    }
  }

  // Frame 0 of a pose file, normalized together with the rest of the file.
  pt::AppearanceFrame LoadAppearance(const fs::path& path, pt::ScaleStatistic statistic,
                                     bool warn_multi_frame) const {
    auto normalized = LoadNormalized(path, statistic);
    if (warn_multi_frame && normalized.sequence.frames > 1)
      Warn(path.string() + " has " + std::to_string(normalized.sequence.frames) +
           " frames; using frame 0 as the appearance");
    return pt::AppearanceFrame::FromFrame(normalized.sequence, 0, 0, true);
  }

  void Save(const fs::path& path, const pt::PoseSequence& seq, bool json) const {
    if (json) {
      write_atomic(path, pt::export_json(seq));
    } else {
      const auto bytes = pt::write_pose(seq);
      write_atomic(path, {reinterpret_cast<const char*>(bytes.data()), bytes.size()});
    }
  }

  const Globals& globals() const { return globals_; }

 private:
  const pt::RemapTable* remap() const {
    if (globals_.remap_path.empty()) return nullptr;
    if (!remap_) remap_ = pt::parse_remap_table(read_text(globals_.remap_path));
    return &*remap_;
  }

  const Globals& globals_;
  mutable std::optional<pt::RemapTable> remap_;
};

struct TransferFlags {
  std::string input;
  std::string output;
  std::string appearance;
  std::string hands = "rigid";
  std::string selector = "first";
  bool keep_scale = false;
  bool first_frame_scale = false;
  bool json = false;

  pt::TransferPolicy Policy() const {
    pt::TransferPolicy policy;
    policy.hand_anchor = hands == "rigid" ? pt::HandAnchor::kRigidFollowWrist : pt::HandAnchor::kPassThrough;
    policy.selector = selector == "first" ? pt::AppearanceSelector::kFirstFrame
                                          : pt::AppearanceSelector::kFirstConfidentFrame;
    return policy;
  }
  pt::ScaleStatistic Statistic() const {
    return first_frame_scale ? pt::ScaleStatistic::kFirstConfidentFrame : pt::ScaleStatistic::kAllFrames;
  }
};

void add_transfer_flags(CLI::App* cmd, TransferFlags& f) {
  cmd->add_option("--input,-i", f.input, "Source pose file")->required();
  cmd->add_option("--output,-o", f.output, "Output pose file")->required();
  cmd->add_option("--hands", f.hands, "Hand handling")
      ->check(CLI::IsMember({"rigid", "passthrough"}))
      ->capture_default_str();
  cmd->add_option("--appearance-frame", f.selector, "Which source frame holds the appearance")
      ->check(CLI::IsMember({"first", "first-confident"}))
      ->capture_default_str();
  cmd->add_flag("--keep-scale", f.keep_scale, "Map the result back to the input's coordinate frame");
  cmd->add_flag("--first-frame-scale", f.first_frame_scale,
                "Normalize by the anchor frame's shoulder width instead of the all-frame mean");
  cmd->add_flag("--json", f.json, "Write JSON instead of the binary pose format");
}

void run_transfer(const Tool& tool, const TransferFlags& f, const pt::AppearanceFrame& target) {
  auto normalized = tool.LoadNormalized(f.input, f.Statistic());
  auto out = pt::transfer_appearance(normalized.sequence, target, f.Policy());
  if (f.keep_scale) out = pt::apply_normalization(out, pt::invert_normalization(normalized.params));
  tool.Save(f.output, out, f.json);
  tool.Note("wrote " + f.output + " (" + std::to_string(out.frames) + " frames)");
}

struct MeanFlags {
  std::string manifest;
  std::string output;
  unsigned workers = 1;
  bool first_frame_scale = false;
};

void run_mean(const Tool& tool, const MeanFlags& f) {
  const fs::path manifest(f.manifest);
  const auto paths = pt::parse_manifest(read_text(manifest), manifest.parent_path());
  if (paths.empty()) throw UsageError("manifest " + f.manifest + " lists no pose files");
  const auto statistic =
      f.first_frame_scale ? pt::ScaleStatistic::kFirstConfidentFrame : pt::ScaleStatistic::kAllFrames;
  const auto acc = pt::accumulate_corpus(
      paths.size(), [&](std::size_t i) { return tool.LoadNormalized(paths[i], statistic).sequence; },
      f.workers);
  tool.Save(f.output, acc.Finalize().ToSequence(), false);
  tool.Note("frames_seen: " + std::to_string(acc.frames_seen()));
}

struct StitchFlags {
  std::vector<std::string> inputs;
  std::string output;
  std::size_t transition = 8;
  double rest_threshold = 0.02;
  bool no_unify = false;
  std::string appearance;
  bool json = false;
};

void print_zones(const Tool& tool, const pt::StitchZoneReport& report, bool compared) {
  for (std::size_t i = 0; i < report.zones.size(); ++i) {
    const auto& z = report.zones[i];
    std::ostringstream line;
    line << "zone " << i << " [" << z.zone.begin << ", " << z.zone.end << "): peak " << z.peak_a
         << " auc " << z.auc_a;
    if (compared) line << " | without unification: peak " << z.peak_b << " auc " << z.auc_b;
    tool.Note(line.str());
  }
  if (compared) tool.Note("max flow difference outside zones: " + pt::format_number(report.outside_max_abs_diff));
}

void run_stitch(const Tool& tool, const StitchFlags& f) {
  std::vector<pt::PoseSequence> clips;
  for (const auto& path : f.inputs) clips.push_back(tool.LoadNormalized(path, pt::ScaleStatistic::kAllFrames).sequence);
  pt::StitchConfig config;
  config.transition_frames = f.transition;
  config.rest_threshold = f.rest_threshold;
  config.unify_appearance = !f.no_unify;
  if (!f.appearance.empty())
    config.target_appearance = tool.LoadAppearance(f.appearance, pt::ScaleStatistic::kAllFrames, false);
  const auto result = pt::stitch(clips, config);
  tool.Save(f.output, result.sequence, f.json);
  tool.Note("wrote " + f.output + " (" + std::to_string(result.sequence.frames) + " frames, " +
            std::to_string(result.zones.size()) + " stitch zones)");
  if (result.sequence.frames < 2) return;
  const auto flow = pt::flow_series(result.sequence);
  if (config.unify_appearance) {
    auto plain = config;
    plain.unify_appearance = false;
    const auto baseline = pt::flow_series(pt::stitch(clips, plain).sequence);
    print_zones(tool, pt::stitch_zone_report(flow, baseline, result.zones), true);
  } else {
    print_zones(tool, pt::stitch_zone_report(flow, flow, result.zones), false);
  }
}

struct FlowFlags {
  std::string input;
  std::string components;
  std::string csv;
};

void run_flow(const Tool& tool, const FlowFlags& f) {
  const auto seq = tool.LoadNormalized(f.input, pt::ScaleStatistic::kAllFrames).sequence;
  std::vector<std::string> components;
  std::stringstream list(f.components);
  for (std::string name; std::getline(list, name, ',');)
    if (!name.empty()) components.push_back(name);
  const auto series = pt::flow_series(seq, components);
  write_atomic(f.csv, pt::flow_csv(series));
  tool.Note("wrote " + std::to_string(series.values.size()) + " transitions to " + f.csv +
            " (auc " + pt::format_number(pt::flow_auc(series)) + ")");
}

struct EvalFlags {
  pt::eval::SyntheticCorpusSpec spec;
  std::optional<std::uint64_t> seed;
  std::size_t appearances = 10;
  std::string csv;
};

void run_eval(const Tool& tool, EvalFlags f) {
  f.spec.seed = f.seed.value_or(tool.globals().seed);
  const auto corpus = pt::eval::generate_corpus(f.spec);
  const auto result = pt::eval::run_matrix(corpus, {}, {f.appearances});
  write_atomic(f.csv, pt::eval::matrix_csv(result));
  tool.Note(pt::eval::matrix_table(result) + "wrote " + f.csv);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signer appearance transfer and anonymization for skeletal pose sequences"};
  app.require_subcommand(1);
  Globals globals;
  app.add_flag("--quiet,-q", globals.quiet, "Suppress progress output");
  app.add_option("--seed", globals.seed, "Master seed for randomized pipelines");
  app.add_option("--remap", globals.remap_path, "Landmark remap table (name=canonical lines) applied on read");

  TransferFlags anon_flags;
  std::string mean_path = POSE_TRANSFER_DEFAULT_MEAN;
  auto* anonymize = app.add_subcommand("anonymize", "Replace the signer's appearance with a mean frame");
  add_transfer_flags(anonymize, anon_flags);
  anonymize->add_option("--mean", mean_path, "Mean appearance pose file (frame 0 is used)")->capture_default_str();

  TransferFlags transfer_flags;
  auto* transfer = app.add_subcommand("transfer", "Transfer another person's appearance onto a pose");
  add_transfer_flags(transfer, transfer_flags);
  transfer->add_option("--appearance", transfer_flags.appearance, "Pose file whose first frame is the target")
      ->required();

  MeanFlags mean_flags;
  auto* mean = app.add_subcommand("mean", "Compute the mean appearance frame of a corpus");
  mean->add_option("--manifest", mean_flags.manifest, "Text file with one pose path per line")->required();
  mean->add_option("--output,-o", mean_flags.output, "Output pose file (1 frame)")->required();
  mean->add_option("--workers", mean_flags.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  mean->add_flag("--first-frame-scale", mean_flags.first_frame_scale, "Normalize each file by its anchor frame only");

  StitchFlags stitch_flags;
  auto* stitch = app.add_subcommand("stitch", "Stitch sign clips into one sequence");
  stitch->add_option("--inputs", stitch_flags.inputs, "Clips in order")->required()->expected(1, -1);
  stitch->add_option("--output,-o", stitch_flags.output, "Output pose file")->required();
  stitch->add_option("--transition", stitch_flags.transition, "Interpolated frames per junction")->capture_default_str();
  stitch->add_option("--rest-threshold", stitch_flags.rest_threshold, "Flow below which boundary frames count as rest")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  stitch->add_flag("--no-unify", stitch_flags.no_unify, "Keep each clip's own appearance");
  stitch->add_option("--appearance", stitch_flags.appearance, "Target appearance (default: first clip's)");
  stitch->add_flag("--json", stitch_flags.json, "Write JSON instead of the binary pose format");

  FlowFlags flow_flags;
  auto* flow = app.add_subcommand("flow", "Write the pose optical-flow curve as CSV");
  flow->add_option("--input,-i", flow_flags.input, "Pose file")->required();
  flow->add_option("--components", flow_flags.components, "Comma-separated components (default: all)");
  flow->add_option("--csv", flow_flags.csv, "Output CSV (frame,flow)")->required();

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Run the synthetic privacy/utility matrix");
  eval->add_option("--signers", eval_flags.spec.num_signers, "Number of signers")->capture_default_str();
  eval->add_option("--classes", eval_flags.spec.num_sign_classes, "Number of sign classes")->capture_default_str();
  eval->add_option("--samples", eval_flags.spec.samples_per_cell, "Samples per signer and class")->capture_default_str();
  eval->add_option("--seed", eval_flags.seed, "Corpus seed (default: the global --seed)");
  eval->add_option("--tempo-jitter", eval_flags.spec.tempo_jitter, "Per-signer tempo spread")->capture_default_str();
  eval->add_option("--noise", eval_flags.spec.motion_noise, "Per-coordinate motion noise")->capture_default_str();
  eval->add_option("--appearance-scale", eval_flags.spec.signer_appearance_scale, "Per-signer skeletal offset scale")
      ->capture_default_str();
  eval->add_option("--appearances", eval_flags.appearances, "Ensemble size for the transferred test condition")
      ->capture_default_str();
  eval->add_option("--csv", eval_flags.csv, "Output CSV (train,test,task,accuracy,chance)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  Tool tool(globals);
  try {
    if (*anonymize) {
      run_transfer(tool, anon_flags, tool.LoadAppearance(mean_path, anon_flags.Statistic(), true));
    } else if (*transfer) {
      run_transfer(tool, transfer_flags,
                   tool.LoadAppearance(transfer_flags.appearance, transfer_flags.Statistic(), false));
    } else if (*mean) {
      run_mean(tool, mean_flags);
    } else if (*stitch) {
      run_stitch(tool, stitch_flags);
    } else if (*flow) {
      run_flow(tool, flow_flags);
    } else if (*eval) {
      run_eval(tool, eval_flags);
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
