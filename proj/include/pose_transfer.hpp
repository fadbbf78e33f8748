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

#pragma once

#include "pose_transfer/appearance.hpp"
#include "pose_transfer/corpus.hpp"
#include "pose_transfer/error.hpp"
#include "pose_transfer/eval.hpp"
#include "pose_transfer/io.hpp"
#include "pose_transfer/json_export.hpp"
#include "pose_transfer/metrics.hpp"
#include "pose_transfer/normalize.hpp"
#include "pose_transfer/pose.hpp"
#include "pose_transfer/stitch.hpp"
#include "pose_transfer/synthetic.hpp"
