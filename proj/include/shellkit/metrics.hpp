// Copyright 2026 The Shellkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <vector>

#include "shellkit/geometry.hpp"
#include "shellkit/grasp.hpp"
#include "shellkit/rng.hpp"

namespace shellkit {

/// Uniform area-weighted surface sampling; deterministic per stream.
PointCloud SampleSurface(const TriangleMesh& mesh, int n, RngStream& stream);

struct ChamferResult {
  double forward = 0;   // mean nearest distance, a -> b
  double backward = 0;  // mean nearest distance, b -> a
  double sum = 0;
};

/// Mean Euclidean (non-squared) nearest-neighbor distance in both
/// directions, via an exact spatial index. Throws on empty input.
ChamferResult Chamfer(const PointCloud& a, const PointCloud& b);

/// Fraction of feasible candidates that stay feasible when re-evaluated
/// against dense ground-truth surface samples with the gripper opened to
/// candidate width + clearance (body collisions checked at that opening).
/// Empty feasible set -> nullopt (rate undefined).
std::optional<double> GraspPrecision(const std::vector<GraspCandidate>& candidates,
                                     const TriangleMesh& gt_mesh,
                                     double clearance = 0.015,
                                     const GripperModel& gripper = {},
                                     int gt_samples = 20000,
                                     uint64_t sample_seed = 0);

struct MapMetrics {
  double accuracy = 0;
  double f1 = 0;
  double quality_rmse = 0;
  double quality_rmse_high = 0;  // restricted to GT quality >= 0.75
};

/// Per-pixel map comparison. Accuracy and quality RMSE run over pixels
/// valid in the GT mask; F1 treats "feasible" as the positive class and
/// additionally counts predicted-feasible pixels outside the GT mask as
/// false positives. Zero positives in both maps -> f1 = 1. Empty
/// comparison sets score as perfect agreement.
MapMetrics ComputeMapMetrics(const GraspMaps& pred, const GraspMaps& gt);

}  // namespace shellkit
