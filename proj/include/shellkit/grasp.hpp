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
#include "shellkit/spatial.hpp"

namespace shellkit {

/// Parallel-jaw gripper. The opening runs along the grasp finger axis;
/// each finger pad has the width x height cross-section and a solid body
/// of finger_body_thickness behind its jaw plane.
struct GripperModel {
  double max_opening = 0.085;
  double finger_pad_width = 0.020;
  double finger_pad_height = 0.035;
  double finger_body_thickness = 0.010;
  int min_contact_points = 20;

  void Validate() const {
    if (!(max_opening > 0) || !(finger_pad_width > 0) || !(finger_pad_height > 0) ||
        !(finger_body_thickness > 0))
      throw InvalidInput("gripper dimensions must be positive");
    if (min_contact_points < 1) throw InvalidInput("gripper needs min_contact_points >= 1");
  }
};

/// Jaw clearance: a grasp must leave this much slack inside the opening.
inline constexpr double kJawClearance = 0.002;
/// The outer jaw plane sits this far beyond the anchor along the finger
/// axis, putting one finger just outside the observed surface.
inline constexpr double kAnchorStandoff = 1e-3;

/// Candidate grasp: fingers close along finger_axis (unit, pointing off
/// the surface toward the camera); roll spins the pad cross-section about
/// that axis. Roll zero aligns the pad width with the camera up-axis
/// projected perpendicular to finger_axis (camera right-axis when the
/// projection degenerates).
struct GraspPose {
  Vec3 anchor = Vec3::Zero();
  Vec3 finger_axis = Vec3::UnitZ();
  double roll = 0;
};

/// Orthonormal grasp frame: x is the finger axis, y carries the pad
/// width, z the pad height.
struct GraspFrame {
  Vec3 x, y, z;
};

GraspFrame MakeGraspFrame(const Vec3& finger_axis, double roll);

struct GraspEval {
  bool feasible = false;
  double width = 0;        // extent of in-envelope points along the axis
  int contact_points = 0;  // points inside the gripper envelope
  double span = 0;         // extent of all pad-prism points at or below the outer jaw
  bool body_collision = false;
};

/// Geometric feasibility of one grasp against an observed point set.
/// Feasible iff (a) at least min_contact_points points lie in the gripper
/// envelope, (b) the pad-prism span fits within max_opening minus the jaw
/// clearance, and (c) no point intrudes into either finger body. The span
/// in (b) covers every prism point at or below the outer jaw plane, so
/// objects running deeper than the opening fail even when only their
/// surface is sampled.
GraspEval EvaluateGrasp(const GraspPose& pose, const PointIndex& points,
                        const GripperModel& gripper);
GraspEval EvaluateGrasp(const GraspPose& pose, const PointCloud& points,
                        const GripperModel& gripper);
/// Frame-explicit variant used where the frame is prebuilt (or rigidly
/// transformed); `opening` overrides gripper.max_opening when positive.
GraspEval EvaluateGraspFrame(const Vec3& anchor, const GraspFrame& frame,
                             const PointIndex& points, const GripperModel& gripper,
                             double opening = 0);

struct NormalMap {
  int width = 0, height = 0;
  std::vector<Vec3> normals;
  std::vector<uint8_t> valid;

  bool Valid(int u, int v) const { return valid[size_t(v) * width + u] != 0; }
  const Vec3& At(int u, int v) const { return normals[size_t(v) * width + u]; }
};

/// Surface normals from central differences of backprojected neighbors,
/// flipped to face the camera. Defined on valid pixels whose four axis
/// neighbors are valid.
NormalMap EstimateNormals(const DepthImage& entry, const CameraModel& camera);

/// Volume centroid of the reconstruction; falls back to the area-weighted
/// surface centroid for degenerate (near-zero volume) meshes.
Vec3 CenterOfGeometry(const TriangleMesh& recon);

inline constexpr int kGraspRolls = 8;  // k * pi/4, k = 0..7

struct GraspCandidate {
  int u = 0, v = 0;
  GraspPose pose;
  bool feasible = false;
  double width = 0;
  double quality = 0;
};

struct GraspMaps {
  int width = 0, height = 0;
  std::vector<uint8_t> valid;       // shell mask
  std::vector<uint8_t> feasibility; // 0/1
  std::vector<float> quality;       // [0,1], 0 where infeasible
  std::vector<float> grasp_width;   // meters, 0 where infeasible

  size_t Index(int u, int v) const { return size_t(v) * width + u; }
};

struct GraspMapResult {
  GraspMaps maps;
  std::vector<GraspCandidate> candidates;  // anchors x rolls, raster order
  std::optional<Vec3> center;              // center of geometry of the recon
};

/// Dense grasp maps over the shell. Every stride-th valid entry pixel
/// with a valid normal anchors kGraspRolls candidates; a pixel is
/// feasible when any roll is, its width is the minimum over feasible
/// rolls, and quality scales inversely with distance to the center of
/// geometry, min-max normalized over feasible anchors (1 everywhere when
/// the distances are all equal). Non-anchor pixels inside the mask copy
/// their nearest anchor (pixel Euclidean distance, ties to the smallest
/// (v, u)). An all-zero feasibility map is a valid outcome.
GraspMapResult ComputeGraspMaps(const ObjectShell& shell, const GripperModel& gripper,
                                int stride = 4,
                                double depth_discontinuity = 0.02);

void WriteCandidatesCsv(const std::string& path,
                        const std::vector<GraspCandidate>& candidates);
std::vector<GraspCandidate> ReadCandidatesCsv(const std::string& path);

}  // namespace shellkit
