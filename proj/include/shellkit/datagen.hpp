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

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "shellkit/geometry.hpp"
#include "shellkit/grasp.hpp"
#include "shellkit/rng.hpp"

namespace shellkit {

// ---------------------------------------------------------------------------
// Randomized shapes

enum class BaseShape { kCube, kCylinder };

struct ShrinkModifier {
  int axis = 0;          // plane normal axis
  bool positive_side = true;  // which half gets scaled toward the plane
  double fraction = 0;   // scale factor applied is (1 - fraction)
};

struct ProtrusionModifier {
  int center_vertex = 0;  // bump center, by vertex id of the base mesh
  double amplitude = 0;   // meters, outward along the radial direction
  double sigma = 0;       // Gaussian falloff radius, meters
};

/// Full recipe for one randomized shape; building it is deterministic.
/// Invariants after Build: bounding-box side ratio <= 1:7 and max side in
/// [0.05, 0.35] m (modifier parameters are clamped to preserve both).
struct ShapeSpec {
  BaseShape base = BaseShape::kCube;
  Vec3 squish = Vec3::Ones();
  double target_max_side = 0.05;
  std::optional<ShrinkModifier> shrink;
  std::optional<ProtrusionModifier> protrusion;
};

inline constexpr double kMaxSideRatio = 7.0;
inline constexpr double kMinMaxSide = 0.05;
inline constexpr double kMaxMaxSide = 0.35;

ShapeSpec SampleShapeSpec(RngStream& stream);
TriangleMesh BuildShape(const ShapeSpec& spec);
inline TriangleMesh GenShape(RngStream& stream) { return BuildShape(SampleShapeSpec(stream)); }

/// Uniform SO(3) rotation about the bounding-box center, then the center
/// is placed uniformly inside the ball of radius kPlacementRadius around
/// kPlacementCenter (camera frame). Returns the posed mesh and the pose.
inline const Vec3 kPlacementCenter(0, 0, 0.75);
inline constexpr double kPlacementRadius = 0.25;

std::pair<TriangleMesh, Pose> PlaceShape(const TriangleMesh& mesh, RngStream& stream);

// ---------------------------------------------------------------------------
// Augmentations

/// Uniform Laplacian smoothing: each round moves every vertex halfway
/// toward its 1-ring average. A planar mesh stays planar.
TriangleMesh LaplacianSmooth(const TriangleMesh& mesh, int rounds);

/// Roughens a mesh: a random vertex subset (fraction in [0.3, 1.0]) gets
/// per-axis uniform jitter with per-vertex magnitude in [1, 10] mm, then
/// three rounds of LaplacianSmooth. Topology is unchanged.
TriangleMesh PrerenderAugment(const TriangleMesh& mesh, RngStream& stream);

/// Per-round audit trail of PostrenderAugment, filled when requested.
struct AugmentTrace {
  struct ErosionRound {
    std::vector<uint8_t> mask_before;        // validity before the round
    std::vector<std::array<int, 2>> removed; // pixels invalidated this round
    bool coarse = false;
  };
  double dropout_angle = 0;  // radians
  int dropout_removed = 0;
  int pepper_count = 0;      // drawn count; actual removals capped by validity
  int pepper_removed = 0;
  int erosion_rounds = 0;
  std::vector<ErosionRound> rounds;
  std::vector<std::array<int, 2>> removed_pixels;  // steps 2-4, removal order
  std::vector<float> removed_values;               // value at removal time
  std::vector<int> exempted;                       // indices into removed_pixels
};

/// Sensor-noise model over a rendered depth image, in order:
/// (1) multiplicative then additive Gaussian noise on valid pixels;
/// (2) grazing-angle dropout at a threshold drawn from [5, 20] degrees;
/// (3) pepper dropout of up to 10 random pixels; (4) 5-20 rounds of
/// stochastic border erosion (first up to 3 rounds selected at 2x
/// coarser resolution; every invalidated pixel is a border pixel of the
/// round it was removed in); (5) up to 10 removed pixels restored with
/// their exact pre-removal values. Never creates valid pixels otherwise.
DepthImage PostrenderAugment(const DepthImage& depth, const CameraModel& camera,
                             RngStream& stream, AugmentTrace* trace = nullptr);

// ---------------------------------------------------------------------------
// Dataset generation

struct DatasetParams {
  int n_shapes = 1;
  int views_per_shape = 1;
  uint64_t seed = 0;
  std::string out_dir;
  CameraModel camera{300, 300, 159.5, 119.5, 320, 240};
  GripperModel gripper;
  int grasp_stride = 4;
  int jobs = 1;
};

struct ManifestEntry {
  std::string id;
  uint64_t shape_seed = 0;
  uint64_t view_seed = 0;
};

/// The deterministic geometry recipe behind one dataset sample, exposed
/// so audits can regenerate and check it without re-running the renders.
struct SampleGeometry {
  ShapeSpec spec;
  TriangleMesh shape;   // before placement
  TriangleMesh placed;  // camera frame, before pre-render jitter
  Pose pose;
};
SampleGeometry DatasetSampleGeometry(const DatasetParams& params, int sample_index);

/// Writes per sample: input.dmap (augmented entry), entry.dmap/exit.dmap
/// (clean shell), feas.pgm, qual.pgm, cam.txt; then manifest.tsv with one
/// `id<TAB>shape_seed<TAB>view_seed` line per sample in index order.
/// Output bytes are a pure function of (seed, sample index) regardless of
/// jobs. On failure, completed samples are still listed in the manifest
/// before the error is rethrown.
std::vector<ManifestEntry> GenDataset(const DatasetParams& params);

/// Grasp-map rasters under a literal path prefix (a directory like
/// "out/000001/" or a file stem): <prefix>feas.pgm (8-bit, 255 =
/// feasible) and <prefix>qual.pgm (16-bit); reading takes the validity
/// mask from <prefix>entry.dmap.
void WriteSampleMaps(const std::string& prefix, const GraspMaps& maps);
GraspMaps ReadSampleMaps(const std::string& prefix);

}  // namespace shellkit
