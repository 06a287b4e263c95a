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

#include "shellkit/geometry.hpp"

namespace shellkit {

/// Minimum accepted ray parameter; hits closer than this are discarded.
inline constexpr double kRayTMin = 1e-9;
/// Hits along one ray closer together than this merge into one.
inline constexpr double kHitMergeEps = 1e-9;

/// Sorted parametric distances of all surface crossings along one ray,
/// duplicates within kHitMergeEps merged (strictly increasing afterwards).
/// For a unit direction the values are metric distances.
using RayHits = std::vector<double>;

/// Static bounding-volume hierarchy over a triangle mesh. Median split on
/// the longest box axis with ties to the lower axis index, leaves hold at
/// most 4 triangles; the build is deterministic, so identical meshes give
/// identical trees. The mesh is copied in; the tree never mutates after
/// construction and is safe for concurrent queries.
class Bvh {
 public:
  explicit Bvh(const TriangleMesh& mesh);

  /// All intersections of the ray with the surface. `dir` must be unit
  /// length within 1e-9. Uses a watertight ray-triangle test, so a ray
  /// through a shared edge reports one merged hit, not two.
  RayHits Intersect(const Vec3& origin, const Vec3& dir) const;

  /// As Intersect, but sorted without the duplicate merge: a ray through
  /// a shared edge or vertex reports every incident triangle separately.
  RayHits IntersectRaw(const Vec3& origin, const Vec3& dir) const;

  struct Node {
    Vec3 box_min, box_max;
    int left = -1, right = -1;
    int first = 0, count = 0;
  };
  const std::vector<Node>& Nodes() const { return nodes_; }
  const std::vector<int>& TriangleOrder() const { return order_; }

 private:
  int Build(int first, int count);

  std::vector<Vec3> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<Vec3> centroids_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Watertight hit test against one triangle: the parametric distance
/// t > kRayTMin of the crossing, or a negative value on miss. The exact
/// test the Bvh applies per triangle, exposed so exhaustive reference
/// sweeps can share the primitive while exercising their own traversal.
double IntersectTriangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                         const Vec3& b, const Vec3& c);

/// First/last hit depths per pixel ray (z-depth, meters). Pixels whose ray
/// misses the mesh are invalid in both layers.
ObjectShell ExtractShell(const TriangleMesh& mesh, const CameraModel& camera);

/// Depth of the first hit per pixel; identical to the entry layer of
/// ExtractShell by construction.
DepthImage RenderDepth(const TriangleMesh& mesh, const CameraModel& camera);

/// Fraction of occupied pixels whose ray crosses the surface more than
/// twice after merging — the rays for which a two-layer shell is lossy.
double MonotonicityReport(const TriangleMesh& mesh, const CameraModel& camera);

}  // namespace shellkit
