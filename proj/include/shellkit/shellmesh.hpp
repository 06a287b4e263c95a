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
#include <cstdint>
#include <vector>

#include "shellkit/geometry.hpp"

namespace shellkit {

/// Default adjacent-pixel depth gap (meters) above which layer surface is
/// considered discontinuous and left untriangulated.
inline constexpr double kDefaultDepthDiscontinuity = 0.02;

struct BinaryMask {
  int width = 0, height = 0;
  std::vector<uint8_t> data;

  BinaryMask() = default;
  BinaryMask(int w, int h) : width(w), height(h), data(size_t(w) * h, 0) {}

  uint8_t& At(int u, int v) { return data[size_t(v) * width + u]; }
  uint8_t At(int u, int v) const { return data[size_t(v) * width + u]; }
  /// Out-of-raster pixels read as background.
  bool ValidAt(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height && At(u, v) != 0;
  }
  int ValidCount() const {
    int n = 0;
    for (uint8_t d : data) n += d != 0;
    return n;
  }
  /// Foreground pixel with at least one background 8-neighbor (raster
  /// edges count as background).
  bool IsBoundary(int u, int v) const {
    if (!ValidAt(u, v)) return false;
    for (int dv = -1; dv <= 1; ++dv)
      for (int du = -1; du <= 1; ++du)
        if ((du || dv) && !ValidAt(u + du, v + dv)) return true;
    return false;
  }
};

BinaryMask MaskOf(const DepthImage& img);

/// Closed pixel loop; consecutive entries (and last to first) are
/// 8-neighbors. Outer loops run with positive image-space shoelace area
/// (interior on the right of travel when +Y points down); hole loops run
/// opposite.
struct BoundaryContour {
  std::vector<std::array<int, 2>> pixels;  // (u, v)
};

/// Moore-neighbor boundary tracing over the 8-connected foreground.
/// Returns one outer contour per connected component, each started at the
/// component's lexicographically smallest (v, u) pixel; deterministic.
/// With include_holes, contours around enclosed background regions are
/// appended (used to stitch walls across mask holes).
std::vector<BoundaryContour> TraceBoundary(const BinaryMask& mask,
                                           bool include_holes = false);

/// Every valid pixel of both layers backprojected; entry points first,
/// then exit points, each in raster order. 2 * |mask| points, no normals.
PointCloud ShellToPointcloud(const ObjectShell& shell);

enum class LayerWinding {
  kTowardCamera,  // entry layer: triangle normals have negative Z
  kAwayFromCamera
};

/// Per 2x2 block of valid pixels whose pairwise depth gaps stay below
/// depth_discontinuity: two triangles split along the down-right diagonal.
/// Blocks with exactly three valid pixels (same gap gating) emit the
/// single corner triangle, which keeps silhouette staircases sealed when
/// layers and boundary walls meet.
TriangleMesh TriangulateLayer(const DepthImage& layer, const CameraModel& camera,
                              double depth_discontinuity, LayerWinding winding);

/// Linear-time shell meshing: both layers triangulated (entry toward the
/// camera, exit away) plus two wall triangles per consecutive boundary
/// pair on every contour, holes included. Zero-area triangles are
/// dropped. Throws InvalidInput("empty shell") when the mask is empty.
TriangleMesh StitchShell(const ObjectShell& shell,
                         double depth_discontinuity = kDefaultDepthDiscontinuity);

struct VolumeCentroid {
  double volume = 0;   // signed, divergence theorem over the surface
  Vec3 centroid = Vec3::Zero();
  bool from_volume = false;  // false: |volume| < 1e-9, centroid is the
                             // area-weighted surface centroid instead
};

VolumeCentroid MeshVolumeCentroid(const TriangleMesh& mesh);

}  // namespace shellkit
