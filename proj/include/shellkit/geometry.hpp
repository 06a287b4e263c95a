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

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace shellkit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// Thrown on malformed or unreadable files; the CLI maps it to exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when input data violates a documented precondition; exit code 3.
struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown on bad command-line usage; exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Pinhole camera, no distortion. +Z is the optical axis into the scene,
/// +X right, +Y down. Integer pixel indices address ray sample points
/// directly: pixel (u, v) casts its ray through continuous image
/// coordinates (u, v).
struct CameraModel {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  CameraModel() = default;
  CameraModel(double fx_, double fy_, double cx_, double cy_, int w, int h)
      : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(w), height(h) {
    Validate();
  }

  void Validate() const {
    if (!(fx > 0) || !(fy > 0))
      throw InvalidInput("camera focal lengths must be positive");
    if (width <= 0 || height <= 0)
      throw InvalidInput("camera image size must be positive");
    if (!(cx > 0) || !(cx < width) || !(cy > 0) || !(cy < height))
      throw InvalidInput("camera principal point must lie inside the image");
  }

  struct Projection {
    double u, v, z;
  };

  Projection Project(const Vec3& p) const {
    if (!(p.z() > 0)) throw InvalidInput("behind camera");
    return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy, p.z()};
  }

  Vec3 Backproject(double u, double v, double z) const {
    if (!(z > 0)) throw InvalidInput("invalid depth");
    return {(u - cx) * z / fx, (v - cy) * z / fy, z};
  }

  /// Unit direction of the ray through image coordinates (u, v).
  Vec3 RayDir(double u, double v) const {
    Vec3 d((u - cx) / fx, (v - cy) / fy, 1.0);
    return d.normalized();
  }
};

/// Row-major raster of metric depths. Values <= 0 (and non-finite values)
/// mark invalid pixels.
struct DepthImage {
  int width = 0, height = 0;
  std::vector<float> data;

  DepthImage() = default;
  DepthImage(int w, int h) : width(w), height(h), data(size_t(w) * h, 0.0f) {
    if (w <= 0 || h <= 0) throw InvalidInput("depth image size must be positive");
  }

  size_t Index(int u, int v) const { return size_t(v) * width + u; }
  float& At(int u, int v) { return data[Index(u, v)]; }
  float At(int u, int v) const { return data[Index(u, v)]; }

  bool InBounds(int u, int v) const {
    return u >= 0 && u < width && v >= 0 && v < height;
  }
  bool Valid(int u, int v) const {
    float d = data[Index(u, v)];
    return d > 0.0f && std::isfinite(d);
  }
  /// Valid only if in bounds; out-of-raster pixels count as invalid.
  bool ValidAt(int u, int v) const { return InBounds(u, v) && Valid(u, v); }

  int ValidCount() const {
    int n = 0;
    for (float d : data)
      if (d > 0.0f && std::isfinite(d)) ++n;
    return n;
  }

  bool SameMask(const DepthImage& other) const {
    if (width != other.width || height != other.height) return false;
    for (size_t i = 0; i < data.size(); ++i) {
      bool a = data[i] > 0.0f && std::isfinite(data[i]);
      bool b = other.data[i] > 0.0f && std::isfinite(other.data[i]);
      if (a != b) return false;
    }
    return true;
  }
};

/// Paired first/last-intersection depth layers sharing one validity mask.
/// entry(u,v) <= exit(u,v) on every valid pixel; equality happens where the
/// surface is a single sheet along the ray.
struct ObjectShell {
  DepthImage entry, exit;
  CameraModel camera;

  void Validate() const {
    if (entry.width != exit.width || entry.height != exit.height)
      throw InvalidInput("shell layers must share dimensions");
    if (entry.width != camera.width || entry.height != camera.height)
      throw InvalidInput("shell layers must match the camera raster");
    if (!entry.SameMask(exit))
      throw InvalidInput("shell layers must share a validity mask");
    for (int v = 0; v < entry.height; ++v)
      for (int u = 0; u < entry.width; ++u)
        if (entry.Valid(u, v) && entry.At(u, v) > exit.At(u, v))
          throw InvalidInput("shell entry depth exceeds exit depth");
  }
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  bool Empty() const { return triangles.empty(); }
};

struct PointCloud {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // empty or one per point
};

/// Rigid transform p -> R * p + t.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 Apply(const Vec3& p) const { return rotation * p + translation; }

  void Validate() const {
    if ((rotation * rotation.transpose() - Mat3::Identity()).norm() > 1e-9)
      throw InvalidInput("pose rotation must be orthonormal");
    if (std::abs(rotation.determinant() - 1.0) > 1e-9)
      throw InvalidInput("pose rotation must be proper (det +1)");
  }
};

inline TriangleMesh TransformMesh(const TriangleMesh& mesh, const Pose& pose) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = pose.Apply(v);
  return out;
}

/// Axis-aligned bounds of a vertex set. Throws on empty input.
struct Aabb {
  Vec3 min, max;
  Vec3 Center() const { return 0.5 * (min + max); }
  Vec3 Extent() const { return max - min; }
};

inline Aabb BoundsOf(const std::vector<Vec3>& pts) {
  if (pts.empty()) throw InvalidInput("bounds of empty point set");
  Aabb b{pts[0], pts[0]};
  for (const auto& p : pts) {
    b.min = b.min.cwiseMin(p);
    b.max = b.max.cwiseMax(p);
  }
  return b;
}

}  // namespace shellkit
