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

#include "shellkit/raycast.hpp"

#include <algorithm>
#include <cmath>

namespace shellkit {

namespace {

// Watertight ray-triangle intersection (Woop, Benthin, Wald 2013). The
// shear onto the dominant ray axis makes edge tests exact at shared
// edges: a ray through an edge hits both adjacent triangles at the same
// parameter, which the per-ray merge then collapses.
struct RayFrame {
  int kx, ky, kz;
  double sx, sy, sz;
  Vec3 origin;

  RayFrame(const Vec3& o, const Vec3& d) : origin(o) {
    kz = 0;
    if (std::abs(d.y()) > std::abs(d[kz])) kz = 1;
    if (std::abs(d.z()) > std::abs(d[kz])) kz = 2;
    kx = (kz + 1) % 3;
    ky = (kx + 1) % 3;
    if (d[kz] < 0) std::swap(kx, ky);
    sx = d[kx] / d[kz];
    sy = d[ky] / d[kz];
    sz = 1.0 / d[kz];
  }

  // Returns the hit parameter t > tmin, or a negative value on miss.
  double Intersect(const Vec3& va, const Vec3& vb, const Vec3& vc, double tmin) const {
    Vec3 a = va - origin, b = vb - origin, c = vc - origin;
    double ax = a[kx] - sx * a[kz], ay = a[ky] - sy * a[kz];
    double bx = b[kx] - sx * b[kz], by = b[ky] - sy * b[kz];
    double cx = c[kx] - sx * c[kz], cy = c[ky] - sy * c[kz];

    double u = cx * by - cy * bx;
    double v = ax * cy - ay * cx;
    double w = bx * ay - by * ax;
    if ((u < 0 || v < 0 || w < 0) && (u > 0 || v > 0 || w > 0)) return -1;
    double det = u + v + w;
    if (det == 0) return -1;

    double az = sz * a[kz], bz = sz * b[kz], cz = sz * c[kz];
    double t = (u * az + v * bz + w * cz) / det;
    return t > tmin ? t : -1;
  }
};

bool RayHitsBox(const Vec3& o, const Vec3& inv_dir, const Vec3& bmin, const Vec3& bmax,
                double tmin) {
  double t0 = tmin, t1 = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    double n = (bmin[a] - o[a]) * inv_dir[a];
    double f = (bmax[a] - o[a]) * inv_dir[a];
    if (n > f) std::swap(n, f);
    // NaN from 0 * inf means the ray is parallel inside the slab; the
    // comparisons below ignore it, which keeps the test conservative.
    if (n == n) t0 = std::max(t0, n);
    if (f == f) t1 = std::min(t1, f);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

Bvh::Bvh(const TriangleMesh& mesh)
    : vertices_(mesh.vertices), triangles_(mesh.triangles) {
  if (triangles_.empty()) throw InvalidInput("bvh over empty mesh");
  for (const auto& t : triangles_)
    for (int i : t)
      if (i < 0 || size_t(i) >= vertices_.size())
        throw InvalidInput("bvh mesh has out-of-range triangle index");
  centroids_.reserve(triangles_.size());
  for (const auto& t : triangles_)
    centroids_.push_back((vertices_[t[0]] + vertices_[t[1]] + vertices_[t[2]]) / 3.0);
  order_.resize(triangles_.size());
  for (size_t i = 0; i < order_.size(); ++i) order_[i] = int(i);
  nodes_.reserve(2 * triangles_.size() / 4 + 2);
  root_ = Build(0, int(triangles_.size()));
  centroids_.clear();
  centroids_.shrink_to_fit();
}

int Bvh::Build(int first, int count) {
  Node node;
  {
    const auto& t0 = triangles_[order_[first]];
    node.box_min = node.box_max = vertices_[t0[0]];
  }
  for (int i = first; i < first + count; ++i)
    for (int vi : triangles_[order_[i]]) {
      node.box_min = node.box_min.cwiseMin(vertices_[vi]);
      node.box_max = node.box_max.cwiseMax(vertices_[vi]);
    }
  int id = int(nodes_.size());
  nodes_.push_back(node);
  if (count <= 4) {
    nodes_[id].first = first;
    nodes_[id].count = count;
    return id;
  }
  // Longest axis of the node box; ties break to the lower axis index.
  Vec3 extent = node.box_max - node.box_min;
  int axis = 0;
  if (extent.y() > extent[axis]) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;
  int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid,
                   order_.begin() + first + count, [&](int a, int b) {
                     double pa = centroids_[a][axis], pb = centroids_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  int left = Build(first, mid - first);
  int right = Build(mid, first + count - mid);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

RayHits Bvh::IntersectRaw(const Vec3& origin, const Vec3& dir) const {
  if (std::abs(dir.norm() - 1.0) > 1e-9)
    throw InvalidInput("ray direction must be unit length");
  RayFrame frame(origin, dir);
  Vec3 inv_dir(1.0 / dir.x(), 1.0 / dir.y(), 1.0 / dir.z());

  RayHits raw;
  int stack[128];
  int top = 0;
  stack[top++] = root_;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (!RayHitsBox(origin, inv_dir, n.box_min, n.box_max, kRayTMin)) continue;
    if (n.left < 0) {
      for (int i = n.first; i < n.first + n.count; ++i) {
        const auto& t = triangles_[order_[i]];
        double hit = frame.Intersect(vertices_[t[0]], vertices_[t[1]], vertices_[t[2]],
                                     kRayTMin);
        if (hit > 0) raw.push_back(hit);
      }
      continue;
    }
    stack[top++] = n.right;
    stack[top++] = n.left;
  }

  std::sort(raw.begin(), raw.end());
  return raw;
}

RayHits Bvh::Intersect(const Vec3& origin, const Vec3& dir) const {
  RayHits raw = IntersectRaw(origin, dir);
  RayHits merged;
  merged.reserve(raw.size());
  for (double t : raw)
    if (merged.empty() || t - merged.back() > kHitMergeEps) merged.push_back(t);
  return merged;
}

double IntersectTriangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                         const Vec3& b, const Vec3& c) {
  return RayFrame(origin, dir).Intersect(a, b, c, kRayTMin);
}

namespace {

// Shared worker: per-pixel merged hits feed entry/exit and the
// monotonicity statistic in one pass.
template <typename Fn>
void ForEachPixelHits(const TriangleMesh& mesh, const CameraModel& camera, Fn&& fn) {
  camera.Validate();
  Bvh bvh(mesh);
  Vec3 origin = Vec3::Zero();
  for (int v = 0; v < camera.height; ++v)
    for (int u = 0; u < camera.width; ++u) {
      Vec3 dir = camera.RayDir(u, v);
      RayHits hits = bvh.Intersect(origin, dir);
      fn(u, v, dir, hits);
    }
}

}  // namespace

ObjectShell ExtractShell(const TriangleMesh& mesh, const CameraModel& camera) {
  ObjectShell shell;
  shell.camera = camera;
  shell.entry = DepthImage(camera.width, camera.height);
  shell.exit = DepthImage(camera.width, camera.height);
  ForEachPixelHits(mesh, camera, [&](int u, int v, const Vec3& dir, const RayHits& hits) {
    if (hits.empty()) return;
    shell.entry.At(u, v) = float(hits.front() * dir.z());
    shell.exit.At(u, v) = float(hits.back() * dir.z());
  });
  return shell;
}

DepthImage RenderDepth(const TriangleMesh& mesh, const CameraModel& camera) {
  return ExtractShell(mesh, camera).entry;
}

double MonotonicityReport(const TriangleMesh& mesh, const CameraModel& camera) {
  long occupied = 0, violating = 0;
  ForEachPixelHits(mesh, camera, [&](int, int, const Vec3&, const RayHits& hits) {
    if (hits.empty()) return;
    ++occupied;
    if (hits.size() > 2) ++violating;
  });
  return occupied == 0 ? 0.0 : double(violating) / double(occupied);
}

}  // namespace shellkit
