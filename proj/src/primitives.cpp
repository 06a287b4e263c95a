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

#include "shellkit/primitives.hpp"

#include <cmath>
#include <map>

namespace shellkit {

TriangleMesh MakeBox(const Vec3& size, int subdiv) {
  if (!(size.minCoeff() > 0)) throw InvalidInput("box size must be positive");
  if (subdiv < 1) throw InvalidInput("box subdiv must be >= 1");
  TriangleMesh mesh;
  Vec3 half = 0.5 * size;
  const int n = subdiv;

  // All faces draw vertices from one (n+1)^3 surface lattice, so seam
  // vertices are shared and the mesh is combinatorially closed.
  std::map<std::array<int, 3>, int> lattice;
  auto vertex_at = [&](const std::array<int, 3>& g) {
    auto it = lattice.find(g);
    if (it != lattice.end()) return it->second;
    int idx = int(mesh.vertices.size());
    mesh.vertices.emplace_back(size.x() * (double(g[0]) / n) - half.x(),
                               size.y() * (double(g[1]) / n) - half.y(),
                               size.z() * (double(g[2]) / n) - half.z());
    lattice.emplace(g, idx);
    return idx;
  };

  // One face per call: a lattice corner plus two signed lattice axes,
  // ordered so axis_u x axis_v points outward.
  auto add_face = [&](std::array<int, 3> origin, int au, int su, int av, int sv) {
    auto at = [&](int i, int j) {
      std::array<int, 3> g = origin;
      g[au] += su * i;
      g[av] += sv * j;
      return vertex_at(g);
    };
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        mesh.triangles.push_back({at(i, j), at(i + 1, j), at(i + 1, j + 1)});
        mesh.triangles.push_back({at(i, j), at(i + 1, j + 1), at(i, j + 1)});
      }
  };

  add_face({0, 0, n}, 0, +1, 1, +1);  // +Z
  add_face({n, 0, 0}, 0, -1, 1, +1);  // -Z
  add_face({n, 0, n}, 2, -1, 1, +1);  // +X
  add_face({0, 0, 0}, 2, +1, 1, +1);  // -X
  add_face({0, n, n}, 0, +1, 2, -1);  // +Y
  add_face({0, 0, 0}, 0, +1, 2, +1);  // -Y
  return mesh;
}

TriangleMesh MakeCylinder(double radius, double height, int radial_segments,
                          int height_segments) {
  if (!(radius > 0) || !(height > 0)) throw InvalidInput("cylinder size must be positive");
  if (radial_segments < 3) throw InvalidInput("cylinder needs >= 3 radial segments");
  if (height_segments < 1) throw InvalidInput("cylinder needs >= 1 height segment");
  TriangleMesh mesh;
  int nr = radial_segments, nh = height_segments;
  double h0 = -0.5 * height;

  // Wall rings bottom to top.
  for (int j = 0; j <= nh; ++j) {
    double z = h0 + height * double(j) / nh;
    for (int i = 0; i < nr; ++i) {
      double a = 2.0 * M_PI * double(i) / nr;
      mesh.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), z);
    }
  }
  auto ring = [&](int j, int i) { return j * nr + (i % nr); };
  for (int j = 0; j < nh; ++j)
    for (int i = 0; i < nr; ++i) {
      mesh.triangles.push_back({ring(j, i), ring(j, i + 1), ring(j + 1, i + 1)});
      mesh.triangles.push_back({ring(j, i), ring(j + 1, i + 1), ring(j + 1, i)});
    }

  // Caps as fans around center vertices.
  int bottom_center = int(mesh.vertices.size());
  mesh.vertices.emplace_back(0, 0, h0);
  int top_center = int(mesh.vertices.size());
  mesh.vertices.emplace_back(0, 0, h0 + height);
  for (int i = 0; i < nr; ++i) {
    mesh.triangles.push_back({bottom_center, ring(0, i + 1), ring(0, i)});
    mesh.triangles.push_back({top_center, ring(nh, i), ring(nh, i + 1)});
  }
  return mesh;
}

TriangleMesh MakeIcosphere(double radius, int level) {
  if (!(radius > 0)) throw InvalidInput("sphere radius must be positive");
  if (level < 0 || level > 8) throw InvalidInput("icosphere level out of range");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.vertices = {{-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0},
                   {0, -1, t}, {0, 1, t},  {0, -1, -t}, {0, 1, -t},
                   {t, 0, -1}, {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1}};
  mesh.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                    {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                    {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                    {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

  for (int l = 0; l < level; ++l) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      int idx = int(mesh.vertices.size());
      mesh.vertices.push_back(0.5 * (mesh.vertices[a] + mesh.vertices[b]));
      midpoint.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& tr : mesh.triangles) {
      int ab = mid(tr[0], tr[1]), bc = mid(tr[1], tr[2]), ca = mid(tr[2], tr[0]);
      next.push_back({tr[0], ab, ca});
      next.push_back({tr[1], bc, ab});
      next.push_back({tr[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }
  for (auto& v : mesh.vertices) v = v.normalized() * radius;
  return mesh;
}

}  // namespace shellkit
