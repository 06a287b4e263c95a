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

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "shellkit/geometry.hpp"
#include "shellkit/raycast.hpp"

namespace shellkit::test {

/// Undirected edge usage over a triangle soup. A closed edge-manifold
/// surface uses every edge exactly twice, once in each direction.
struct EdgeAudit {
  int boundary = 0;     // edges used exactly once
  int nonmanifold = 0;  // edges used 3+ times or twice in the same direction
  int total = 0;

  bool Closed() const { return total > 0 && boundary == 0 && nonmanifold == 0; }
};

inline EdgeAudit AuditEdges(const TriangleMesh& mesh) {
  // key: packed (min, max) vertex pair; value: (forward, backward) counts
  // where forward means the directed edge runs min -> max.
  std::unordered_map<uint64_t, std::pair<int, int>> edges;
  edges.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      uint64_t key = (uint64_t(uint32_t(std::min(a, b))) << 32) | uint32_t(std::max(a, b));
      auto& use = edges[key];
      (a < b ? use.first : use.second)++;
    }
  }
  EdgeAudit audit;
  audit.total = int(edges.size());
  for (const auto& [key, use] : edges) {
    int uses = use.first + use.second;
    if (uses == 1)
      ++audit.boundary;
    else if (uses != 2 || use.first != 1 || use.second != 1)
      ++audit.nonmanifold;
  }
  return audit;
}

/// Exhaustive all-triangle hit list sharing the library's per-triangle
/// test; the reference for the accelerated traversal.
inline RayHits BruteForceHits(const TriangleMesh& mesh, const Vec3& origin,
                              const Vec3& dir) {
  RayHits hits;
  for (const auto& t : mesh.triangles) {
    double hit = IntersectTriangle(origin, dir, mesh.vertices[t[0]],
                                   mesh.vertices[t[1]], mesh.vertices[t[2]]);
    if (hit > 0) hits.push_back(hit);
  }
  std::sort(hits.begin(), hits.end());
  return hits;
}

/// Independent restatement of the duplicate-merge rule.
inline RayHits MergeHits(RayHits sorted) {
  RayHits merged;
  for (double t : sorted)
    if (merged.empty() || t - merged.back() > kHitMergeEps) merged.push_back(t);
  return merged;
}

/// Signed image-space shoelace area of a pixel loop ((u, v), +v down).
inline double ShoelaceArea(const std::vector<std::array<int, 2>>& loop) {
  double acc = 0;
  for (size_t i = 0; i < loop.size(); ++i) {
    const auto& p = loop[i];
    const auto& q = loop[(i + 1) % loop.size()];
    acc += double(p[0]) * q[1] - double(q[0]) * p[1];
  }
  return 0.5 * acc;
}

/// Metric length of a closed pixel loop (sum of step lengths).
inline double LoopLength(const std::vector<std::array<int, 2>>& loop) {
  double acc = 0;
  for (size_t i = 0; i < loop.size(); ++i) {
    const auto& p = loop[i];
    const auto& q = loop[(i + 1) % loop.size()];
    acc += std::hypot(double(q[0] - p[0]), double(q[1] - p[1]));
  }
  return acc;
}

/// Self-deleting scratch directory.
struct TempDir {
  std::string path;

  TempDir() {
    std::string tmpl = "/tmp/shellkit_test_XXXXXX";
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (!mkdtemp(buf.data())) throw std::runtime_error("mkdtemp failed");
    path = buf.data();
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string File(const std::string& name) const { return path + "/" + name; }
};

inline std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline TriangleMesh Translate(const TriangleMesh& mesh, const Vec3& offset) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v += offset;
  return out;
}

}  // namespace shellkit::test
