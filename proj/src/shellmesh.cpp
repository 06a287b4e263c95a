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

#include "shellkit/shellmesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace shellkit {

BinaryMask MaskOf(const DepthImage& img) {
  BinaryMask mask(img.width, img.height);
  for (int v = 0; v < img.height; ++v)
    for (int u = 0; u < img.width; ++u)
      if (img.Valid(u, v)) mask.At(u, v) = 1;
  return mask;
}

namespace {

// Clockwise screen-order neighbor ring starting west; +Y points down.
// Scanning this ring from the backtrack cell traces outer contours with
// positive image-space shoelace area and hole contours with negative.
constexpr int kRing[8][2] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1},
                             {1, 0},  {1, 1},   {0, 1},  {-1, 1}};

int RingIndex(int du, int dv) {
  for (int i = 0; i < 8; ++i)
    if (kRing[i][0] == du && kRing[i][1] == dv) return i;
  return -1;
}

// One Moore step: scan the ring clockwise from the backtrack cell, move
// to the first foreground neighbor. Returns false for an isolated pixel.
bool MooreStep(const BinaryMask& mask, const std::array<int, 2>& c,
               const std::array<int, 2>& b, std::array<int, 2>* next,
               std::array<int, 2>* next_back) {
  int ib = RingIndex(b[0] - c[0], b[1] - c[1]);
  for (int k = 1; k <= 8; ++k) {
    const int* d = kRing[(ib + k) % 8];
    int nu = c[0] + d[0], nv = c[1] + d[1];
    if (mask.ValidAt(nu, nv)) {
      *next = {nu, nv};
      const int* pd = kRing[(ib + k - 1 + 8) % 8];
      *next_back = {c[0] + pd[0], c[1] + pd[1]};
      return true;
    }
  }
  return false;
}

// Moore-neighbor trace from `start` with initial backtrack cell `back`
// (a background 8-neighbor of start). Jacob's stopping criterion: stop on
// re-entering the start pixel when the move out of it repeats the
// contour's first move.
BoundaryContour MooreTrace(const BinaryMask& mask, std::array<int, 2> start,
                           std::array<int, 2> back) {
  BoundaryContour contour;
  contour.pixels.push_back(start);
  std::array<int, 2> c = start, b = back, next, next_b;
  if (!MooreStep(mask, c, b, &next, &next_b)) return contour;  // isolated pixel
  const std::array<int, 2> second = next;
  size_t guard = 8 * mask.data.size() + 8;
  while (guard-- > 0) {
    if (next == start) {
      std::array<int, 2> peek, peek_b;
      if (!MooreStep(mask, next, next_b, &peek, &peek_b)) break;
      if (peek == second) break;  // loop closed
    }
    contour.pixels.push_back(next);
    c = next;
    b = next_b;
    if (!MooreStep(mask, c, b, &next, &next_b)) break;
  }
  return contour;
}

std::vector<int> LabelComponents(const BinaryMask& mask, int* count) {
  std::vector<int> label(mask.data.size(), -1);
  int next = 0;
  std::deque<std::array<int, 2>> queue;
  for (int v = 0; v < mask.height; ++v)
    for (int u = 0; u < mask.width; ++u) {
      if (!mask.ValidAt(u, v) || label[size_t(v) * mask.width + u] >= 0) continue;
      int id = next++;
      label[size_t(v) * mask.width + u] = id;
      queue.push_back({u, v});
      while (!queue.empty()) {
        auto [cu, cv] = queue.front();
        queue.pop_front();
        for (const auto& d : kRing) {
          int nu = cu + d[0], nv = cv + d[1];
          if (mask.ValidAt(nu, nv) && label[size_t(nv) * mask.width + nu] < 0) {
            label[size_t(nv) * mask.width + nu] = id;
            queue.push_back({nu, nv});
          }
        }
      }
    }
  *count = next;
  return label;
}

// Labels background 4-components; those never touching the raster border
// are holes, reported by their raster-first pixel.
std::vector<int> LabelHoles(const BinaryMask& mask,
                            std::vector<std::array<int, 2>>* hole_tops) {
  std::vector<int> label(mask.data.size(), -1);
  std::deque<std::array<int, 2>> queue;
  int next = 0;
  constexpr int k4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (int v = 0; v < mask.height; ++v)
    for (int u = 0; u < mask.width; ++u) {
      size_t idx = size_t(v) * mask.width + u;
      if (mask.At(u, v) != 0 || label[idx] >= 0) continue;
      int id = next++;
      bool touches_border = false;
      label[idx] = id;
      queue.push_back({u, v});
      std::array<int, 2> top = {u, v};
      while (!queue.empty()) {
        auto [cu, cv] = queue.front();
        queue.pop_front();
        if (cu == 0 || cu == mask.width - 1 || cv == 0 || cv == mask.height - 1)
          touches_border = true;
        for (const auto& d : k4) {
          int nu = cu + d[0], nv = cv + d[1];
          if (nu < 0 || nu >= mask.width || nv < 0 || nv >= mask.height) continue;
          size_t nidx = size_t(nv) * mask.width + nu;
          if (mask.At(nu, nv) == 0 && label[nidx] < 0) {
            label[nidx] = id;
            queue.push_back({nu, nv});
          }
        }
      }
      if (!touches_border)
        hole_tops->push_back(top);  // BFS seed is the raster-first pixel
    }
  return label;
}

}  // namespace

std::vector<BoundaryContour> TraceBoundary(const BinaryMask& mask, bool include_holes) {
  std::vector<BoundaryContour> contours;
  int n_components = 0;
  std::vector<int> label = LabelComponents(mask, &n_components);
  std::vector<bool> traced(n_components, false);
  for (int v = 0; v < mask.height; ++v)
    for (int u = 0; u < mask.width; ++u) {
      if (!mask.ValidAt(u, v)) continue;
      int id = label[size_t(v) * mask.width + u];
      if (traced[id]) continue;
      traced[id] = true;
      // Raster-first pixel of the component: the cell to its west is
      // outside the component, a valid backtrack.
      contours.push_back(MooreTrace(mask, {u, v}, {u - 1, v}));
    }
  if (include_holes) {
    std::vector<std::array<int, 2>> hole_tops;
    LabelHoles(mask, &hole_tops);
    for (const auto& h : hole_tops) {
      // The pixel above a hole's raster-first pixel is foreground (a
      // background neighbor there would be 4-connected into the hole).
      std::array<int, 2> start = {h[0], h[1] - 1};
      contours.push_back(MooreTrace(mask, start, h));
    }
  }
  return contours;
}

PointCloud ShellToPointcloud(const ObjectShell& shell) {
  shell.Validate();
  PointCloud cloud;
  cloud.points.reserve(size_t(shell.entry.ValidCount()) * 2);
  for (const DepthImage* layer : {&shell.entry, &shell.exit})
    for (int v = 0; v < layer->height; ++v)
      for (int u = 0; u < layer->width; ++u)
        if (layer->Valid(u, v))
          cloud.points.push_back(shell.camera.Backproject(u, v, layer->At(u, v)));
  return cloud;
}

namespace {

// Emits layer triangles as pixel triples through `emit`; corner order per
// block is the screen-clockwise cycle A(u,v) B(u+1,v) D(u+1,v+1) C(u,v+1),
// which orients normals away from the camera; kTowardCamera reverses.
template <typename Emit>
void ForEachLayerTriangle(const DepthImage& layer, double discontinuity,
                          LayerWinding winding, Emit&& emit) {
  using Px = std::array<int, 2>;
  auto gap_ok = [&](const Px& a, const Px& b) {
    return std::abs(double(layer.At(a[0], a[1])) - double(layer.At(b[0], b[1]))) <
           discontinuity;
  };
  auto emit_oriented = [&](Px a, Px b, Px c) {
    if (winding == LayerWinding::kTowardCamera) std::swap(b, c);
    emit(a, b, c);
  };
  for (int v = 0; v + 1 < layer.height; ++v)
    for (int u = 0; u + 1 < layer.width; ++u) {
      Px cycle[4] = {{u, v}, {u + 1, v}, {u + 1, v + 1}, {u, v + 1}};
      int n_valid = 0, missing = -1;
      for (int i = 0; i < 4; ++i) {
        if (layer.Valid(cycle[i][0], cycle[i][1]))
          ++n_valid;
        else
          missing = i;
      }
      if (n_valid == 4) {
        bool ok = true;
        for (int i = 0; i < 4 && ok; ++i)
          for (int j = i + 1; j < 4 && ok; ++j)
            if (!gap_ok(cycle[i], cycle[j])) ok = false;
        if (!ok) continue;
        // Split along the down-right diagonal A-D.
        emit_oriented(cycle[0], cycle[1], cycle[2]);
        emit_oriented(cycle[0], cycle[2], cycle[3]);
      } else if (n_valid == 3) {
        Px tri[3];
        int k = 0;
        for (int i = 0; i < 4; ++i)
          if (i != missing) tri[k++] = cycle[i];
        if (gap_ok(tri[0], tri[1]) && gap_ok(tri[1], tri[2]) && gap_ok(tri[0], tri[2]))
          emit_oriented(tri[0], tri[1], tri[2]);
      }
    }
}

double TriangleAreaSq(const Vec3& a, const Vec3& b, const Vec3& c) {
  return (b - a).cross(c - a).squaredNorm();
}

}  // namespace

TriangleMesh TriangulateLayer(const DepthImage& layer, const CameraModel& camera,
                              double depth_discontinuity, LayerWinding winding) {
  if (layer.width != camera.width || layer.height != camera.height)
    throw InvalidInput("layer does not match camera raster");
  if (!(depth_discontinuity > 0)) throw InvalidInput("depth discontinuity must be positive");

  std::vector<int> vid(layer.data.size(), -1);
  TriangleMesh mesh;
  auto vertex_of = [&](const std::array<int, 2>& p) {
    size_t idx = layer.Index(p[0], p[1]);
    if (vid[idx] < 0) {
      vid[idx] = int(mesh.vertices.size());
      mesh.vertices.push_back(camera.Backproject(p[0], p[1], layer.At(p[0], p[1])));
    }
    return vid[idx];
  };
  ForEachLayerTriangle(layer, depth_discontinuity, winding,
                       [&](const auto& a, const auto& b, const auto& c) {
                         int ia = vertex_of(a), ib = vertex_of(b), ic = vertex_of(c);
                         if (TriangleAreaSq(mesh.vertices[ia], mesh.vertices[ib],
                                            mesh.vertices[ic]) > 0)
                           mesh.triangles.push_back({ia, ib, ic});
                       });
  return mesh;
}

TriangleMesh StitchShell(const ObjectShell& shell, double depth_discontinuity) {
  shell.Validate();
  if (!(depth_discontinuity > 0)) throw InvalidInput("depth discontinuity must be positive");
  BinaryMask mask = MaskOf(shell.entry);
  if (mask.ValidCount() == 0) throw InvalidInput("empty shell");

  const CameraModel& cam = shell.camera;
  TriangleMesh mesh;
  std::vector<int> entry_vid(mask.data.size(), -1), exit_vid(mask.data.size(), -1);
  auto vertex_of = [&](std::vector<int>& vid, const DepthImage& layer, int u, int v) {
    size_t idx = layer.Index(u, v);
    if (vid[idx] < 0) {
      vid[idx] = int(mesh.vertices.size());
      mesh.vertices.push_back(cam.Backproject(u, v, layer.At(u, v)));
    }
    return vid[idx];
  };
  auto add_triangle = [&](int a, int b, int c) {
    if (a == b || b == c || a == c) return;
    if (TriangleAreaSq(mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]) <= 0) return;
    mesh.triangles.push_back({a, b, c});
  };

  ForEachLayerTriangle(shell.entry, depth_discontinuity, LayerWinding::kTowardCamera,
                       [&](const auto& a, const auto& b, const auto& c) {
                         add_triangle(vertex_of(entry_vid, shell.entry, a[0], a[1]),
                                      vertex_of(entry_vid, shell.entry, b[0], b[1]),
                                      vertex_of(entry_vid, shell.entry, c[0], c[1]));
                       });
  ForEachLayerTriangle(shell.exit, depth_discontinuity, LayerWinding::kAwayFromCamera,
                       [&](const auto& a, const auto& b, const auto& c) {
                         add_triangle(vertex_of(exit_vid, shell.exit, a[0], a[1]),
                                      vertex_of(exit_vid, shell.exit, b[0], b[1]),
                                      vertex_of(exit_vid, shell.exit, c[0], c[1]));
                       });

  // Walls: contour travels with the object interior on its right, so
  // (entry_i, entry_j, exit_i) / (entry_j, exit_j, exit_i) face outward.
  for (const BoundaryContour& contour : TraceBoundary(mask, /*include_holes=*/true)) {
    size_t n = contour.pixels.size();
    if (n < 2) continue;
    for (size_t i = 0; i < n; ++i) {
      const auto& pi = contour.pixels[i];
      const auto& pj = contour.pixels[(i + 1) % n];
      int ei = vertex_of(entry_vid, shell.entry, pi[0], pi[1]);
      int ej = vertex_of(entry_vid, shell.entry, pj[0], pj[1]);
      int xi = vertex_of(exit_vid, shell.exit, pi[0], pi[1]);
      int xj = vertex_of(exit_vid, shell.exit, pj[0], pj[1]);
      add_triangle(ei, ej, xi);
      add_triangle(ej, xj, xi);
    }
  }
  return mesh;
}

VolumeCentroid MeshVolumeCentroid(const TriangleMesh& mesh) {
  if (mesh.triangles.empty()) throw InvalidInput("volume of empty mesh");
  double volume = 0;
  Vec3 moment = Vec3::Zero();
  double area = 0;
  Vec3 area_moment = Vec3::Zero();
  for (const auto& t : mesh.triangles) {
    const Vec3 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
    double v6 = a.dot(b.cross(c));  // 6x signed tetra volume against origin
    volume += v6 / 6.0;
    moment += (v6 / 6.0) * (a + b + c) / 4.0;
    double tri_area = 0.5 * (b - a).cross(c - a).norm();
    area += tri_area;
    area_moment += tri_area * (a + b + c) / 3.0;
  }
  VolumeCentroid result;
  result.volume = volume;
  if (std::abs(volume) >= 1e-9) {
    result.centroid = moment / volume;
    result.from_volume = true;
  } else {
    result.centroid = area > 0 ? Vec3(area_moment / area) : Vec3::Zero();
    result.from_volume = false;
  }
  return result;
}

}  // namespace shellkit
