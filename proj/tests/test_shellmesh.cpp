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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "shellkit/primitives.hpp"
#include "shellkit/raycast.hpp"
#include "shellkit/shellmesh.hpp"
#include "shellkit/spatial.hpp"
#include "test_support.hpp"

using namespace shellkit;
using namespace shellkit::test;

namespace {

BinaryMask MaskFromPixels(int w, int h, const std::set<std::array<int, 2>>& px) {
  BinaryMask mask(w, h);
  for (const auto& p : px) mask.At(p[0], p[1]) = 1;
  return mask;
}

// Constant-depth slab shell over a rectangular mask with an optional
// rectangular hole; entry and exit planes at fixed depths. Ranges are
// inclusive pixel bounds.
ObjectShell SlabShell(const CameraModel& cam, int u0, int u1, int v0, int v1,
                      float z_entry, float z_exit, int hu0 = 1, int hu1 = 0,
                      int hv0 = 1, int hv1 = 0) {
  ObjectShell shell;
  shell.camera = cam;
  shell.entry = DepthImage(cam.width, cam.height);
  shell.exit = DepthImage(cam.width, cam.height);
  for (int v = v0; v <= v1; ++v)
    for (int u = u0; u <= u1; ++u) {
      if (u >= hu0 && u <= hu1 && v >= hv0 && v <= hv1) continue;
      shell.entry.At(u, v) = z_entry;
      shell.exit.At(u, v) = z_exit;
    }
  return shell;
}

size_t ContourSteps(const BinaryMask& mask) {
  size_t steps = 0;
  for (const auto& c : TraceBoundary(mask, /*include_holes=*/true))
    steps += c.pixels.size();
  return steps;
}

}  // namespace

TEST_CASE("mask marks exactly the valid pixels") {
  DepthImage img(4, 3);
  img.At(1, 0) = 0.5f;
  img.At(2, 2) = 1.25f;
  img.At(3, 1) = -1.0f;  // invalid
  BinaryMask mask = MaskOf(img);
  CHECK(mask.ValidCount() == 2);
  CHECK(mask.At(1, 0) == 1);
  CHECK(mask.At(2, 2) == 1);
  CHECK(mask.At(3, 1) == 0);
  CHECK(mask.IsBoundary(1, 0));
  CHECK_FALSE(mask.IsBoundary(0, 0));
  CHECK_FALSE(mask.ValidAt(-1, 0));
  CHECK_FALSE(mask.ValidAt(0, 3));
}

TEST_CASE("contour of an isolated pixel is that pixel") {
  BinaryMask mask = MaskFromPixels(6, 6, {{2, 3}});
  auto contours = TraceBoundary(mask);
  REQUIRE(contours.size() == 1);
  REQUIRE(contours[0].pixels.size() == 1);
  CHECK(contours[0].pixels[0] == std::array<int, 2>{2, 3});
}

TEST_CASE("contour of a two-pixel domino visits both pixels once") {
  BinaryMask mask = MaskFromPixels(6, 6, {{2, 2}, {3, 2}});
  auto contours = TraceBoundary(mask);
  REQUIRE(contours.size() == 1);
  REQUIRE(contours[0].pixels.size() == 2);
  CHECK(contours[0].pixels[0] == std::array<int, 2>{2, 2});
  CHECK(contours[0].pixels[1] == std::array<int, 2>{3, 2});
}

TEST_CASE("contour of a filled square runs clockwise around its rim") {
  BinaryMask mask(6, 6);
  for (int v = 1; v <= 3; ++v)
    for (int u = 1; u <= 3; ++u) mask.At(u, v) = 1;
  auto contours = TraceBoundary(mask);
  REQUIRE(contours.size() == 1);
  const auto& px = contours[0].pixels;
  std::vector<std::array<int, 2>> want = {{1, 1}, {2, 1}, {3, 1}, {3, 2},
                                          {3, 3}, {2, 3}, {1, 3}, {1, 2}};
  CHECK(px == want);
  CHECK(ShoelaceArea(px) > 0);  // outer loop: positive image-space area
  for (const auto& p : px) CHECK(p != std::array<int, 2>{2, 2});
}

TEST_CASE("separate components get separate contours") {
  BinaryMask mask(12, 6);
  for (int v = 1; v <= 2; ++v)
    for (int u = 1; u <= 2; ++u) mask.At(u, v) = 1;
  for (int v = 2; v <= 4; ++v)
    for (int u = 7; u <= 9; ++u) mask.At(u, v) = 1;
  auto contours = TraceBoundary(mask);
  REQUIRE(contours.size() == 2);
  // Started at each component's raster-first pixel.
  CHECK(contours[0].pixels[0] == std::array<int, 2>{1, 1});
  CHECK(contours[1].pixels[0] == std::array<int, 2>{7, 2});
  CHECK(contours[0].pixels.size() == 4);
  CHECK(contours[1].pixels.size() == 8);
}

TEST_CASE("disc contour length approximates its circumference") {
  const int r = 50, c = 60;
  BinaryMask mask(121, 121);
  for (int v = 0; v < 121; ++v)
    for (int u = 0; u < 121; ++u)
      if ((u - c) * (u - c) + (v - c) * (v - c) <= r * r) mask.At(u, v) = 1;
  auto contours = TraceBoundary(mask);
  REQUIRE(contours.size() == 1);
  double len = LoopLength(contours[0].pixels);
  double circumference = 2.0 * M_PI * r;
  CHECK(len == doctest::Approx(circumference).epsilon(0.10));
  // Contour pixels are distinct boundary pixels. (The converse fails:
  // the trace cuts staircase corners, skipping some 8-boundary pixels.)
  std::set<std::array<int, 2>> on_contour(contours[0].pixels.begin(),
                                          contours[0].pixels.end());
  CHECK(on_contour.size() == contours[0].pixels.size());
  for (const auto& p : on_contour) CHECK(mask.IsBoundary(p[0], p[1]));
}

TEST_CASE("hole contours appear only when requested and run opposite") {
  BinaryMask mask(40, 30);
  for (int v = 5; v <= 24; ++v)
    for (int u = 5; u <= 34; ++u) mask.At(u, v) = 1;
  for (int v = 12; v <= 17; ++v)
    for (int u = 15; u <= 24; ++u) mask.At(u, v) = 0;

  auto outer_only = TraceBoundary(mask, /*include_holes=*/false);
  REQUIRE(outer_only.size() == 1);
  CHECK(outer_only[0].pixels.size() == 96);  // 2*(30+20) - 4 rim pixels
  CHECK(ShoelaceArea(outer_only[0].pixels) > 0);

  auto with_holes = TraceBoundary(mask, /*include_holes=*/true);
  REQUIRE(with_holes.size() == 2);
  CHECK(with_holes[0].pixels == outer_only[0].pixels);
  const auto& hole = with_holes[1].pixels;
  // The rim of the 12x8 pixel ring around the hole, minus the four
  // corner pixels the trace cuts diagonally.
  CHECK(hole.size() == 32);
  CHECK(ShoelaceArea(hole) < 0);
  for (const auto& p : hole) {
    CHECK(mask.ValidAt(p[0], p[1]));
    bool touches_hole = false;
    for (int dv = -1; dv <= 1; ++dv)
      for (int du = -1; du <= 1; ++du) {
        int nu = p[0] + du, nv = p[1] + dv;
        if (nu >= 15 && nu <= 24 && nv >= 12 && nv <= 17) touches_hole = true;
      }
    CHECK(touches_hole);
  }
}

TEST_CASE("single-pixel hole traces a diamond") {
  BinaryMask mask(7, 7);
  for (int v = 1; v <= 5; ++v)
    for (int u = 1; u <= 5; ++u) mask.At(u, v) = 1;
  mask.At(3, 3) = 0;
  auto contours = TraceBoundary(mask, /*include_holes=*/true);
  REQUIRE(contours.size() == 2);
  std::vector<std::array<int, 2>> want = {{3, 2}, {2, 3}, {3, 4}, {4, 3}};
  CHECK(contours[1].pixels == want);
  CHECK(ShoelaceArea(contours[1].pixels) < 0);
}

TEST_CASE("an open notch is not a hole") {
  // C shape: the cavity's background is 4-connected to the raster border.
  BinaryMask mask(12, 12);
  for (int v = 2; v <= 9; ++v)
    for (int u = 2; u <= 9; ++u) mask.At(u, v) = 1;
  for (int v = 4; v <= 7; ++v)
    for (int u = 4; u <= 11; ++u) mask.At(u, v) = 0;  // notch open to the right
  auto contours = TraceBoundary(mask, /*include_holes=*/true);
  CHECK(contours.size() == 1);
}

TEST_CASE("shell pointcloud lists entry then exit in raster order") {
  CameraModel cam(100, 100, 3.5, 2.5, 8, 6);
  ObjectShell shell = SlabShell(cam, 2, 4, 1, 3, 0.5f, 0.75f);
  PointCloud cloud = ShellToPointcloud(shell);
  REQUIRE(cloud.points.size() == 18);  // 9 valid pixels, two layers
  REQUIRE(cloud.normals.empty());
  // First point: raster-first valid pixel (2,1) on the entry layer.
  Vec3 expect = cam.Backproject(2, 1, 0.5f);
  CHECK((cloud.points[0] - expect).norm() == 0.0);
  // Entry block precedes exit block.
  for (int i = 0; i < 9; ++i) {
    CHECK(cloud.points[i].z() == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(cloud.points[9 + i].z() == doctest::Approx(0.75).epsilon(1e-6));
  }
}

TEST_CASE("sphere shell pointcloud lies on the sphere") {
  const Vec3 center(0, 0, 0.75);
  TriangleMesh sphere = MakeIcosphere(0.05, 4);
  for (auto& v : sphere.vertices) v += center;
  CameraModel cam(400, 400, 79.5, 59.5, 160, 120);
  ObjectShell shell = ExtractShell(sphere, cam);
  PointCloud cloud = ShellToPointcloud(shell);
  REQUIRE(cloud.points.size() > 2000);
  for (const auto& p : cloud.points)
    CHECK(std::abs((p - center).norm() - 0.05) < 1e-4);
}

TEST_CASE("layer triangulation covers a full grid with shared vertices") {
  CameraModel cam(100, 100, 3.0, 2.0, 7, 5);
  DepthImage layer(7, 5);
  for (auto& d : layer.data) d = 0.5f;
  TriangleMesh toward = TriangulateLayer(layer, cam, 0.02, LayerWinding::kTowardCamera);
  CHECK(toward.triangles.size() == 2 * 6 * 4);
  CHECK(toward.vertices.size() == 35);
  for (const auto& t : toward.triangles) {
    Vec3 n = (toward.vertices[t[1]] - toward.vertices[t[0]])
                 .cross(toward.vertices[t[2]] - toward.vertices[t[0]]);
    CHECK(n.z() < 0.0);
  }
  TriangleMesh away = TriangulateLayer(layer, cam, 0.02, LayerWinding::kAwayFromCamera);
  REQUIRE(away.triangles.size() == toward.triangles.size());
  for (const auto& t : away.triangles) {
    Vec3 n = (away.vertices[t[1]] - away.vertices[t[0]])
                 .cross(away.vertices[t[2]] - away.vertices[t[0]]);
    CHECK(n.z() > 0.0);
  }
}

TEST_CASE("layer triangulation stops at depth discontinuities") {
  CameraModel cam(100, 100, 1.5, 1.5, 4, 4);
  DepthImage layer(4, 4);
  for (int v = 0; v < 4; ++v)
    for (int u = 0; u < 4; ++u) layer.At(u, v) = u <= 1 ? 0.5f : 0.9f;
  TriangleMesh mesh = TriangulateLayer(layer, cam, 0.02, LayerWinding::kTowardCamera);
  // Only the one all-left and one all-right block column survive.
  CHECK(mesh.triangles.size() == 2 * 2 * 3);
  for (const auto& t : mesh.triangles) {
    float z0 = float(mesh.vertices[t[0]].z());
    CHECK(float(mesh.vertices[t[1]].z()) == z0);
    CHECK(float(mesh.vertices[t[2]].z()) == z0);
  }
}

TEST_CASE("blocks with three valid pixels emit the corner triangle") {
  CameraModel cam(100, 100, 0.5, 0.5, 2, 2);
  DepthImage layer(2, 2);
  layer.At(0, 0) = layer.At(1, 0) = layer.At(0, 1) = 0.5f;
  TriangleMesh three = TriangulateLayer(layer, cam, 0.02, LayerWinding::kTowardCamera);
  CHECK(three.triangles.size() == 1);
  layer.At(1, 1) = 0.5f;
  TriangleMesh four = TriangulateLayer(layer, cam, 0.02, LayerWinding::kTowardCamera);
  CHECK(four.triangles.size() == 2);
  layer.At(1, 1) = 0.0f;
  layer.At(0, 1) = 0.0f;
  TriangleMesh two = TriangulateLayer(layer, cam, 0.02, LayerWinding::kTowardCamera);
  CHECK(two.triangles.size() == 0);
}

TEST_CASE("layer triangulation validates its inputs") {
  CameraModel cam(100, 100, 1.5, 1.5, 4, 4);
  DepthImage layer(3, 4);
  CHECK_THROWS_AS(TriangulateLayer(layer, cam, 0.02, LayerWinding::kTowardCamera),
                  InvalidInput);
  DepthImage ok(4, 4);
  CHECK_THROWS_AS(TriangulateLayer(ok, cam, 0.0, LayerWinding::kTowardCamera),
                  InvalidInput);
}

TEST_CASE("stitched slab with a hole is closed with exact frustum volume") {
  CameraModel cam(100, 100, 19.5, 14.5, 40, 30);
  const float z1 = 0.5f, z2 = 0.6f;
  ObjectShell shell = SlabShell(cam, 5, 34, 5, 24, z1, z2, 15, 24, 12, 17);
  TriangleMesh mesh = StitchShell(shell);

  EdgeAudit audit = AuditEdges(mesh);
  CHECK(audit.Closed());

  // The stitched solid is exactly the cone frustum over the contour
  // polygons: outer rim 29x19 px^2 minus the octagonal hole rim (the
  // 11x7 px^2 rectangle with four corners cut, 0.5 px^2 each).
  double cap_px = 29.0 * 19.0 - (11.0 * 7.0 - 2.0);
  double za = double(z1), zb = double(z2);
  double want_volume = cap_px * (zb * zb * zb - za * za * za) / (3.0 * cam.fx * cam.fy);
  VolumeCentroid vc = MeshVolumeCentroid(mesh);
  CHECK(vc.from_volume);
  CHECK(vc.volume == doctest::Approx(want_volume).epsilon(1e-12));
  // Depth centroid of a cone frustum, independent of the cross-section.
  double want_z = 0.75 * (zb * zb * zb * zb - za * za * za * za) /
                  (zb * zb * zb - za * za * za);
  CHECK(vc.centroid.z() == doctest::Approx(want_z).epsilon(1e-9));
}

TEST_CASE("stitched sphere shell is closed and matches the source volume") {
  const Vec3 center(0, 0, 0.75);
  TriangleMesh sphere = MakeIcosphere(0.05, 4);
  for (auto& v : sphere.vertices) v += center;
  CameraModel cam(400, 400, 79.5, 59.5, 160, 120);
  ObjectShell shell = ExtractShell(sphere, cam);
  TriangleMesh stitched = StitchShell(shell);

  CHECK(AuditEdges(stitched).Closed());
  for (const auto& p : stitched.vertices)
    CHECK(std::abs((p - center).norm() - 0.05) < 1e-4);

  VolumeCentroid got = MeshVolumeCentroid(stitched);
  VolumeCentroid want = MeshVolumeCentroid(sphere);
  CHECK(got.volume == doctest::Approx(want.volume).epsilon(0.05));
  CHECK((got.centroid - center).norm() < 1e-3);
}

TEST_CASE("stitch emits linearly many triangles") {
  const Vec3 center(0, 0, 0.75);
  TriangleMesh sphere = MakeIcosphere(0.05, 4);
  for (auto& v : sphere.vertices) v += center;
  CameraModel cam(400, 400, 79.5, 59.5, 160, 120);
  ObjectShell sphere_shell = ExtractShell(sphere, cam);

  CameraModel slab_cam(100, 100, 19.5, 14.5, 40, 30);
  ObjectShell slab_shell = SlabShell(slab_cam, 5, 34, 5, 24, 0.5f, 0.6f, 15, 24, 12, 17);

  for (const ObjectShell* shell : {&sphere_shell, &slab_shell}) {
    BinaryMask mask = MaskOf(shell->entry);
    size_t bound = 2 * (2 * size_t(mask.ValidCount())) + 2 * ContourSteps(mask);
    CHECK(StitchShell(*shell).triangles.size() <= bound);
  }
}

TEST_CASE("stitched vertices are backprojected shell points") {
  CameraModel cam(100, 100, 19.5, 14.5, 40, 30);
  ObjectShell shell = SlabShell(cam, 5, 34, 5, 24, 0.5f, 0.6f, 15, 24, 12, 17);
  TriangleMesh mesh = StitchShell(shell);
  PointCloud cloud = ShellToPointcloud(shell);
  PointIndex index(cloud.points);
  for (const auto& v : mesh.vertices) {
    double dist = -1;
    index.Nearest(v, &dist);
    CHECK(dist == 0.0);  // bitwise: both sides call the same backprojection
  }
}

TEST_CASE("stitching rejects an empty shell") {
  CameraModel cam(100, 100, 4.5, 4.5, 10, 10);
  ObjectShell shell;
  shell.camera = cam;
  shell.entry = DepthImage(10, 10);
  shell.exit = DepthImage(10, 10);
  CHECK_THROWS_AS(StitchShell(shell), InvalidInput);
  CHECK_THROWS_AS(StitchShell(SlabShell(cam, 2, 7, 2, 7, 0.5f, 0.6f), 0.0),
                  InvalidInput);
}

TEST_CASE("a one-pixel-tall strip degenerates to walls without volume") {
  CameraModel cam(100, 100, 4.5, 2.0, 10, 5);
  ObjectShell shell = SlabShell(cam, 2, 7, 2, 2, 0.5f, 0.6f);
  TriangleMesh mesh = StitchShell(shell);
  CHECK(mesh.triangles.size() > 0);  // walls only, no caps possible
  VolumeCentroid vc = MeshVolumeCentroid(mesh);
  // Forward and backward wall passes enclose no volume.
  CHECK_FALSE(vc.from_volume);
  CHECK(std::abs(vc.volume) < 1e-9);
  CHECK(vc.centroid.z() == doctest::Approx(0.55).epsilon(0.05));
}

TEST_CASE("volume and centroid are exact for boxes anywhere") {
  TriangleMesh box = MakeBox(Vec3(0.2, 0.3, 0.4), 2);
  VolumeCentroid at_origin = MeshVolumeCentroid(box);
  CHECK(at_origin.from_volume);
  CHECK(at_origin.volume == doctest::Approx(0.024).epsilon(1e-12));
  CHECK(at_origin.centroid.norm() < 1e-12);

  const Vec3 offset(0.1, -0.2, 0.05);
  TriangleMesh moved = Translate(box, offset);
  VolumeCentroid shifted = MeshVolumeCentroid(moved);
  CHECK(shifted.volume == doctest::Approx(0.024).epsilon(1e-12));
  CHECK((shifted.centroid - offset).norm() < 1e-12);
}

TEST_CASE("near-zero volume falls back to the area centroid") {
  // A triangle through the origin has zero signed volume against it.
  TriangleMesh tri;
  tri.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  tri.triangles = {{0, 1, 2}};
  VolumeCentroid vc = MeshVolumeCentroid(tri);
  CHECK_FALSE(vc.from_volume);
  CHECK((vc.centroid - Vec3(1.0 / 3.0, 1.0 / 3.0, 0.0)).norm() < 1e-12);
  CHECK_THROWS_AS(MeshVolumeCentroid(TriangleMesh{}), InvalidInput);
}
