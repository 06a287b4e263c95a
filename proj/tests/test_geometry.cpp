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

#include <cmath>
#include <cstring>
#include <set>

#include "shellkit/geometry.hpp"
#include "shellkit/io.hpp"
#include "shellkit/primitives.hpp"
#include "shellkit/rng.hpp"
#include "shellkit/shellmesh.hpp"
#include "shellkit/spatial.hpp"
#include "test_support.hpp"

using namespace shellkit;
using namespace shellkit::test;

namespace {

const CameraModel kCam(600, 600, 319.5, 239.5, 640, 480);

}  // namespace

TEST_CASE("camera projection and backprojection invert each other") {
  RngStream rng(11);
  for (int i = 0; i < 200; ++i) {
    Vec3 p(rng.Uniform(-0.3, 0.3), rng.Uniform(-0.2, 0.2), rng.Uniform(0.2, 2.0));
    auto proj = kCam.Project(p);
    Vec3 back = kCam.Backproject(proj.u, proj.v, proj.z);
    CHECK((back - p).norm() < 1e-12);

    double u = rng.Uniform(0, 639), v = rng.Uniform(0, 479), z = rng.Uniform(0.1, 3.0);
    auto rt = kCam.Project(kCam.Backproject(u, v, z));
    CHECK(std::abs(rt.u - u) < 1e-9);
    CHECK(std::abs(rt.v - v) < 1e-9);
    CHECK(std::abs(rt.z - z) < 1e-12);
  }
}

TEST_CASE("camera rays are unit length and pass through their pixel") {
  RngStream rng(12);
  for (int i = 0; i < 100; ++i) {
    double u = rng.Uniform(0, 639), v = rng.Uniform(0, 479);
    Vec3 d = kCam.RayDir(u, v);
    CHECK(std::abs(d.norm() - 1.0) < 1e-12);
    CHECK(d.z() > 0);
    // Any point on the ray projects back to (u, v).
    double t = rng.Uniform(0.5, 2.0);
    auto proj = kCam.Project(t * d);
    CHECK(std::abs(proj.u - u) < 1e-9);
    CHECK(std::abs(proj.v - v) < 1e-9);
  }
  // The ray through the principal point is the optical axis.
  Vec3 axis = kCam.RayDir(kCam.cx, kCam.cy);
  CHECK((axis - Vec3(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("camera validation rejects bad intrinsics") {
  CHECK_THROWS_AS(CameraModel(0, 600, 319.5, 239.5, 640, 480), InvalidInput);
  CHECK_THROWS_AS(CameraModel(600, -1, 319.5, 239.5, 640, 480), InvalidInput);
  CHECK_THROWS_AS(CameraModel(600, 600, 0, 239.5, 640, 480), InvalidInput);
  CHECK_THROWS_AS(CameraModel(600, 600, 640, 239.5, 640, 480), InvalidInput);
  CHECK_THROWS_AS(CameraModel(600, 600, 319.5, 239.5, 0, 480), InvalidInput);
  CHECK_THROWS_AS(kCam.Project(Vec3(0, 0, -0.5)), InvalidInput);
  CHECK_THROWS_AS(kCam.Backproject(10, 10, 0), InvalidInput);
}

TEST_CASE("depth image validity semantics") {
  DepthImage img(4, 3);
  CHECK(img.ValidCount() == 0);
  img.At(1, 2) = 0.5f;
  img.At(2, 0) = -1.0f;
  img.At(3, 1) = std::numeric_limits<float>::quiet_NaN();
  img.At(0, 0) = std::numeric_limits<float>::infinity();
  CHECK(img.Valid(1, 2));
  CHECK(!img.Valid(2, 0));
  CHECK(!img.Valid(3, 1));
  CHECK(!img.Valid(0, 0));
  CHECK(img.ValidCount() == 1);
  CHECK(!img.ValidAt(-1, 0));
  CHECK(!img.ValidAt(4, 0));
  CHECK(img.ValidAt(1, 2));
  // Row-major layout.
  CHECK(img.Index(1, 2) == 2 * 4 + 1);
  CHECK_THROWS_AS(DepthImage(0, 3), InvalidInput);
}

TEST_CASE("shell validation enforces shared mask and depth order") {
  CameraModel cam(100, 100, 1.5, 1.5, 4, 3);
  ObjectShell shell;
  shell.camera = cam;
  shell.entry = DepthImage(4, 3);
  shell.exit = DepthImage(4, 3);
  shell.entry.At(1, 1) = 0.5f;
  shell.exit.At(1, 1) = 0.7f;
  CHECK_NOTHROW(shell.Validate());

  ObjectShell bad = shell;
  bad.exit.At(2, 2) = 0.4f;  // mask mismatch
  CHECK_THROWS_AS(bad.Validate(), InvalidInput);

  bad = shell;
  bad.entry.At(1, 1) = 0.8f;  // entry beyond exit
  CHECK_THROWS_AS(bad.Validate(), InvalidInput);

  bad = shell;
  bad.exit = DepthImage(5, 3);  // size mismatch
  CHECK_THROWS_AS(bad.Validate(), InvalidInput);

  bad = shell;
  bad.camera = CameraModel(100, 100, 2.5, 1.5, 6, 3);  // camera raster mismatch
  CHECK_THROWS_AS(bad.Validate(), InvalidInput);
}

TEST_CASE("pose validation and application") {
  Pose pose;
  pose.rotation = Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()).toRotationMatrix();
  pose.translation = Vec3(0.1, -0.2, 0.3);
  CHECK_NOTHROW(pose.Validate());
  Vec3 p(0.3, 0.1, -0.4);
  CHECK((pose.Apply(p) - (pose.rotation * p + pose.translation)).norm() == 0);

  Pose scaled = pose;
  scaled.rotation *= 1.001;
  CHECK_THROWS_AS(scaled.Validate(), InvalidInput);

  Pose mirrored = pose;
  mirrored.rotation.col(0) *= -1;  // det -1
  CHECK_THROWS_AS(mirrored.Validate(), InvalidInput);
}

TEST_CASE("bounds of a point set") {
  std::vector<Vec3> pts = {{1, 2, 3}, {-1, 5, 0}, {0, 0, 7}};
  Aabb box = BoundsOf(pts);
  CHECK((box.min - Vec3(-1, 0, 0)).norm() == 0);
  CHECK((box.max - Vec3(1, 5, 7)).norm() == 0);
  CHECK((box.Center() - Vec3(0, 2.5, 3.5)).norm() == 0);
  CHECK_THROWS_AS(BoundsOf({}), InvalidInput);
}

TEST_CASE("depth raster file round-trip is bit-exact") {
  TempDir tmp;
  DepthImage img(17, 9);
  RngStream rng(3);
  for (float& d : img.data) {
    double r = rng.Uniform();
    d = r < 0.3 ? 0.0f : float(rng.Uniform(0.1, 2.0));
  }
  img.At(5, 5) = 0.1234567f;
  std::string path = tmp.File("img.dmap");
  WriteDmap(path, img);
  DepthImage back = ReadDmap(path);
  REQUIRE(back.width == img.width);
  REQUIRE(back.height == img.height);
  CHECK(std::memcmp(back.data.data(), img.data.data(),
                    img.data.size() * sizeof(float)) == 0);
}

TEST_CASE("depth raster reader rejects malformed files") {
  TempDir tmp;
  CHECK_THROWS_AS(ReadDmap(tmp.File("absent.dmap")), IoError);

  {
    std::ofstream out(tmp.File("magic.dmap"), std::ios::binary);
    out << "DMAPX\n4 3\n";
  }
  CHECK_THROWS_AS(ReadDmap(tmp.File("magic.dmap")), IoError);

  DepthImage img(6, 4);
  WriteDmap(tmp.File("trunc.dmap"), img);
  std::string bytes = ReadFileBytes(tmp.File("trunc.dmap"));
  {
    std::ofstream out(tmp.File("trunc.dmap"), std::ios::binary);
    out.write(bytes.data(), std::streamsize(bytes.size() - 7));
  }
  CHECK_THROWS_AS(ReadDmap(tmp.File("trunc.dmap")), IoError);
}

TEST_CASE("camera file round-trip") {
  TempDir tmp;
  std::string path = tmp.File("cam.txt");
  WriteCamera(path, kCam);
  CameraModel back = ReadCamera(path);
  CHECK(back.fx == kCam.fx);
  CHECK(back.fy == kCam.fy);
  CHECK(back.cx == kCam.cx);
  CHECK(back.cy == kCam.cy);
  CHECK(back.width == kCam.width);
  CHECK(back.height == kCam.height);
  CHECK_THROWS_AS(ReadCamera(tmp.File("absent.txt")), IoError);
}

TEST_CASE("obj file round-trip preserves geometry") {
  TempDir tmp;
  TriangleMesh mesh = MakeBox(Vec3(0.2, 0.3, 0.1), 2);
  std::string path = tmp.File("mesh.obj");
  WriteObj(path, mesh);
  TriangleMesh back = ReadObj(path);
  REQUIRE(back.vertices.size() == mesh.vertices.size());
  REQUIRE(back.triangles.size() == mesh.triangles.size());
  for (size_t i = 0; i < mesh.vertices.size(); ++i)
    CHECK((back.vertices[i] - mesh.vertices[i]).norm() < 1e-12);
  for (size_t i = 0; i < mesh.triangles.size(); ++i)
    CHECK(back.triangles[i] == mesh.triangles[i]);
}

TEST_CASE("obj reader fan-triangulates polygons and strips attribute indices") {
  TempDir tmp;
  std::string path = tmp.File("quad.obj");
  {
    std::ofstream out(path);
    out << "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\n";
    out << "f 1/1/1 2/2/1 3/3/1 4/4/1\n";
  }
  TriangleMesh mesh = ReadObj(path);
  REQUIRE(mesh.vertices.size() == 4);
  REQUIRE(mesh.triangles.size() == 2);
  CHECK(mesh.triangles[0] == std::array<int, 3>{0, 1, 2});
  CHECK(mesh.triangles[1] == std::array<int, 3>{0, 2, 3});
  CHECK_THROWS_AS(ReadObj(tmp.File("absent.obj")), IoError);
}

TEST_CASE("pgm round-trips at both bit depths") {
  TempDir tmp;
  std::vector<uint16_t> pix8 = {0, 1, 127, 128, 254, 255};
  WritePgm(tmp.File("a.pgm"), 3, 2, 255, pix8);
  PgmImage a = ReadPgm(tmp.File("a.pgm"));
  CHECK(a.width == 3);
  CHECK(a.height == 2);
  CHECK(a.maxval == 255);
  CHECK(a.pixels == pix8);

  std::vector<uint16_t> pix16 = {0, 1, 255, 256, 65534, 65535};
  WritePgm(tmp.File("b.pgm"), 2, 3, 65535, pix16);
  PgmImage b = ReadPgm(tmp.File("b.pgm"));
  CHECK(b.maxval == 65535);
  CHECK(b.pixels == pix16);

  {
    std::ofstream out(tmp.File("bad.pgm"), std::ios::binary);
    out << "P2\n2 2\n255\n0 0 0 0\n";
  }
  CHECK_THROWS_AS(ReadPgm(tmp.File("bad.pgm")), IoError);
}

TEST_CASE("depth visualization writes clamped integer millimeters") {
  TempDir tmp;
  DepthImage img(3, 1);
  img.At(0, 0) = 0.5f;     // 500 mm
  img.At(1, 0) = 123.456f; // clamps to 65535
  img.At(2, 0) = 0.0f;     // invalid -> 0
  WriteDepthPgm(tmp.File("d.pgm"), img);
  PgmImage pgm = ReadPgm(tmp.File("d.pgm"));
  CHECK(pgm.maxval == 65535);
  CHECK(pgm.pixels[0] == 500);
  CHECK(pgm.pixels[1] == 65535);
  CHECK(pgm.pixels[2] == 0);
}

TEST_CASE("random streams are deterministic and label-separated") {
  RngStream a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    uint64_t va = a.NextU64();
    CHECK(va == b.NextU64());
  }
  bool differs = false;
  RngStream a2(42);
  for (int i = 0; i < 100; ++i) differs |= a2.NextU64() != c.NextU64();
  CHECK(differs);

  // Sub-streams: reproducible, order-free, and do not advance the parent.
  RngStream root(7);
  uint64_t direct = RngStream(7).NextU64();
  RngStream s1 = root.Sub("shape", 3);
  RngStream s2 = root.Sub("shape", 3);
  CHECK(s1.NextU64() == s2.NextU64());
  CHECK(root.NextU64() == direct);

  RngStream r2(7);
  CHECK(r2.Sub("shape", 3).StreamId() != r2.Sub("shape", 4).StreamId());
  CHECK(r2.Sub("shape", 3).StreamId() != r2.Sub("view", 3).StreamId());
  CHECK(r2.Sub("shape", 3).StreamId() == RngStream(7).Sub("shape", 3).StreamId());
}

TEST_CASE("random stream distributions") {
  RngStream rng(99);
  for (int i = 0; i < 10000; ++i) {
    double u = rng.Uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  std::set<int64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    int64_t v = rng.UniformInt(-2, 5);
    CHECK(v >= -2);
    CHECK(v <= 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 8);  // all values of the inclusive range occur
  CHECK(rng.UniformInt(3, 3) == 3);

  int heads = 0;
  for (int i = 0; i < 10000; ++i) heads += rng.Bernoulli(0.25);
  CHECK(heads > 2200);
  CHECK(heads < 2800);

  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    double x = rng.Normal(2.0, 0.5);
    sum += x;
    sq += x * x;
  }
  double mean = sum / n;
  double stddev = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean - 2.0) < 0.02);
  CHECK(std::abs(stddev - 0.5) < 0.02);
}

TEST_CASE("box primitive is closed with exact dimensions and volume") {
  for (int subdiv : {1, 3}) {
    TriangleMesh box = MakeBox(Vec3(0.2, 0.3, 0.4), subdiv);
    CHECK(box.triangles.size() == size_t(12 * subdiv * subdiv));
    CHECK(AuditEdges(box).Closed());
    Aabb bounds = BoundsOf(box.vertices);
    CHECK((bounds.min - Vec3(-0.1, -0.15, -0.2)).norm() < 1e-15);
    CHECK((bounds.max - Vec3(0.1, 0.15, 0.2)).norm() < 1e-15);
    VolumeCentroid vc = MeshVolumeCentroid(box);
    CHECK(vc.from_volume);
    CHECK(vc.volume == doctest::Approx(0.2 * 0.3 * 0.4).epsilon(1e-12));
    CHECK(vc.centroid.norm() < 1e-12);
  }
}

TEST_CASE("cylinder primitive is the exact prism over its polygon") {
  const double r = 0.1, h = 0.3;
  const int n = 64;
  TriangleMesh cyl = MakeCylinder(r, h, n, 2);
  CHECK(AuditEdges(cyl).Closed());
  Aabb bounds = BoundsOf(cyl.vertices);
  CHECK(std::abs(bounds.max.z() - h / 2) < 1e-15);
  CHECK(std::abs(bounds.min.z() + h / 2) < 1e-15);
  CHECK(bounds.max.x() <= r + 1e-15);
  CHECK(bounds.max.x() > r * 0.99);
  // Volume of the prism over the inscribed n-gon, exactly.
  double polygon_area = 0.5 * n * r * r * std::sin(2 * kPi / n);
  VolumeCentroid vc = MeshVolumeCentroid(cyl);
  CHECK(vc.volume == doctest::Approx(polygon_area * h).epsilon(1e-12));
  CHECK(vc.centroid.norm() < 1e-12);
}

TEST_CASE("icosphere primitive lies on the sphere and closes") {
  const double r = 0.07;
  TriangleMesh sphere = MakeIcosphere(r, 3);
  CHECK(sphere.triangles.size() == size_t(20 * 64));
  CHECK(AuditEdges(sphere).Closed());
  for (const Vec3& v : sphere.vertices) CHECK(std::abs(v.norm() - r) < 1e-12);
  VolumeCentroid vc = MeshVolumeCentroid(sphere);
  double analytic = 4.0 / 3.0 * kPi * r * r * r;
  CHECK(vc.volume > 0.97 * analytic);  // inscribed polyhedron: slightly smaller
  CHECK(vc.volume < analytic);
  CHECK(vc.centroid.norm() < 1e-12);
}

TEST_CASE("nearest-neighbor queries match brute force") {
  RngStream rng(5);
  std::vector<Vec3> pts(2000);
  for (Vec3& p : pts)
    p = Vec3(rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1));
  PointIndex index(pts);
  REQUIRE(index.Size() == pts.size());
  for (int q = 0; q < 500; ++q) {
    Vec3 query(rng.Uniform(-1.2, 1.2), rng.Uniform(-1.2, 1.2), rng.Uniform(-1.2, 1.2));
    double best = std::numeric_limits<double>::infinity();
    int best_i = -1;
    for (size_t i = 0; i < pts.size(); ++i) {
      double d = (pts[i] - query).norm();
      if (d < best) {
        best = d;
        best_i = int(i);
      }
    }
    double dist = 0;
    int got = index.Nearest(query, &dist);
    CHECK(got == best_i);
    CHECK(dist == best);
  }
}

TEST_CASE("line-range queries report exactly the in-radius points") {
  RngStream rng(6);
  std::vector<Vec3> pts(3000);
  for (Vec3& p : pts)
    p = Vec3(rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1));
  PointIndex index(pts);
  for (int q = 0; q < 50; ++q) {
    Vec3 origin(rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1));
    Vec3 dir = Vec3(rng.Uniform(-1, 1), rng.Uniform(-1, 1), rng.Uniform(-1, 1)).normalized();
    double radius = rng.Uniform(0.05, 0.4);
    std::set<int> reported;
    index.ForEachNearLine(origin, dir, radius, [&](int i) {
      CHECK(reported.insert(i).second);  // no duplicates
    });
    std::set<int> expected;
    for (size_t i = 0; i < pts.size(); ++i) {
      Vec3 rel = pts[i] - origin;
      double d = (rel - rel.dot(dir) * dir).norm();
      if (d <= radius) expected.insert(int(i));
    }
    CHECK(reported == expected);
  }
}
