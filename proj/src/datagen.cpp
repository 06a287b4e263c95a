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

#include "shellkit/datagen.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "shellkit/io.hpp"
#include "shellkit/primitives.hpp"
#include "shellkit/raycast.hpp"

namespace shellkit {

namespace {

// Tessellation of the two base shapes, fixed so modifier vertex ids are
// stable: the cube carries a 13x13 grid per face, the cylinder 64 radial
// by 16 height segments. Both have a unit bounding cube.
const TriangleMesh& BaseMesh(BaseShape base) {
  static const TriangleMesh cube = MakeBox(Vec3(1, 1, 1), 13);
  static const TriangleMesh cylinder = MakeCylinder(0.5, 1.0, 64, 16);
  return base == BaseShape::kCube ? cube : cylinder;
}

Vec3 BoxSides(const TriangleMesh& mesh) {
  Aabb box = BoundsOf(mesh.vertices);
  return box.max - box.min;
}

Vec3 BoxCenter(const TriangleMesh& mesh) {
  Aabb box = BoundsOf(mesh.vertices);
  return 0.5 * (box.min + box.max);
}

bool SidesWithinBounds(const Vec3& sides) {
  double lo = sides.minCoeff(), hi = sides.maxCoeff();
  return hi >= kMinMaxSide && hi <= kMaxMaxSide && hi <= kMaxSideRatio * lo;
}

}  // namespace

ShapeSpec SampleShapeSpec(RngStream& stream) {
  ShapeSpec spec;
  spec.base = stream.UniformInt(0, 1) == 0 ? BaseShape::kCube : BaseShape::kCylinder;
  for (int i = 0; i < 3; ++i) spec.squish[i] = stream.Uniform(1.0, kMaxSideRatio);
  // Draws in [1, 7) already satisfy the ratio bound; the clamp is a guard.
  double floor = spec.squish.maxCoeff() / kMaxSideRatio;
  for (int i = 0; i < 3; ++i) spec.squish[i] = std::max(spec.squish[i], floor);
  spec.target_max_side = stream.Uniform(kMinMaxSide, kMaxMaxSide);

  if (stream.Bernoulli(0.5)) {
    // Post-squish sides: the base bounding cube is 1x1x1.
    Vec3 sides = spec.squish * (spec.target_max_side / spec.squish.maxCoeff());
    if (stream.UniformInt(0, 1) == 0) {
      ShrinkModifier shrink;
      shrink.axis = int(stream.UniformInt(0, 2));
      shrink.positive_side = stream.Bernoulli(0.5);
      double raw = stream.Uniform(0.0, 0.8);
      // One half of the chosen axis scales by (1-f), so its side becomes
      // sides[k]*(1 - f/2); cap f where either bound would break.
      double sk = sides[shrink.axis];
      double others_max = 0, others_min = std::numeric_limits<double>::infinity();
      for (int i = 0; i < 3; ++i) {
        if (i == shrink.axis) continue;
        others_max = std::max(others_max, sides[i]);
        others_min = std::min(others_min, sides[i]);
      }
      double cap = 2.0 * (1.0 - others_max / (kMaxSideRatio * sk));
      if (others_max < kMinMaxSide)
        cap = std::min(cap, 2.0 * (1.0 - kMinMaxSide / sk));
      shrink.fraction = std::clamp(std::min(raw, cap), 0.0, 0.8);
      spec.shrink = shrink;
    } else {
      ProtrusionModifier bump;
      bump.center_vertex =
          int(stream.UniformInt(0, int64_t(BaseMesh(spec.base).vertices.size()) - 1));
      bump.amplitude = stream.Uniform(0.0, 0.2);
      bump.sigma = stream.Uniform(0.1, 0.3) * spec.target_max_side;
      spec.protrusion = bump;
    }
  }
  return spec;
}

TriangleMesh BuildShape(const ShapeSpec& spec) {
  TriangleMesh mesh = BaseMesh(spec.base);
  double scale = spec.target_max_side / spec.squish.maxCoeff();
  for (Vec3& v : mesh.vertices) v = (v.array() * spec.squish.array()).matrix() * scale;

  if (spec.shrink) {
    const ShrinkModifier& m = *spec.shrink;
    double plane = BoxCenter(mesh)[m.axis];
    double factor = 1.0 - m.fraction;
    for (Vec3& v : mesh.vertices) {
      bool on_side = m.positive_side ? v[m.axis] >= plane : v[m.axis] <= plane;
      if (on_side) v[m.axis] = plane + (v[m.axis] - plane) * factor;
    }
  }
  if (spec.protrusion) {
    const ProtrusionModifier& m = *spec.protrusion;
    Vec3 center = mesh.vertices[size_t(m.center_vertex)];
    Vec3 dir = center - BoxCenter(mesh);
    double len = dir.norm();
    if (len > 1e-12 && m.sigma > 0) {
      dir /= len;
      std::vector<double> weight(mesh.vertices.size());
      for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        double d2 = (mesh.vertices[i] - center).squaredNorm();
        weight[i] = std::exp(-d2 / (2 * m.sigma * m.sigma));
      }
      // Outward bumps only grow the bounding box; halve the amplitude
      // until the size and ratio bounds survive.
      double amplitude = m.amplitude;
      for (int attempt = 0; attempt < 60 && amplitude > 0; ++attempt) {
        TriangleMesh trial = mesh;
        for (size_t i = 0; i < trial.vertices.size(); ++i)
          trial.vertices[i] += amplitude * weight[i] * dir;
        if (SidesWithinBounds(BoxSides(trial))) {
          mesh = std::move(trial);
          break;
        }
        amplitude /= 2;
      }
    }
  }
  return mesh;
}

std::pair<TriangleMesh, Pose> PlaceShape(const TriangleMesh& mesh, RngStream& stream) {
  // Uniform rotation from a uniformly random unit quaternion.
  double u1 = stream.Uniform(), u2 = stream.Uniform(), u3 = stream.Uniform();
  double a = std::sqrt(1 - u1), b = std::sqrt(u1);
  Eigen::Quaterniond q(b * std::cos(2 * kPi * u3), a * std::sin(2 * kPi * u2),
                       a * std::cos(2 * kPi * u2), b * std::sin(2 * kPi * u3));
  Mat3 rotation = q.toRotationMatrix();

  // Uniform position in the placement ball, sampled directly.
  double z = stream.Uniform(-1.0, 1.0);
  double phi = stream.Uniform(0.0, 2 * kPi);
  double r = kPlacementRadius * std::cbrt(stream.Uniform());
  double s = std::sqrt(std::max(0.0, 1 - z * z));
  Vec3 target = kPlacementCenter + r * Vec3(s * std::cos(phi), s * std::sin(phi), z);

  Pose pose;
  pose.rotation = rotation;
  pose.translation = target - rotation * BoxCenter(mesh);
  return {TransformMesh(mesh, pose), pose};
}

TriangleMesh LaplacianSmooth(const TriangleMesh& mesh, int rounds) {
  TriangleMesh out = mesh;
  std::vector<std::vector<int>> ring(out.vertices.size());
  for (const auto& t : out.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      ring[size_t(a)].push_back(b);
      ring[size_t(b)].push_back(a);
    }
  }
  for (auto& n : ring) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }
  for (int round = 0; round < rounds; ++round) {
    std::vector<Vec3> next = out.vertices;
    for (size_t i = 0; i < out.vertices.size(); ++i) {
      if (ring[i].empty()) continue;
      Vec3 avg = Vec3::Zero();
      for (int j : ring[i]) avg += out.vertices[size_t(j)];
      avg /= double(ring[i].size());
      next[i] = 0.5 * (out.vertices[i] + avg);
    }
    out.vertices = std::move(next);
  }
  return out;
}

TriangleMesh PrerenderAugment(const TriangleMesh& mesh, RngStream& stream) {
  TriangleMesh out = mesh;
  double fraction = stream.Uniform(0.3, 1.0);
  for (Vec3& v : out.vertices) {
    if (!stream.Bernoulli(fraction)) continue;
    double magnitude = stream.Uniform(0.001, 0.010);
    for (int i = 0; i < 3; ++i) v[i] += stream.Uniform(-magnitude, magnitude);
  }
  return LaplacianSmooth(out, 3);
}

namespace {

bool BorderPixel(const DepthImage& img, int u, int v) {
  if (!img.Valid(u, v)) return false;
  for (int dv = -1; dv <= 1; ++dv)
    for (int du = -1; du <= 1; ++du) {
      if (du == 0 && dv == 0) continue;
      int nu = u + du, nv = v + dv;
      if (!img.InBounds(nu, nv) || !img.Valid(nu, nv)) return true;
    }
  return false;
}

}  // namespace

DepthImage PostrenderAugment(const DepthImage& depth, const CameraModel& camera,
                             RngStream& stream, AugmentTrace* trace) {
  camera.Validate();
  if (depth.width != camera.width || depth.height != camera.height)
    throw InvalidInput("depth image does not match the camera raster");
  DepthImage img = depth;
  const int w = img.width, h = img.height;

  std::vector<std::array<int, 2>> removed;
  std::vector<float> removed_values;
  auto remove_pixel = [&](int u, int v) {
    removed.push_back({u, v});
    removed_values.push_back(img.At(u, v));
    img.At(u, v) = 0;
  };

  // (1) multiplicative then additive Gaussian noise on valid pixels.
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      if (img.Valid(u, v)) img.At(u, v) = float(img.At(u, v) * stream.Normal(1.0, 0.005));
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      if (img.Valid(u, v)) {
        double d = img.At(u, v) + stream.Normal(0.0, 0.001);
        img.At(u, v) = d > 0 ? float(d) : 0.0f;
      }

  // (2) grazing-angle dropout against central-difference normals.
  double theta = stream.Uniform(5.0, 20.0) * kPi / 180.0;
  if (trace) trace->dropout_angle = theta;
  {
    NormalMap normals = EstimateNormals(img, camera);
    double min_cos = std::sin(theta);  // angle to the ray above 90deg - theta
    std::vector<std::array<int, 2>> drops;
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u) {
        if (!img.Valid(u, v) || !normals.Valid(u, v)) continue;
        double facing = -normals.At(u, v).dot(camera.RayDir(u, v));
        if (facing < min_cos) drops.push_back({u, v});
      }
    for (auto [u, v] : drops) remove_pixel(u, v);
    if (trace) trace->dropout_removed = int(drops.size());
  }

  // (3) pepper dropout of up to 10 random valid pixels.
  int pepper = int(stream.UniformInt(0, 10));
  if (trace) trace->pepper_count = pepper;
  {
    std::vector<std::array<int, 2>> valid;
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u)
        if (img.Valid(u, v)) valid.push_back({u, v});
    for (int i = 0; i < pepper && !valid.empty(); ++i) {
      size_t pick = size_t(stream.UniformInt(0, int64_t(valid.size()) - 1));
      remove_pixel(valid[pick][0], valid[pick][1]);
      valid[pick] = valid.back();
      valid.pop_back();
      if (trace) ++trace->pepper_removed;
    }
  }

  // (4) stochastic border erosion; early rounds are selected on a 2x
  // coarser grid but only ever strike pixels that border invalid space at
  // full resolution.
  int rounds = int(stream.UniformInt(5, 20));
  if (trace) trace->erosion_rounds = rounds;
  int coarse_rounds = std::min(3, rounds);
  for (int round = 0; round < rounds; ++round) {
    AugmentTrace::ErosionRound round_trace;
    round_trace.coarse = round < coarse_rounds;
    if (trace) {
      round_trace.mask_before.assign(size_t(w) * h, 0);
      for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
          if (img.Valid(u, v)) round_trace.mask_before[size_t(v) * w + u] = 1;
    }
    std::vector<std::array<int, 2>> border;
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u)
        if (BorderPixel(img, u, v)) border.push_back({u, v});

    std::vector<std::array<int, 2>> strikes;
    if (round < coarse_rounds) {
      int cw = (w + 1) / 2, ch = (h + 1) / 2;
      std::vector<uint8_t> coarse(size_t(cw) * ch, 0);
      for (int v = 0; v < h; ++v)
        for (int u = 0; u < w; ++u)
          if (img.Valid(u, v)) coarse[size_t(v / 2) * cw + u / 2] = 1;
      auto coarse_valid = [&](int cu, int cv) {
        return cu >= 0 && cu < cw && cv >= 0 && cv < ch && coarse[size_t(cv) * cw + cu] != 0;
      };
      std::vector<uint8_t> selected(size_t(cw) * ch, 0);
      for (int cv = 0; cv < ch; ++cv)
        for (int cu = 0; cu < cw; ++cu) {
          if (!coarse_valid(cu, cv)) continue;
          bool is_border = false;
          for (int dv = -1; dv <= 1 && !is_border; ++dv)
            for (int du = -1; du <= 1; ++du) {
              if (du == 0 && dv == 0) continue;
              if (!coarse_valid(cu + du, cv + dv)) {
                is_border = true;
                break;
              }
            }
          if (is_border && stream.Bernoulli(0.3)) selected[size_t(cv) * cw + cu] = 1;
        }
      for (const auto& p : border)
        if (selected[size_t(p[1] / 2) * cw + p[0] / 2]) strikes.push_back(p);
    } else {
      for (const auto& p : border)
        if (stream.Bernoulli(0.3)) strikes.push_back(p);
    }
    for (const auto& p : strikes) remove_pixel(p[0], p[1]);
    if (trace) {
      round_trace.removed = std::move(strikes);
      trace->rounds.push_back(std::move(round_trace));
    }
  }

  // (5) exemption: restore up to 10 removed pixels with their exact
  // pre-removal values.
  int exempt = int(stream.UniformInt(0, 10));
  {
    std::vector<int> pool(removed.size());
    for (size_t i = 0; i < pool.size(); ++i) pool[i] = int(i);
    for (int i = 0; i < exempt && !pool.empty(); ++i) {
      size_t pick = size_t(stream.UniformInt(0, int64_t(pool.size()) - 1));
      int idx = pool[pick];
      img.At(removed[size_t(idx)][0], removed[size_t(idx)][1]) = removed_values[size_t(idx)];
      if (trace) trace->exempted.push_back(idx);
      pool[pick] = pool.back();
      pool.pop_back();
    }
  }
  if (trace) {
    trace->removed_pixels = std::move(removed);
    trace->removed_values = std::move(removed_values);
  }
  return img;
}

void WriteSampleMaps(const std::string& prefix, const GraspMaps& maps) {
  std::vector<uint16_t> feas(maps.feasibility.size());
  for (size_t i = 0; i < feas.size(); ++i) feas[i] = maps.feasibility[i] ? 255 : 0;
  WritePgm(prefix + "feas.pgm", maps.width, maps.height, 255, feas);
  std::vector<uint16_t> qual(maps.quality.size());
  for (size_t i = 0; i < qual.size(); ++i) {
    float q = std::clamp(maps.quality[i], 0.0f, 1.0f);
    qual[i] = uint16_t(std::lround(double(q) * 65535.0));
  }
  WritePgm(prefix + "qual.pgm", maps.width, maps.height, 65535, qual);
}

GraspMaps ReadSampleMaps(const std::string& prefix) {
  DepthImage entry = ReadDmap(prefix + "entry.dmap");
  PgmImage feas = ReadPgm(prefix + "feas.pgm");
  PgmImage qual = ReadPgm(prefix + "qual.pgm");
  if (feas.width != entry.width || feas.height != entry.height ||
      qual.width != entry.width || qual.height != entry.height)
    throw IoError("sample rasters disagree in size: " + prefix);
  GraspMaps maps;
  maps.width = entry.width;
  maps.height = entry.height;
  maps.valid.resize(entry.data.size());
  maps.feasibility.resize(entry.data.size());
  maps.quality.resize(entry.data.size());
  maps.grasp_width.assign(entry.data.size(), 0.f);
  for (int v = 0; v < entry.height; ++v)
    for (int u = 0; u < entry.width; ++u) {
      size_t i = maps.Index(u, v);
      maps.valid[i] = entry.Valid(u, v) ? 1 : 0;
      maps.feasibility[i] = feas.pixels[i] > 0 ? 1 : 0;
      maps.quality[i] = float(qual.pixels[i]) / float(qual.maxval);
    }
  return maps;
}

SampleGeometry DatasetSampleGeometry(const DatasetParams& params, int sample_index) {
  if (params.views_per_shape < 1 || sample_index < 0 ||
      sample_index >= params.n_shapes * params.views_per_shape)
    throw InvalidInput("sample index out of range");
  RngStream root(params.seed);
  int shape_index = sample_index / params.views_per_shape;
  RngStream shape_stream = root.Sub("shape", uint64_t(shape_index));
  SampleGeometry geometry;
  geometry.spec = SampleShapeSpec(shape_stream);
  geometry.shape = BuildShape(geometry.spec);
  RngStream place_stream = root.Sub("view", uint64_t(sample_index)).Sub("place", 0);
  auto [placed, pose] = PlaceShape(geometry.shape, place_stream);
  geometry.placed = std::move(placed);
  geometry.pose = pose;
  return geometry;
}

std::vector<ManifestEntry> GenDataset(const DatasetParams& params) {
  if (params.n_shapes < 0 || params.views_per_shape < 0)
    throw InvalidInput("dataset counts must be non-negative");
  if (params.jobs < 1) throw InvalidInput("jobs must be >= 1");
  if (params.out_dir.empty()) throw InvalidInput("output directory required");
  params.camera.Validate();
  params.gripper.Validate();

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(params.out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + params.out_dir);

  const int total = params.n_shapes * params.views_per_shape;
  RngStream root(params.seed);

  // Shape meshes are shared across views; building them is cheap enough
  // to do up front, which keeps workers independent.
  std::vector<TriangleMesh> shapes(size_t(params.n_shapes));
  for (int s = 0; s < params.n_shapes; ++s) {
    RngStream shape_stream = root.Sub("shape", uint64_t(s));
    shapes[size_t(s)] = GenShape(shape_stream);
  }

  std::vector<uint8_t> done(size_t(total), 0);
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto run_sample = [&](int index) {
    int shape = index / params.views_per_shape;
    RngStream view_stream = root.Sub("view", uint64_t(index));
    RngStream place_stream = view_stream.Sub("place", 0);
    RngStream pre_stream = view_stream.Sub("prerender", 0);
    RngStream post_stream = view_stream.Sub("postrender", 0);

    auto [posed, pose] = PlaceShape(shapes[size_t(shape)], place_stream);
    (void)pose;
    TriangleMesh augmented = PrerenderAugment(posed, pre_stream);
    ObjectShell shell = ExtractShell(augmented, params.camera);
    DepthImage noisy = PostrenderAugment(shell.entry, params.camera, post_stream);
    GraspMapResult grasp = ComputeGraspMaps(shell, params.gripper, params.grasp_stride);

    char name[16];
    std::snprintf(name, sizeof name, "%06d", index);
    std::string dir = params.out_dir + "/" + name;
    fs::create_directories(dir);
    WriteDmap(dir + "/input.dmap", noisy);
    WriteDmap(dir + "/entry.dmap", shell.entry);
    WriteDmap(dir + "/exit.dmap", shell.exit);
    WriteSampleMaps(dir + "/", grasp.maps);
    WriteCamera(dir + "/cam.txt", params.camera);
  };

  auto worker = [&]() {
    while (!failed.load(std::memory_order_relaxed)) {
      int index = next.fetch_add(1);
      if (index >= total) break;
      try {
        run_sample(index);
        done[size_t(index)] = 1;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  int jobs = std::min(params.jobs, std::max(1, total));
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  std::vector<ManifestEntry> manifest;
  for (int index = 0; index < total; ++index) {
    if (!done[size_t(index)]) continue;
    int shape = index / params.views_per_shape;
    char name[16];
    std::snprintf(name, sizeof name, "%06d", index);
    ManifestEntry entry;
    entry.id = name;
    entry.shape_seed = root.Sub("shape", uint64_t(shape)).StreamId();
    entry.view_seed = root.Sub("view", uint64_t(index)).StreamId();
    manifest.push_back(entry);
  }
  {
    std::ofstream out(params.out_dir + "/manifest.tsv");
    if (!out) throw IoError("cannot write manifest in " + params.out_dir);
    for (const ManifestEntry& e : manifest)
      out << e.id << '\t' << e.shape_seed << '\t' << e.view_seed << '\n';
    if (!out.flush()) throw IoError("manifest write failed in " + params.out_dir);
  }
  if (first_error) std::rethrow_exception(first_error);
  return manifest;
}

}  // namespace shellkit
