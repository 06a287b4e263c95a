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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "shellkit/datagen.hpp"
#include "shellkit/geometry.hpp"
#include "shellkit/grasp.hpp"
#include "shellkit/io.hpp"
#include "shellkit/metrics.hpp"
#include "shellkit/raycast.hpp"
#include "shellkit/shellmesh.hpp"

namespace {

using namespace shellkit;

constexpr const char* kVersion = "0.1.0";

// Compact scientific notation: "4.0e-3", "0.0e0" — no exponent padding.
std::string SciFormat(double value) {
  if (value == 0 || !std::isfinite(value)) return "0.0e0";
  int exponent = int(std::floor(std::log10(std::abs(value))));
  double mantissa = value / std::pow(10.0, exponent);
  mantissa = std::round(mantissa * 10.0) / 10.0;
  if (std::abs(mantissa) >= 10.0) {
    mantissa /= 10.0;
    ++exponent;
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.1fe%d", mantissa, exponent);
  return buf;
}

// Intrinsics matching the dataset's default field of view at any raster
// size, used where no camera file is supplied.
CameraModel DefaultCameraFor(int width, int height) {
  double f = 600.0 * double(width) / 640.0;
  return CameraModel(f, f, (width - 1) / 2.0, (height - 1) / 2.0, width, height);
}

void EnsureParentDir(const std::string& path) {
  namespace fs = std::filesystem;
  fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory: " + parent.string());
}

DepthImage WidthMapImage(const GraspMaps& maps) {
  DepthImage img(maps.width, maps.height);
  for (size_t i = 0; i < maps.grasp_width.size(); ++i) img.data[i] = maps.grasp_width[i];
  return img;
}

void RunGraspMaps(const std::string& entry_path, const std::string& exit_path,
                  const std::string& camera_path, const std::string& prefix,
                  int stride, double opening, double discontinuity) {
  ObjectShell shell;
  shell.entry = ReadDmap(entry_path);
  shell.exit = ReadDmap(exit_path);
  shell.camera = ReadCamera(camera_path);
  shell.Validate();
  GripperModel gripper;
  gripper.max_opening = opening;
  GraspMapResult result = ComputeGraspMaps(shell, gripper, stride, discontinuity);
  EnsureParentDir(prefix + "feas.pgm");
  WriteSampleMaps(prefix, result.maps);
  WriteDmap(prefix + "width.dmap", WidthMapImage(result.maps));
  WriteDmap(prefix + "entry.dmap", shell.entry);
  WriteCandidatesCsv(prefix + "candidates.csv", result.candidates);
}

int Dispatch(int argc, char** argv) {
  CLI::App app{"object shell extraction, stitching, grasp maps, and evaluation"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // --- gen-data ---
  auto* gen = app.add_subcommand("gen-data", "generate a synthetic shell dataset");
  DatasetParams dataset;
  int cam_w = 320, cam_h = 240;
  double cam_fx = 0, cam_fy = 0, cam_cx = -1, cam_cy = -1;
  gen->add_option("--shapes", dataset.n_shapes, "number of shapes")->required();
  gen->add_option("--views", dataset.views_per_shape, "views per shape")->required();
  gen->add_option("--seed", dataset.seed, "dataset seed");
  gen->add_option("--out", dataset.out_dir, "output directory")->required();
  gen->add_option("--jobs", dataset.jobs, "worker threads");
  gen->add_option("--stride", dataset.grasp_stride, "grasp map anchor stride");
  gen->add_option("--opening", dataset.gripper.max_opening, "gripper max opening (m)");
  gen->add_option("--width", cam_w, "render width (px)");
  gen->add_option("--height", cam_h, "render height (px)");
  gen->add_option("--fx", cam_fx, "focal length x (px)");
  gen->add_option("--fy", cam_fy, "focal length y (px)");
  gen->add_option("--cx", cam_cx, "principal point x (px)");
  gen->add_option("--cy", cam_cy, "principal point y (px)");

  // --- extract-shell ---
  auto* extract = app.add_subcommand("extract-shell", "render entry/exit shell from a mesh");
  std::string ex_mesh, ex_cam, ex_entry, ex_exit;
  extract->add_option("--mesh", ex_mesh, "input mesh (.obj)")->required();
  extract->add_option("--camera", ex_cam, "camera file")->required();
  extract->add_option("--out-entry", ex_entry, "entry depth output")->required();
  extract->add_option("--out-exit", ex_exit, "exit depth output")->required();

  // --- render ---
  auto* render = app.add_subcommand("render", "render a depth image from a mesh");
  std::string rd_mesh, rd_cam, rd_out;
  render->add_option("--mesh", rd_mesh, "input mesh (.obj)")->required();
  render->add_option("--camera", rd_cam, "camera file")->required();
  render->add_option("--out", rd_out, "depth output (.dmap)")->required();

  // --- stitch ---
  auto* stitch = app.add_subcommand("stitch", "stitch a shell into a closed mesh");
  std::string st_entry, st_exit, st_cam, st_out;
  double st_disc = kDefaultDepthDiscontinuity;
  stitch->add_option("--entry", st_entry, "entry depth (.dmap)")->required();
  stitch->add_option("--exit", st_exit, "exit depth (.dmap)")->required();
  stitch->add_option("--camera", st_cam, "camera file")->required();
  stitch->add_option("--out", st_out, "output mesh (.obj)")->required();
  stitch->add_option("--discontinuity", st_disc, "depth discontinuity gate (m)");

  // --- grasp-maps ---
  auto* gmaps = app.add_subcommand("grasp-maps", "dense grasp feasibility/width/quality maps");
  std::string gm_entry, gm_exit, gm_cam, gm_prefix;
  int gm_stride = 4;
  double gm_opening = GripperModel{}.max_opening;
  double gm_disc = kDefaultDepthDiscontinuity;
  gmaps->add_option("--entry", gm_entry, "entry depth (.dmap)")->required();
  gmaps->add_option("--exit", gm_exit, "exit depth (.dmap)")->required();
  gmaps->add_option("--camera", gm_cam, "camera file")->required();
  gmaps->add_option("--out-prefix", gm_prefix, "output path prefix")->required();
  gmaps->add_option("--stride", gm_stride, "anchor stride (px)");
  gmaps->add_option("--opening", gm_opening, "gripper max opening (m)");
  gmaps->add_option("--discontinuity", gm_disc, "depth discontinuity gate (m)");

  // --- augment-depth ---
  auto* augment = app.add_subcommand("augment-depth", "apply sensor-noise augmentation");
  std::string ag_in, ag_out, ag_cam;
  uint64_t ag_seed = 0;
  augment->add_option("--in", ag_in, "input depth (.dmap)")->required();
  augment->add_option("--seed", ag_seed, "augmentation seed");
  augment->add_option("--out", ag_out, "output depth (.dmap)")->required();
  augment->add_option("--camera", ag_cam, "camera file (defaults to dataset intrinsics)");

  // --- eval-chamfer ---
  auto* chamfer = app.add_subcommand("eval-chamfer", "Chamfer distance between two meshes");
  std::string ch_a, ch_b;
  int ch_samples = 10000;
  uint64_t ch_seed = 0;
  chamfer->add_option("--mesh-a", ch_a, "first mesh (.obj)")->required();
  chamfer->add_option("--mesh-b", ch_b, "second mesh (.obj)")->required();
  chamfer->add_option("--samples", ch_samples, "surface samples per mesh");
  chamfer->add_option("--seed", ch_seed, "sampling seed");

  // --- eval-grasps ---
  auto* egrasp = app.add_subcommand("eval-grasps", "re-check predicted grasps against GT");
  std::string eg_csv, eg_obj;
  double eg_clearance = 0.015;
  int eg_samples = 20000;
  uint64_t eg_seed = 0;
  egrasp->add_option("--candidates", eg_csv, "candidates CSV")->required();
  egrasp->add_option("--gt", eg_obj, "ground-truth mesh (.obj)")->required();
  egrasp->add_option("--clearance", eg_clearance, "opening clearance (m)");
  egrasp->add_option("--samples", eg_samples, "GT surface samples");
  egrasp->add_option("--seed", eg_seed, "sampling seed");

  // --- eval-maps ---
  auto* emaps = app.add_subcommand("eval-maps", "compare predicted maps to GT maps");
  std::string em_pred, em_gt;
  emaps->add_option("--pred-prefix", em_pred, "predicted maps path prefix")->required();
  emaps->add_option("--gt-prefix", em_gt, "ground-truth maps path prefix")->required();

  // --- pipeline ---
  auto* pipe = app.add_subcommand("pipeline", "extract-shell, stitch, and grasp-maps");
  std::string pl_mesh, pl_cam, pl_dir;
  int pl_stride = 4;
  double pl_opening = GripperModel{}.max_opening;
  double pl_disc = kDefaultDepthDiscontinuity;
  pipe->add_option("--mesh", pl_mesh, "input mesh (.obj)")->required();
  pipe->add_option("--camera", pl_cam, "camera file")->required();
  pipe->add_option("--out-dir", pl_dir, "output directory")->required();
  pipe->add_option("--stride", pl_stride, "anchor stride (px)");
  pipe->add_option("--opening", pl_opening, "gripper max opening (m)");
  pipe->add_option("--discontinuity", pl_disc, "depth discontinuity gate (m)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help / --version
      return app.exit(e);
    }
    std::cerr << e.what() << "\n";
    return 1;
  }

  if (gen->parsed()) {
    if (cam_fx <= 0) cam_fx = 600.0 * double(cam_w) / 640.0;
    if (cam_fy <= 0) cam_fy = cam_fx;
    if (cam_cx < 0) cam_cx = (cam_w - 1) / 2.0;
    if (cam_cy < 0) cam_cy = (cam_h - 1) / 2.0;
    dataset.camera = CameraModel(cam_fx, cam_fy, cam_cx, cam_cy, cam_w, cam_h);
    std::vector<ManifestEntry> manifest = GenDataset(dataset);
    std::cout << manifest.size() << " samples\n";
  } else if (extract->parsed()) {
    TriangleMesh mesh = ReadObj(ex_mesh);
    CameraModel cam = ReadCamera(ex_cam);
    ObjectShell shell = ExtractShell(mesh, cam);
    EnsureParentDir(ex_entry);
    EnsureParentDir(ex_exit);
    WriteDmap(ex_entry, shell.entry);
    WriteDmap(ex_exit, shell.exit);
  } else if (render->parsed()) {
    TriangleMesh mesh = ReadObj(rd_mesh);
    CameraModel cam = ReadCamera(rd_cam);
    EnsureParentDir(rd_out);
    WriteDmap(rd_out, RenderDepth(mesh, cam));
  } else if (stitch->parsed()) {
    ObjectShell shell;
    shell.entry = ReadDmap(st_entry);
    shell.exit = ReadDmap(st_exit);
    shell.camera = ReadCamera(st_cam);
    shell.Validate();
    EnsureParentDir(st_out);
    WriteObj(st_out, StitchShell(shell, st_disc));
  } else if (gmaps->parsed()) {
    RunGraspMaps(gm_entry, gm_exit, gm_cam, gm_prefix, gm_stride, gm_opening, gm_disc);
  } else if (augment->parsed()) {
    DepthImage depth = ReadDmap(ag_in);
    CameraModel cam = ag_cam.empty() ? DefaultCameraFor(depth.width, depth.height)
                                     : ReadCamera(ag_cam);
    RngStream stream(ag_seed);
    EnsureParentDir(ag_out);
    WriteDmap(ag_out, PostrenderAugment(depth, cam, stream));
  } else if (chamfer->parsed()) {
    TriangleMesh mesh_a = ReadObj(ch_a);
    TriangleMesh mesh_b = ReadObj(ch_b);
    // The same stream seeds both meshes so identical inputs sample
    // identical clouds and self-comparison reports exact zeros.
    RngStream stream_a(ch_seed), stream_b(ch_seed);
    PointCloud cloud_a = SampleSurface(mesh_a, ch_samples, stream_a);
    PointCloud cloud_b = SampleSurface(mesh_b, ch_samples, stream_b);
    ChamferResult r = Chamfer(cloud_a, cloud_b);
    std::cout << SciFormat(r.forward) << " " << SciFormat(r.backward) << " "
              << SciFormat(r.sum) << "\n";
  } else if (egrasp->parsed()) {
    std::vector<GraspCandidate> candidates = ReadCandidatesCsv(eg_csv);
    TriangleMesh gt = ReadObj(eg_obj);
    std::optional<double> rate =
        GraspPrecision(candidates, gt, eg_clearance, GripperModel{}, eg_samples, eg_seed);
    if (rate) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.4f", *rate);
      std::cout << buf << "\n";
    } else {
      std::cout << "n/a\n";
    }
  } else if (emaps->parsed()) {
    GraspMaps pred = ReadSampleMaps(em_pred);
    GraspMaps gt = ReadSampleMaps(em_gt);
    MapMetrics m = ComputeMapMetrics(pred, gt);
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.4f %.4f %.4f %.4f", m.accuracy, m.f1,
                  m.quality_rmse, m.quality_rmse_high);
    std::cout << buf << "\n";
  } else if (pipe->parsed()) {
    TriangleMesh mesh = ReadObj(pl_mesh);
    CameraModel cam = ReadCamera(pl_cam);
    std::error_code ec;
    std::filesystem::create_directories(pl_dir, ec);
    if (ec) throw IoError("cannot create directory: " + pl_dir);
    ObjectShell shell = ExtractShell(mesh, cam);
    WriteDmap(pl_dir + "/entry.dmap", shell.entry);
    WriteDmap(pl_dir + "/exit.dmap", shell.exit);
    WriteObj(pl_dir + "/mesh.obj", StitchShell(shell, pl_disc));
    WriteCamera(pl_dir + "/cam.txt", cam);
    RunGraspMaps(pl_dir + "/entry.dmap", pl_dir + "/exit.dmap", pl_dir + "/cam.txt",
                 pl_dir + "/", pl_stride, pl_opening, pl_disc);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Dispatch(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
