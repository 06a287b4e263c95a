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

#include "shellkit/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "shellkit/spatial.hpp"

namespace shellkit {

PointCloud SampleSurface(const TriangleMesh& mesh, int n, RngStream& stream) {
  if (mesh.triangles.empty()) throw InvalidInput("cannot sample an empty mesh");
  if (n < 1) throw InvalidInput("sample count must be >= 1");
  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0;
  for (size_t i = 0; i < mesh.triangles.size(); ++i) {
    const auto& t = mesh.triangles[i];
    const Vec3 &a = mesh.vertices[t[0]], &b = mesh.vertices[t[1]], &c = mesh.vertices[t[2]];
    total += 0.5 * (b - a).cross(c - a).norm();
    cumulative[i] = total;
  }
  if (!(total > 0)) throw InvalidInput("mesh has no surface area");
  PointCloud cloud;
  cloud.points.reserve(size_t(n));
  for (int i = 0; i < n; ++i) {
    double pick = stream.Uniform() * total;
    size_t tri = size_t(std::lower_bound(cumulative.begin(), cumulative.end(), pick) -
                        cumulative.begin());
    if (tri >= mesh.triangles.size()) tri = mesh.triangles.size() - 1;
    const auto& t = mesh.triangles[tri];
    // sqrt warp makes barycentric coordinates area-uniform
    double r1 = std::sqrt(stream.Uniform());
    double r2 = stream.Uniform();
    double wa = 1 - r1, wb = r1 * (1 - r2), wc = r1 * r2;
    cloud.points.push_back(wa * mesh.vertices[t[0]] + wb * mesh.vertices[t[1]] +
                           wc * mesh.vertices[t[2]]);
  }
  return cloud;
}

ChamferResult Chamfer(const PointCloud& a, const PointCloud& b) {
  if (a.points.empty() || b.points.empty())
    throw InvalidInput("chamfer distance needs two non-empty clouds");
  auto mean_nearest = [](const PointCloud& from, const PointIndex& to) {
    double acc = 0;
    for (const Vec3& p : from.points) {
      double d = 0;
      to.Nearest(p, &d);
      acc += d;
    }
    return acc / double(from.points.size());
  };
  PointIndex index_a(a.points), index_b(b.points);
  ChamferResult result;
  result.forward = mean_nearest(a, index_b);
  result.backward = mean_nearest(b, index_a);
  result.sum = result.forward + result.backward;
  return result;
}

std::optional<double> GraspPrecision(const std::vector<GraspCandidate>& candidates,
                                     const TriangleMesh& gt_mesh, double clearance,
                                     const GripperModel& gripper, int gt_samples,
                                     uint64_t sample_seed) {
  gripper.Validate();
  if (clearance < 0) throw InvalidInput("clearance must be non-negative");
  int feasible = 0;
  for (const GraspCandidate& c : candidates)
    if (c.feasible) ++feasible;
  if (feasible == 0) return std::nullopt;

  RngStream stream(sample_seed);
  PointCloud samples = SampleSurface(gt_mesh, gt_samples, stream);
  PointIndex index(samples.points);
  int still_feasible = 0;
  for (const GraspCandidate& c : candidates) {
    if (!c.feasible) continue;
    GraspFrame frame = MakeGraspFrame(c.pose.finger_axis, c.pose.roll);
    GraspEval eval =
        EvaluateGraspFrame(c.pose.anchor, frame, index, gripper, c.width + clearance);
    if (eval.feasible) ++still_feasible;
  }
  return double(still_feasible) / double(feasible);
}

MapMetrics ComputeMapMetrics(const GraspMaps& pred, const GraspMaps& gt) {
  if (pred.width != gt.width || pred.height != gt.height)
    throw InvalidInput("map size mismatch");
  long agree = 0, compared = 0;
  long tp = 0, fp = 0, fn = 0;
  double sq = 0, sq_high = 0;
  long n_high = 0;
  for (size_t i = 0; i < gt.valid.size(); ++i) {
    bool p_feas = pred.feasibility[i] != 0;
    bool g_feas = gt.feasibility[i] != 0;
    if (gt.valid[i]) {
      ++compared;
      if (p_feas == g_feas) ++agree;
      if (p_feas && g_feas) ++tp;
      if (p_feas && !g_feas) ++fp;
      if (!p_feas && g_feas) ++fn;
      double dq = double(pred.quality[i]) - double(gt.quality[i]);
      sq += dq * dq;
      if (gt.quality[i] >= 0.75f) {
        sq_high += dq * dq;
        ++n_high;
      }
    } else if (p_feas) {
      ++fp;  // predicted feasible outside the GT mask
    }
  }
  MapMetrics m;
  m.accuracy = compared > 0 ? double(agree) / double(compared) : 1.0;
  long denom = 2 * tp + fp + fn;
  m.f1 = denom > 0 ? 2.0 * double(tp) / double(denom) : 1.0;
  m.quality_rmse = compared > 0 ? std::sqrt(sq / double(compared)) : 0.0;
  m.quality_rmse_high = n_high > 0 ? std::sqrt(sq_high / double(n_high)) : 0.0;
  return m;
}

}  // namespace shellkit
