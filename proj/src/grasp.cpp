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

#include "shellkit/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "shellkit/shellmesh.hpp"

namespace shellkit {

namespace {

// Camera up in camera coordinates (+Y is down in the image).
const Vec3 kCameraUp(0, -1, 0);
const Vec3 kCameraRight(1, 0, 0);

struct JawGeometry {
  double half_w, half_h;
  double outer;     // outer jaw plane along the axis, relative to the anchor
  double env_lo;    // inner jaw plane: envelope is [env_lo, outer]
  double body;      // finger body depth behind each jaw plane
  double max_span;  // opening minus the required clearance
};

JawGeometry MakeJaws(const GripperModel& gripper, double opening) {
  if (opening <= 0) opening = gripper.max_opening;
  JawGeometry jaws;
  jaws.half_w = gripper.finger_pad_width / 2;
  jaws.half_h = gripper.finger_pad_height / 2;
  jaws.outer = kAnchorStandoff;
  jaws.env_lo = kAnchorStandoff - opening;
  jaws.body = gripper.finger_body_thickness;
  jaws.max_span = opening - kJawClearance;
  return jaws;
}

// Classifies one point against the jaw geometry in the grasp frame,
// folding it into the running evaluation.
struct EvalAccum {
  int contacts = 0;
  bool outer_hit = false, inner_hit = false;
  double span_lo = std::numeric_limits<double>::infinity();
  double span_hi = -std::numeric_limits<double>::infinity();
  double env_lo = std::numeric_limits<double>::infinity();
  double env_hi = -std::numeric_limits<double>::infinity();

  void Add(const JawGeometry& jaws, double a, double ly, double lz) {
    if (std::abs(ly) > jaws.half_w || std::abs(lz) > jaws.half_h) return;
    if (a > jaws.outer + jaws.body) return;  // beyond the outer finger, free space
    if (a > jaws.outer) {                    // inside the outer finger body
      outer_hit = true;
      return;
    }
    span_lo = std::min(span_lo, a);
    span_hi = std::max(span_hi, a);
    if (a >= jaws.env_lo) {  // between the jaws
      ++contacts;
      env_lo = std::min(env_lo, a);
      env_hi = std::max(env_hi, a);
    } else if (a >= jaws.env_lo - jaws.body) {  // inside the inner finger body
      inner_hit = true;
    }
  }

  GraspEval Finish(const GripperModel& gripper, const JawGeometry& jaws) const {
    GraspEval eval;
    eval.contact_points = contacts;
    eval.width = contacts > 0 ? env_hi - env_lo : 0;
    eval.span = span_hi >= span_lo ? span_hi - span_lo : 0;
    eval.body_collision = outer_hit || inner_hit;
    eval.feasible = contacts >= gripper.min_contact_points && !eval.body_collision &&
                    eval.span <= jaws.max_span;
    return eval;
  }
};

template <typename PointAt>
GraspEval EvalPoints(const Vec3& anchor, const GraspFrame& frame,
                     const GripperModel& gripper, double opening, size_t count,
                     const PointAt& point_at) {
  gripper.Validate();
  JawGeometry jaws = MakeJaws(gripper, opening);
  EvalAccum accum;
  for (size_t i = 0; i < count; ++i) {
    Vec3 rel = point_at(i) - anchor;
    accum.Add(jaws, rel.dot(frame.x), rel.dot(frame.y), rel.dot(frame.z));
  }
  return accum.Finish(gripper, jaws);
}

}  // namespace

GraspFrame MakeGraspFrame(const Vec3& finger_axis, double roll) {
  double n = finger_axis.norm();
  if (!(n > 1e-12)) throw InvalidInput("grasp finger axis is degenerate");
  GraspFrame frame;
  frame.x = finger_axis / n;
  Vec3 ref = kCameraUp - kCameraUp.dot(frame.x) * frame.x;
  if (ref.norm() < 1e-6) ref = kCameraRight - kCameraRight.dot(frame.x) * frame.x;
  Vec3 y0 = ref.normalized();
  Vec3 z0 = frame.x.cross(y0);
  double c = std::cos(roll), s = std::sin(roll);
  frame.y = c * y0 + s * z0;
  frame.z = c * z0 - s * y0;
  return frame;
}

GraspEval EvaluateGraspFrame(const Vec3& anchor, const GraspFrame& frame,
                             const PointIndex& points, const GripperModel& gripper,
                             double opening) {
  gripper.Validate();
  JawGeometry jaws = MakeJaws(gripper, opening);
  double radius = std::hypot(jaws.half_w, jaws.half_h) + 1e-9;
  EvalAccum accum;
  points.ForEachNearLine(anchor, frame.x, radius, [&](int i) {
    Vec3 rel = points.Point(i) - anchor;
    accum.Add(jaws, rel.dot(frame.x), rel.dot(frame.y), rel.dot(frame.z));
  });
  return accum.Finish(gripper, jaws);
}

GraspEval EvaluateGrasp(const GraspPose& pose, const PointIndex& points,
                        const GripperModel& gripper) {
  return EvaluateGraspFrame(pose.anchor, MakeGraspFrame(pose.finger_axis, pose.roll),
                            points, gripper);
}

GraspEval EvaluateGrasp(const GraspPose& pose, const PointCloud& points,
                        const GripperModel& gripper) {
  GraspFrame frame = MakeGraspFrame(pose.finger_axis, pose.roll);
  return EvalPoints(pose.anchor, frame, gripper, 0, points.points.size(),
                    [&](size_t i) -> const Vec3& { return points.points[i]; });
}

NormalMap EstimateNormals(const DepthImage& entry, const CameraModel& camera) {
  camera.Validate();
  NormalMap map;
  map.width = entry.width;
  map.height = entry.height;
  map.normals.assign(size_t(entry.width) * entry.height, Vec3::Zero());
  map.valid.assign(size_t(entry.width) * entry.height, 0);
  for (int v = 1; v + 1 < entry.height; ++v) {
    for (int u = 1; u + 1 < entry.width; ++u) {
      if (!entry.Valid(u, v) || !entry.Valid(u - 1, v) || !entry.Valid(u + 1, v) ||
          !entry.Valid(u, v - 1) || !entry.Valid(u, v + 1))
        continue;
      Vec3 du = camera.Backproject(u + 1, v, entry.At(u + 1, v)) -
                camera.Backproject(u - 1, v, entry.At(u - 1, v));
      Vec3 dv = camera.Backproject(u, v + 1, entry.At(u, v + 1)) -
                camera.Backproject(u, v - 1, entry.At(u, v - 1));
      Vec3 n = du.cross(dv);
      double len = n.norm();
      if (!(len > 1e-12)) continue;
      n /= len;
      if (n.dot(camera.RayDir(u, v)) > 0) n = -n;  // face the camera
      map.normals[size_t(v) * entry.width + u] = n;
      map.valid[size_t(v) * entry.width + u] = 1;
    }
  }
  return map;
}

Vec3 CenterOfGeometry(const TriangleMesh& recon) {
  return MeshVolumeCentroid(recon).centroid;
}

GraspMapResult ComputeGraspMaps(const ObjectShell& shell, const GripperModel& gripper,
                                int stride, double depth_discontinuity) {
  shell.Validate();
  gripper.Validate();
  if (stride < 1) throw InvalidInput("grasp map stride must be >= 1");

  const DepthImage& entry = shell.entry;
  const int w = entry.width, h = entry.height;
  GraspMapResult result;
  GraspMaps& maps = result.maps;
  maps.width = w;
  maps.height = h;
  maps.valid.assign(size_t(w) * h, 0);
  maps.feasibility.assign(size_t(w) * h, 0);
  maps.quality.assign(size_t(w) * h, 0.f);
  maps.grasp_width.assign(size_t(w) * h, 0.f);
  bool any_valid = false;
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      if (entry.Valid(u, v)) {
        maps.valid[maps.Index(u, v)] = 1;
        any_valid = true;
      }
  if (!any_valid) return result;

  PointCloud cloud = ShellToPointcloud(shell);
  TriangleMesh recon = StitchShell(shell, depth_discontinuity);
  Vec3 center;
  if (!recon.triangles.empty()) {
    center = CenterOfGeometry(recon);
  } else {
    center = Vec3::Zero();  // thin shells can stitch to nothing; fall back
    for (const Vec3& p : cloud.points) center += p;
    center /= double(cloud.points.size());
  }
  result.center = center;

  PointIndex index(cloud.points);
  NormalMap normals = EstimateNormals(entry, shell.camera);
  JawGeometry jaws = MakeJaws(gripper, 0);
  const double line_radius = std::hypot(jaws.half_w, jaws.half_h) + 1e-9;

  struct Anchor {
    int u, v;
    Vec3 position;
    bool feasible = false;
    double min_width = 0;
    double quality = 0;
  };
  std::vector<Anchor> anchors;
  std::vector<int> anchor_at(size_t(w) * h, -1);
  std::vector<int> candidate_ids;

  for (int v = 0; v < h; v += stride) {
    for (int u = 0; u < w; u += stride) {
      if (!entry.Valid(u, v) || !normals.Valid(u, v)) continue;
      Anchor anchor;
      anchor.u = u;
      anchor.v = v;
      anchor.position = shell.camera.Backproject(u, v, entry.At(u, v));
      const Vec3& axis = normals.At(u, v);

      candidate_ids.clear();
      index.ForEachNearLine(anchor.position, axis, line_radius,
                            [&](int i) { candidate_ids.push_back(i); });

      double min_width = std::numeric_limits<double>::infinity();
      for (int k = 0; k < kGraspRolls; ++k) {
        GraspCandidate cand;
        cand.u = u;
        cand.v = v;
        cand.pose.anchor = anchor.position;
        cand.pose.finger_axis = axis;
        cand.pose.roll = k * (kPi / 4);
        GraspFrame frame = MakeGraspFrame(axis, cand.pose.roll);
        GraspEval eval =
            EvalPoints(anchor.position, frame, gripper, 0, candidate_ids.size(),
                       [&](size_t i) { return index.Point(candidate_ids[i]); });
        cand.feasible = eval.feasible;
        cand.width = eval.width;
        result.candidates.push_back(cand);
        if (eval.feasible) {
          anchor.feasible = true;
          min_width = std::min(min_width, eval.width);
        }
      }
      anchor.min_width = anchor.feasible ? min_width : 0;
      anchor_at[maps.Index(u, v)] = int(anchors.size());
      anchors.push_back(anchor);
    }
  }

  // Quality: inverse distance to the center of geometry, min-max normalized
  // over the feasible anchors.
  double dmin = std::numeric_limits<double>::infinity();
  double dmax = -std::numeric_limits<double>::infinity();
  for (const Anchor& a : anchors) {
    if (!a.feasible) continue;
    double d = (a.position - center).norm();
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
  }
  for (Anchor& a : anchors) {
    if (!a.feasible) continue;
    double d = (a.position - center).norm();
    a.quality = dmax == dmin ? 1.0 : 1.0 - (d - dmin) / (dmax - dmin);
  }
  for (size_t c = 0; c < result.candidates.size(); ++c) {
    GraspCandidate& cand = result.candidates[c];
    if (cand.feasible) cand.quality = anchors[size_t(anchor_at[maps.Index(cand.u, cand.v)])].quality;
  }

  if (anchors.empty()) return result;  // mask present but no evaluable anchor

  // Every valid pixel copies its nearest anchor; anchors copy themselves.
  // Ring search over Chebyshev radii; an anchor on ring r is at Euclidean
  // distance >= r, so the scan stops once r exceeds the best distance.
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!maps.valid[maps.Index(u, v)]) continue;
      int best = -1;
      long best_d2 = std::numeric_limits<long>::max();
      int max_r = std::max(std::max(u, w - 1 - u), std::max(v, h - 1 - v));
      for (int r = 0; r <= max_r; ++r) {
        if (best >= 0 && (long)r * r > best_d2) break;
        int u0 = u - r, u1 = u + r, v0 = v - r, v1 = v + r;
        auto visit = [&](int cu, int cv) {
          if (cu < 0 || cu >= w || cv < 0 || cv >= h) return;
          int a = anchor_at[maps.Index(cu, cv)];
          if (a < 0) return;
          long d2 = (long)(cu - u) * (cu - u) + (long)(cv - v) * (cv - v);
          if (d2 < best_d2 ||
              (d2 == best_d2 && best >= 0 &&
               std::make_pair(cv, cu) < std::make_pair(anchors[best].v, anchors[best].u))) {
            best_d2 = d2;
            best = a;
          }
        };
        if (r == 0) {
          visit(u, v);
        } else {
          for (int cu = u0; cu <= u1; ++cu) {
            visit(cu, v0);
            visit(cu, v1);
          }
          for (int cv = v0 + 1; cv <= v1 - 1; ++cv) {
            visit(u0, cv);
            visit(u1, cv);
          }
        }
      }
      const Anchor& a = anchors[size_t(best)];
      size_t i = maps.Index(u, v);
      maps.feasibility[i] = a.feasible ? 1 : 0;
      maps.quality[i] = float(a.quality);
      maps.grasp_width[i] = float(a.min_width);
    }
  }
  return result;
}

void WriteCandidatesCsv(const std::string& path,
                        const std::vector<GraspCandidate>& candidates) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "u,v,x,y,z,nx,ny,nz,roll,feasible,width,quality\n";
  char line[512];
  for (const GraspCandidate& c : candidates) {
    std::snprintf(line, sizeof line, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g,%.17g\n",
                  c.u, c.v, c.pose.anchor.x(), c.pose.anchor.y(), c.pose.anchor.z(),
                  c.pose.finger_axis.x(), c.pose.finger_axis.y(), c.pose.finger_axis.z(),
                  c.pose.roll, c.feasible ? 1 : 0, c.width, c.quality);
    out << line;
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<GraspCandidate> ReadCandidatesCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty candidate file: " + path);
  std::vector<GraspCandidate> candidates;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    double f[12];
    for (int i = 0; i < 12; ++i) {
      if (!std::getline(row, field, ',')) throw IoError("short candidate row: " + path);
      try {
        f[i] = std::stod(field);
      } catch (const std::exception&) {
        throw IoError("bad candidate field '" + field + "' in " + path);
      }
    }
    GraspCandidate c;
    c.u = int(f[0]);
    c.v = int(f[1]);
    c.pose.anchor = Vec3(f[2], f[3], f[4]);
    c.pose.finger_axis = Vec3(f[5], f[6], f[7]);
    c.pose.roll = f[8];
    c.feasible = f[9] != 0;
    c.width = f[10];
    c.quality = f[11];
    candidates.push_back(c);
  }
  return candidates;
}

}  // namespace shellkit
