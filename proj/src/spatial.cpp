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

#include "shellkit/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shellkit {

namespace {
constexpr int kLeafSize = 8;
}

PointIndex::PointIndex(std::vector<Vec3> points) : points_(std::move(points)) {
  if (points_.empty()) throw InvalidInput("point index over empty set");
  order_.resize(points_.size());
  for (size_t i = 0; i < points_.size(); ++i) order_[i] = int(i);
  nodes_.reserve(2 * points_.size() / kLeafSize + 2);
  root_ = Build(0, int(points_.size()));
}

int PointIndex::Build(int first, int count) {
  Node node;
  node.box_min = node.box_max = points_[order_[first]];
  for (int i = first; i < first + count; ++i) {
    const Vec3& p = points_[order_[i]];
    node.box_min = node.box_min.cwiseMin(p);
    node.box_max = node.box_max.cwiseMax(p);
  }
  int id = int(nodes_.size());
  nodes_.push_back(node);
  if (count <= kLeafSize) {
    nodes_[id].first = first;
    nodes_[id].count = count;
    return id;
  }
  Vec3 extent = node.box_max - node.box_min;
  int axis = 0;
  if (extent.y() > extent.x()) axis = 1;
  if (extent.z() > extent[axis]) axis = 2;
  int mid = first + count / 2;
  std::nth_element(order_.begin() + first, order_.begin() + mid,
                   order_.begin() + first + count, [&](int a, int b) {
                     double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  int left = Build(first, mid - first);
  int right = Build(mid, first + count - mid);
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

int PointIndex::Nearest(const Vec3& query, double* distance) const {
  int best = -1;
  double best_sq = std::numeric_limits<double>::infinity();

  auto box_dist_sq = [&](const Node& n) {
    double d = 0;
    for (int a = 0; a < 3; ++a) {
      double lo = n.box_min[a] - query[a], hi = query[a] - n.box_max[a];
      double g = std::max({lo, hi, 0.0});
      d += g * g;
    }
    return d;
  };

  // Manual stack; descend nearer child first.
  int stack[64];
  int top = 0;
  stack[top++] = root_;
  while (top > 0) {
    const Node& n = nodes_[stack[--top]];
    if (box_dist_sq(n) >= best_sq) continue;
    if (n.left < 0) {
      for (int i = n.first; i < n.first + n.count; ++i) {
        double d = (points_[order_[i]] - query).squaredNorm();
        if (d < best_sq) {
          best_sq = d;
          best = order_[i];
        }
      }
      continue;
    }
    double dl = box_dist_sq(nodes_[n.left]), dr = box_dist_sq(nodes_[n.right]);
    if (dl < dr) {
      stack[top++] = n.right;
      stack[top++] = n.left;
    } else {
      stack[top++] = n.left;
      stack[top++] = n.right;
    }
  }
  if (distance) *distance = std::sqrt(best_sq);
  return best;
}

void PointIndex::ForEachNearLine(const Vec3& origin, const Vec3& dir, double radius,
                                 const std::function<void(int)>& fn) const {
  if (std::abs(dir.norm() - 1.0) > 1e-9) throw InvalidInput("line direction must be unit");
  double r_sq = radius * radius;

  auto point_near = [&](const Vec3& p) {
    Vec3 d = p - origin;
    return (d - dir * d.dot(dir)).squaredNorm() <= r_sq;
  };
  // Conservative node test: distance from box center to the line minus the
  // half-diagonal. Never prunes a box containing an in-range point.
  auto box_may_intersect = [&](const Node& n) {
    Vec3 c = 0.5 * (n.box_min + n.box_max);
    Vec3 d = c - origin;
    double center_dist = (d - dir * d.dot(dir)).norm();
    double half_diag = 0.5 * (n.box_max - n.box_min).norm();
    return center_dist <= radius + half_diag;
  };

  std::vector<int> stack;
  stack.reserve(64);
  stack.push_back(root_);
  while (!stack.empty()) {
    const Node& n = nodes_[stack.back()];
    stack.pop_back();
    if (!box_may_intersect(n)) continue;
    if (n.left < 0) {
      for (int i = n.first; i < n.first + n.count; ++i)
        if (point_near(points_[order_[i]])) fn(order_[i]);
      continue;
    }
    stack.push_back(n.right);
    stack.push_back(n.left);
  }
}

}  // namespace shellkit
