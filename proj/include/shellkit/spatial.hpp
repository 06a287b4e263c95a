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

#include <functional>
#include <vector>

#include "shellkit/geometry.hpp"

namespace shellkit {

/// Exact nearest-neighbor k-d tree over a fixed point set. Queries are
/// read-only and safe to issue from multiple threads.
class PointIndex {
 public:
  explicit PointIndex(std::vector<Vec3> points);

  const std::vector<Vec3>& Points() const { return points_; }
  const Vec3& Point(int i) const { return points_[size_t(i)]; }
  size_t Size() const { return points_.size(); }

  /// Index of the closest point (exact). Ties resolve to the smallest
  /// index reached first in traversal; the distance is what callers use.
  int Nearest(const Vec3& query, double* distance = nullptr) const;

  /// Invokes fn(point_index) for every point within `radius` of the
  /// infinite line through `origin` with unit direction `dir`. Visit order
  /// is deterministic. Pruning is conservative; every reported point truly
  /// satisfies the distance bound.
  void ForEachNearLine(const Vec3& origin, const Vec3& dir, double radius,
                       const std::function<void(int)>& fn) const;

 private:
  struct Node {
    Vec3 box_min, box_max;
    int left = -1, right = -1;  // child nodes, -1 for leaf
    int first = 0, count = 0;   // leaf range into order_
  };

  int Build(int first, int count);

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

}  // namespace shellkit
