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

#include "shellkit/geometry.hpp"

namespace shellkit {

/// Closed axis-aligned box centered at the origin, each face subdivided
/// into subdiv x subdiv quads (12 * subdiv^2 triangles, outward winding).
TriangleMesh MakeBox(const Vec3& size, int subdiv = 1);

/// Closed cylinder centered at the origin with its axis along +Z.
/// radial_segments around, height_segments along the wall; caps are
/// triangle fans. Outward winding.
TriangleMesh MakeCylinder(double radius, double height, int radial_segments,
                          int height_segments = 1);

/// Geodesic sphere: icosahedron subdivided `level` times and projected to
/// radius (20 * 4^level triangles, outward winding), centered at origin.
TriangleMesh MakeIcosphere(double radius, int level);

}  // namespace shellkit
