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

#include <cstdint>
#include <string>
#include <vector>

#include "shellkit/geometry.hpp"

namespace shellkit {

// Depth rasters travel as ".dmap": ASCII line "DMAP1", ASCII line
// "<width> <height>", then width*height little-endian IEEE-754 float32
// values in meters, row-major. Write/read round-trips are bit-exact.
void WriteDmap(const std::string& path, const DepthImage& img);
DepthImage ReadDmap(const std::string& path);

// Camera intrinsics as flat text, one key=value per line:
// fx, fy, cx, cy, width, height.
void WriteCamera(const std::string& path, const CameraModel& cam);
CameraModel ReadCamera(const std::string& path);

// ASCII OBJ, v/f records only. Faces with more than three vertices are
// fan-triangulated on read; "v/vt/vn" style indices keep only the vertex.
void WriteObj(const std::string& path, const TriangleMesh& mesh);
TriangleMesh ReadObj(const std::string& path);

// Binary PGM (P5). maxval 255 writes one byte per pixel, maxval 65535 two
// bytes most-significant first.
void WritePgm(const std::string& path, int width, int height, int maxval,
              const std::vector<uint16_t>& pixels);

struct PgmImage {
  int width = 0, height = 0, maxval = 0;
  std::vector<uint16_t> pixels;
};
PgmImage ReadPgm(const std::string& path);

// Depth visualization: 16-bit PGM of integer millimeters clamped to
// [0, 65535]; invalid pixels write 0.
void WriteDepthPgm(const std::string& path, const DepthImage& img);

}  // namespace shellkit
