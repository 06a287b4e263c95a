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

#include "shellkit/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace shellkit {

namespace {

std::ifstream OpenIn(const std::string& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream OpenOut(const std::string& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void CheckWrite(std::ostream& out, const std::string& path) {
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

void WriteDmap(const std::string& path, const DepthImage& img) {
  if (img.width <= 0 || img.height <= 0) throw InvalidInput("empty depth image");
  auto out = OpenOut(path, true);
  out << "DMAP1\n" << img.width << " " << img.height << "\n";
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(img.data.data()),
            std::streamsize(img.data.size() * sizeof(float)));
  CheckWrite(out, path);
}

DepthImage ReadDmap(const std::string& path) {
  auto in = OpenIn(path, true);
  std::string magic;
  std::getline(in, magic);
  if (magic != "DMAP1") throw IoError("bad dmap magic in " + path);
  std::string dims;
  std::getline(in, dims);
  std::istringstream ds(dims);
  long w = 0, h = 0;
  if (!(ds >> w >> h) || w <= 0 || h <= 0 || w > 1 << 20 || h > 1 << 20)
    throw IoError("bad dmap dimensions in " + path);
  DepthImage img{int(w), int(h)};
  in.read(reinterpret_cast<char*>(img.data.data()),
          std::streamsize(img.data.size() * sizeof(float)));
  if (size_t(in.gcount()) != img.data.size() * sizeof(float))
    throw IoError("truncated dmap payload in " + path);
  return img;
}

void WriteCamera(const std::string& path, const CameraModel& cam) {
  cam.Validate();
  auto out = OpenOut(path, false);
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "fx=%.17g\nfy=%.17g\ncx=%.17g\ncy=%.17g\nwidth=%d\nheight=%d\n",
                cam.fx, cam.fy, cam.cx, cam.cy, cam.width, cam.height);
  out << buf;
  CheckWrite(out, path);
}

CameraModel ReadCamera(const std::string& path) {
  auto in = OpenIn(path, false);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw IoError("bad camera line in " + path);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  for (const char* key : {"fx", "fy", "cx", "cy", "width", "height"})
    if (!kv.count(key))
      throw IoError(std::string("camera file missing ") + key + ": " + path);
  CameraModel cam;
  try {
    cam.fx = std::stod(kv["fx"]);
    cam.fy = std::stod(kv["fy"]);
    cam.cx = std::stod(kv["cx"]);
    cam.cy = std::stod(kv["cy"]);
    cam.width = std::stoi(kv["width"]);
    cam.height = std::stoi(kv["height"]);
  } catch (const std::exception&) {
    throw IoError("unparsable camera value in " + path);
  }
  cam.Validate();  // throws InvalidInput on bad intrinsics
  return cam;
}

void WriteObj(const std::string& path, const TriangleMesh& mesh) {
  auto out = OpenOut(path, false);
  char buf[160];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& t : mesh.triangles) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out << buf;
  }
  CheckWrite(out, path);
}

TriangleMesh ReadObj(const std::string& path) {
  auto in = OpenIn(path, false);
  TriangleMesh mesh;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ls >> x >> y >> z))
        throw IoError(path + ":" + std::to_string(lineno) + ": bad vertex");
      mesh.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) {
        // "3", "3/7", "3/7/2", "3//2" all refer to vertex 3.
        size_t slash = tok.find('/');
        if (slash != std::string::npos) tok = tok.substr(0, slash);
        long i = 0;
        try {
          i = std::stol(tok);
        } catch (const std::exception&) {
          throw IoError(path + ":" + std::to_string(lineno) + ": bad face index");
        }
        if (i < 1 || size_t(i) > mesh.vertices.size())
          throw IoError(path + ":" + std::to_string(lineno) +
                        ": face index out of range");
        idx.push_back(int(i - 1));
      }
      if (idx.size() < 3)
        throw IoError(path + ":" + std::to_string(lineno) + ": short face");
      for (size_t k = 2; k < idx.size(); ++k)
        mesh.triangles.push_back({idx[0], idx[k - 1], idx[k]});
    }
    // Other records (vn, vt, o, comments, ...) are ignored.
  }
  return mesh;
}

void WritePgm(const std::string& path, int width, int height, int maxval,
              const std::vector<uint16_t>& pixels) {
  if (width <= 0 || height <= 0) throw InvalidInput("empty pgm");
  if (maxval != 255 && maxval != 65535) throw InvalidInput("pgm maxval must be 255 or 65535");
  if (pixels.size() != size_t(width) * height) throw InvalidInput("pgm pixel count mismatch");
  auto out = OpenOut(path, true);
  out << "P5\n" << width << " " << height << "\n" << maxval << "\n";
  if (maxval == 255) {
    std::vector<uint8_t> bytes(pixels.size());
    for (size_t i = 0; i < pixels.size(); ++i) bytes[i] = uint8_t(pixels[i] & 0xff);
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  } else {
    std::vector<uint8_t> bytes(pixels.size() * 2);
    for (size_t i = 0; i < pixels.size(); ++i) {
      bytes[2 * i] = uint8_t(pixels[i] >> 8);  // most significant byte first
      bytes[2 * i + 1] = uint8_t(pixels[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  }
  CheckWrite(out, path);
}

PgmImage ReadPgm(const std::string& path) {
  auto in = OpenIn(path, true);
  auto next_token = [&in, &path]() {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
      if (c == '#') {  // comment to end of line
        while ((c = in.get()) != EOF && c != '\n') {
        }
        continue;
      }
      if (std::isspace(c)) {
        if (!tok.empty()) break;
        continue;
      }
      tok.push_back(char(c));
    }
    if (tok.empty()) throw IoError("truncated pgm header in " + path);
    return tok;
  };
  if (next_token() != "P5") throw IoError("not a P5 pgm: " + path);
  PgmImage img;
  try {
    img.width = std::stoi(next_token());
    img.height = std::stoi(next_token());
    img.maxval = std::stoi(next_token());
  } catch (const std::exception&) {
    throw IoError("bad pgm header in " + path);
  }
  if (img.width <= 0 || img.height <= 0 || img.maxval <= 0 || img.maxval > 65535)
    throw IoError("bad pgm header in " + path);
  size_t n = size_t(img.width) * img.height;
  img.pixels.resize(n);
  if (img.maxval < 256) {
    std::vector<uint8_t> bytes(n);
    in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(n));
    if (size_t(in.gcount()) != n) throw IoError("truncated pgm payload in " + path);
    for (size_t i = 0; i < n; ++i) img.pixels[i] = bytes[i];
  } else {
    std::vector<uint8_t> bytes(n * 2);
    in.read(reinterpret_cast<char*>(bytes.data()), std::streamsize(n * 2));
    if (size_t(in.gcount()) != n * 2) throw IoError("truncated pgm payload in " + path);
    for (size_t i = 0; i < n; ++i)
      img.pixels[i] = uint16_t((uint16_t(bytes[2 * i]) << 8) | bytes[2 * i + 1]);
  }
  return img;
}

void WriteDepthPgm(const std::string& path, const DepthImage& img) {
  std::vector<uint16_t> px(img.data.size(), 0);
  for (size_t i = 0; i < img.data.size(); ++i) {
    float d = img.data[i];
    if (!(d > 0.0f) || !std::isfinite(d)) continue;
    double mm = std::round(double(d) * 1000.0);
    px[i] = uint16_t(std::min(65535.0, std::max(0.0, mm)));
  }
  WritePgm(path, img.width, img.height, 65535, px);
}

}  // namespace shellkit
