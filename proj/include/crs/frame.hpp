// Copyright 2026 The CRS Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

namespace crs {

// Resolution tier of a coded picture: HR intra frames keep the input size,
// LR inter frames are downscaled by two per axis.
enum class Tier { hr, lr };

// One 8-bit sample plane.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> samples;

  Plane() = default;
  Plane(int w, int h, std::uint8_t fill = 0);

  std::uint8_t& at(int x, int y) { return samples[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t at(int x, int y) const { return samples[static_cast<std::size_t>(y) * width + x]; }
  bool operator==(const Plane&) const = default;
};

// Real-valued working copy of a plane, used inside filters so rounding to 8
// bits happens once at the module boundary.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> px;

  Image() = default;
  Image(int w, int h, double fill = 0.0);

  double& at(int x, int y) { return px[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return px[static_cast<std::size_t>(y) * width + x]; }
};

Image to_image(const Plane& p);
// Rounds half away from zero and clips to [0, 255].
Plane to_plane(const Image& img);
std::uint8_t round_sample(double v);

// Planar YUV 4:2:0 picture with 8-bit samples.
struct Frame {
  int width = 0;
  int height = 0;
  Plane y;
  Plane u;
  Plane v;
  Tier tier = Tier::hr;

  Frame() = default;
  Frame(int w, int h, std::uint8_t luma = 0, std::uint8_t chroma = 128);

  Plane& plane(int index);
  const Plane& plane(int index) const;
  bool operator==(const Frame& o) const {
    return width == o.width && height == o.height && y == o.y && u == o.u && v == o.v;
  }
};

struct Sequence {
  std::vector<Frame> frames;
  double fps = 30.0;
  int width = 0;   // padded (working) dimensions
  int height = 0;
  int orig_width = 0;   // dimensions before alignment padding
  int orig_height = 0;

  int size() const { return static_cast<int>(frames.size()); }
};

}  // namespace crs
