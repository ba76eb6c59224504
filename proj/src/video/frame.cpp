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

#include "crs/frame.hpp"

#include <algorithm>
#include <cmath>

#include "crs/error.hpp"

namespace crs {

Plane::Plane(int w, int h, std::uint8_t fill)
    : width(w), height(h), samples(static_cast<std::size_t>(w) * h, fill) {}

Image::Image(int w, int h, double fill)
    : width(w), height(h), px(static_cast<std::size_t>(w) * h, fill) {}

std::uint8_t round_sample(double v) {
  const double r = std::floor(v + 0.5);
  return static_cast<std::uint8_t>(std::clamp(r, 0.0, 255.0));
}

Image to_image(const Plane& p) {
  Image img(p.width, p.height);
  std::copy(p.samples.begin(), p.samples.end(), img.px.begin());
  return img;
}

Plane to_plane(const Image& img) {
  Plane p(img.width, img.height);
  std::transform(img.px.begin(), img.px.end(), p.samples.begin(), round_sample);
  return p;
}

Frame::Frame(int w, int h, std::uint8_t luma, std::uint8_t chroma) : width(w), height(h) {
  if (w <= 0 || h <= 0 || w % 2 != 0 || h % 2 != 0) {
    throw ShapeError("4:2:0 frame needs positive even dimensions, got " + std::to_string(w) +
                     "x" + std::to_string(h));
  }
  y = Plane(w, h, luma);
  u = Plane(w / 2, h / 2, chroma);
  v = Plane(w / 2, h / 2, chroma);
}

Plane& Frame::plane(int index) {
  switch (index) {
    case 0: return y;
    case 1: return u;
    case 2: return v;
  }
  throw ArgumentError("plane index " + std::to_string(index) + " out of range");
}

const Plane& Frame::plane(int index) const {
  return const_cast<Frame*>(this)->plane(index);
}

}  // namespace crs
