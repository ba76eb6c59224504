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

#include "crs/resample.hpp"

#include <cmath>
#include <string>

#include "crs/error.hpp"

namespace crs {

double bicubic_kernel(double t, double a) {
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

int reflect_index(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

namespace {

void check_factor(int d) {
  if (d != 2) throw ArgumentError("resampling factor must be 2, got " + std::to_string(d));
}

void normalize_row(double* w, int taps) {
  double s = 0.0;
  for (int t = 0; t < taps; ++t) s += w[t];
  for (int t = 0; t < taps; ++t) w[t] /= s;
}

}  // namespace

FilterTaps bicubic_down_taps(int in_len, int d) {
  check_factor(d);
  if (in_len <= 0 || in_len % d != 0) {
    throw ShapeError("downsampling axis of length " + std::to_string(in_len) +
                     " is not divisible by " + std::to_string(d));
  }
  FilterTaps f;
  f.in_len = in_len;
  f.out_len = in_len / d;
  f.taps = 4 * d;
  f.index.resize(static_cast<std::size_t>(f.out_len) * f.taps);
  f.weight.resize(f.index.size());
  for (int o = 0; o < f.out_len; ++o) {
    const double center = (o + 0.5) * d - 0.5;
    const int first = static_cast<int>(std::floor(center)) - 2 * d + 1;
    double* w = &f.weight[static_cast<std::size_t>(o) * f.taps];
    int* idx = &f.index[static_cast<std::size_t>(o) * f.taps];
    for (int t = 0; t < f.taps; ++t) {
      const int j = first + t;
      w[t] = bicubic_kernel((j - center) / d);
      idx[t] = reflect_index(j, in_len);
    }
    normalize_row(w, f.taps);
  }
  return f;
}

FilterTaps bicubic_up_taps(int in_len, int d) {
  check_factor(d);
  if (in_len <= 0) throw ShapeError("upsampling axis of length " + std::to_string(in_len));
  FilterTaps f;
  f.in_len = in_len;
  f.out_len = in_len * d;
  f.taps = 4;
  f.index.resize(static_cast<std::size_t>(f.out_len) * f.taps);
  f.weight.resize(f.index.size());
  for (int o = 0; o < f.out_len; ++o) {
    const double center = (o + 0.5) / d - 0.5;
    const int first = static_cast<int>(std::floor(center)) - 1;
    double* w = &f.weight[static_cast<std::size_t>(o) * f.taps];
    int* idx = &f.index[static_cast<std::size_t>(o) * f.taps];
    for (int t = 0; t < f.taps; ++t) {
      const int j = first + t;
      w[t] = bicubic_kernel(j - center);
      idx[t] = reflect_index(j, in_len);
    }
    normalize_row(w, f.taps);
  }
  return f;
}

Image apply_separable(const Image& img, const FilterTaps& tx, const FilterTaps& ty) {
  if (tx.in_len != img.width) throw ShapeError("horizontal taps do not match image width");
  if (ty.in_len != img.height) throw ShapeError("vertical taps do not match image height");
  Image mid(tx.out_len, img.height);
  for (int y = 0; y < img.height; ++y) {
    const double* row = &img.px[static_cast<std::size_t>(y) * img.width];
    for (int o = 0; o < tx.out_len; ++o) {
      const std::size_t base = static_cast<std::size_t>(o) * tx.taps;
      double acc = 0.0;
      for (int t = 0; t < tx.taps; ++t) acc += tx.weight[base + t] * row[tx.index[base + t]];
      mid.at(o, y) = acc;
    }
  }
  Image out(tx.out_len, ty.out_len);
  for (int o = 0; o < ty.out_len; ++o) {
    const std::size_t base = static_cast<std::size_t>(o) * ty.taps;
    for (int x = 0; x < out.width; ++x) {
      double acc = 0.0;
      for (int t = 0; t < ty.taps; ++t) acc += ty.weight[base + t] * mid.at(x, ty.index[base + t]);
      out.at(x, o) = acc;
    }
  }
  return out;
}

Image bicubic_down(const Image& img, int d) {
  return apply_separable(img, bicubic_down_taps(img.width, d), bicubic_down_taps(img.height, d));
}

Image bicubic_up(const Image& img, int d) {
  return apply_separable(img, bicubic_up_taps(img.width, d), bicubic_up_taps(img.height, d));
}

Image degrade(const Image& img) { return bicubic_up(bicubic_down(img, 2), 2); }

namespace {

template <class PlaneFn>
Frame map_planes(const Frame& f, int out_w, int out_h, PlaneFn fn) {
  Frame out;
  out.width = out_w;
  out.height = out_h;
  out.tier = f.tier;
  for (int p = 0; p < 3; ++p) out.plane(p) = to_plane(fn(to_image(f.plane(p))));
  return out;
}

void check_frame_down(const Frame& f, int d) {
  if (f.width % (2 * d) != 0 || f.height % (2 * d) != 0) {
    throw ShapeError("frame " + std::to_string(f.width) + "x" + std::to_string(f.height) +
                     " cannot be downscaled by " + std::to_string(d) +
                     " with 4:2:0 chroma (width and height must be multiples of " +
                     std::to_string(2 * d) + ")");
  }
}

}  // namespace

Frame bicubic_down(const Frame& f, int d) {
  check_factor(d);
  check_frame_down(f, d);
  Frame out = map_planes(f, f.width / d, f.height / d,
                         [d](const Image& img) { return bicubic_down(img, d); });
  out.tier = Tier::lr;
  return out;
}

Frame bicubic_up(const Frame& f, int d) {
  check_factor(d);
  Frame out = map_planes(f, f.width * d, f.height * d,
                         [d](const Image& img) { return bicubic_up(img, d); });
  out.tier = Tier::hr;
  return out;
}

Frame degrade(const Frame& f) {
  check_frame_down(f, 2);
  return map_planes(f, f.width, f.height, [](const Image& img) { return degrade(img); });
}

}  // namespace crs
