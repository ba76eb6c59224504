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

#include <vector>

#include "crs/frame.hpp"

namespace crs {

// Keys cubic convolution parameter (Catmull-Rom family).
inline constexpr double kBicubicA = -0.5;

double bicubic_kernel(double t, double a = kBicubicA);

// Half-sample symmetric reflection: -1 -> 0, n -> n - 1.
int reflect_index(int i, int n);

// Per-output filter taps along one axis: output o reads input samples
// index[o * taps + t] (already reflected into range) with weight
// weight[o * taps + t]. Every row of weights sums to one.
//
// Both directions use a center-aligned grid. Downsampling by d maps output o
// to input coordinate (o + 0.5) * d - 0.5 and stretches the kernel by d (4d
// taps); upsampling maps output o to (o + 0.5) / d - 0.5 with 4 taps.
struct FilterTaps {
  int in_len = 0;
  int out_len = 0;
  int taps = 0;
  std::vector<int> index;
  std::vector<double> weight;
};

FilterTaps bicubic_down_taps(int in_len, int d);
FilterTaps bicubic_up_taps(int in_len, int d);

// Horizontal pass with tx, then vertical pass with ty.
Image apply_separable(const Image& img, const FilterTaps& tx, const FilterTaps& ty);

Image bicubic_down(const Image& img, int d);
Image bicubic_up(const Image& img, int d);
Image degrade(const Image& img);

// Frame variants filter every plane with the same kernel and round once.
Frame bicubic_down(const Frame& f, int d);
Frame bicubic_up(const Frame& f, int d);
// Down by two then up by two in real arithmetic, rounded once.
Frame degrade(const Frame& f);

}  // namespace crs
