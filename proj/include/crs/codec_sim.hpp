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
#include "crs/gop.hpp"

namespace crs {

inline constexpr int kBlock = 8;

struct QpModel {
  int qp = 32;

  explicit QpModel(int q = 32);
  double step() const;
};

struct MotionVector {
  int dy = 0;
  int dx = 0;
  bool operator==(const MotionVector&) const = default;
};

// Prediction convention: pred(y, x) = ref(y + dy, x + dx).
struct MotionField {
  int block_size = kBlock;
  int blocks_x = 0;
  int blocks_y = 0;
  std::vector<MotionVector> vectors;  // raster order

  const MotionVector& at(int bx, int by) const { return vectors[by * blocks_x + bx]; }
};

struct CodedFrame {
  Frame recon;
  double bits = 0.0;
};

struct CodecRun {
  int frame = 0;
  FrameRole role = FrameRole::intra;
  Tier tier = Tier::hr;
  int qp = 0;
  double bits = 0.0;
  Frame recon;
};

// 8x8 orthonormal DCT-II and its inverse on a row-major block.
void dct8x8(const double* in, double* out);
void idct8x8(const double* in, double* out);

// Rounding quantizer shared by intra and residual coding.
int quantize(double coeff, double step);

// Rate proxy for one block of quantized levels.
double block_bits(const int* levels, int n);

// Level-shifted transform coding of every plane.
CodedFrame simulate_intra(const Frame& s, const QpModel& qp);

MotionField estimate_motion(const Plane& cur, const Plane& ref, int search);
MotionField estimate_motion(const Frame& cur, const Frame& ref, int search);
Frame motion_compensate(const Frame& ref, const MotionField& mf);
double motion_bits(const MotionField& mf);

CodedFrame simulate_inter(const Frame& t, const Frame& ref, const QpModel& qp, int search);

}  // namespace crs
