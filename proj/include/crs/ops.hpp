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
#include <span>
#include <vector>

#include "crs/tensor.hpp"

CRS_NN_BEGIN_NAMESPACE

enum class PadMode { zeros, replicate, reflect };

// Weights [C_out, C_in, k_h, k_w] and bias [C_out] of a 2-d convolution.
struct ConvParams {
  Tensor weight;
  Tensor bias;
  int stride = 1;
  int padding = 1;
  PadMode pad_mode = PadMode::zeros;

  std::int64_t out_channels() const { return weight.dim(0); }
  std::int64_t in_channels() const { return weight.dim(1); }
  std::int64_t kernel_h() const { return weight.dim(2); }
  std::int64_t kernel_w() const { return weight.dim(3); }
};

// Differentiable tensor primitives. Every op is a pure function of its inputs;
// when a GradTape is recording and an input requires a gradient, the op
// records its adjoint on the tape.
namespace ops {

Tensor conv2d(const Tensor& x, const ConvParams& p);

Tensor relu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, Real s);

// x: C x H x W, plane: 1 x H x W broadcast over channels.
Tensor mul_plane(const Tensor& x, const Tensor& plane);
// Per-position dot product over channels: (C x H x W, C x H x W) -> 1 x H x W.
Tensor channel_dot(const Tensor& a, const Tensor& b);

Tensor concat_channels(std::span<const Tensor> xs);
Tensor slice_channels(const Tensor& x, std::int64_t begin, std::int64_t count);
// n tensors of C channels -> C*n channels, output channel c*n + t = xs[t][c].
Tensor interleave_channels(std::span<const Tensor> xs);
Tensor reshape(const Tensor& x, Shape shape);

// (C r^2) x H x W -> C x rH x rW.
Tensor pixel_shuffle(const Tensor& x, int r);

// Bilinear resize with the source coordinate src = dst * in / out, so for
// integer factors every f-th output sample coincides with an input sample.
Tensor upsample_bilinear(const Tensor& x, std::int64_t out_h, std::int64_t out_w);

// Samples feat (C x H x W) at coords (2 x Ho x Wo, channel 0 = y, 1 = x).
// Positions outside the frame are clamped to the border.
Tensor bilinear_sample(const Tensor& feat, const Tensor& coords);

// Sliding windows of x (C x H x W) as a [N_patches, C*k*k] matrix. Patch rows
// follow raster order of the window grid; columns are (c, ky, kx) row-major.
Tensor unfold(const Tensor& x, int k, int stride, int pad = 0, PadMode mode = PadMode::zeros);

// Overlap-add of unfold-layout patches onto a channels x out_h x out_w canvas,
// each pixel divided by the number of windows covering it.
Tensor fold(const Tensor& patches, std::int64_t channels, int k, int stride, int pad,
            std::int64_t out_h, std::int64_t out_w);

// Row gather from a [N, D] matrix.
Tensor index_rows(const Tensor& m, std::span<const std::int64_t> rows);

Tensor sum(const Tensor& x);
// mean |a - b|
Tensor l1_loss(const Tensor& a, const Tensor& b);

// Bicubic resampling of every channel of a C x H x W tensor by factor d, with
// the same filter bank as the frame resampler.
Tensor bicubic_down(const Tensor& x, int d);
Tensor bicubic_up(const Tensor& x, int d);

}  // namespace ops

CRS_NN_END_NAMESPACE
