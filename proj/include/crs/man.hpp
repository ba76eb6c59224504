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

#include <span>
#include <string>
#include <vector>

#include "crs/layers.hpp"
#include "crs/model_config.hpp"

CRS_NN_BEGIN_NAMESPACE

// T low-resolution frames (in_channels x h x w each) centred on the frame
// being restored. Frames missing at GoP edges are filled by replicating the
// nearest available one.
struct TemporalWindow {
  std::vector<Tensor> frames;
  int center = 1;
};

// Offsets (2*9 channels, (dy, dx) per 3x3 tap) and sigmoid modulation masks
// (9 channels) per pyramid level, finest level first.
struct OffsetPyramid {
  std::vector<Tensor> offsets;
  std::vector<Tensor> masks;
};

// Intermediate values of the attention aggregation, exposed for inspection.
struct AggregationTrace {
  std::vector<Tensor> branches;  // per window slot; the self slot is unmasked
  std::vector<Tensor> ta_masks;  // per slot, empty tensor for the self slot
  Tensor fused;
  Tensor sa_mask;
};

// Modulated deformable 3x3 convolution (stride 1, pad 1): tap t of output
// (y, x) samples feat at (y + ky - 1 + dy_t, x + kx - 1 + dx_t) with the
// border-clamped bilinear sampler and scales it by mask_t.
Tensor deform_conv2d(const Tensor& feat, const Tensor& offsets, const Tensor& masks,
                     const ConvParams& p);

// Multiscale network: an input conv, then a pyramid of stride-2 levels with
// residual blocks, merged coarse-to-fine. Returns per-level features, finest
// first.
class Msn {
 public:
  Msn() = default;
  Msn(ParamStore& store, const std::string& name, std::int64_t in_ch, const ModelConfig& cfg);
  std::vector<Tensor> forward(const Tensor& x) const;

 private:
  ConvParams head_;
  std::vector<ConvParams> down_;
  std::vector<std::vector<ResBlock>> blocks_;
  std::vector<ConvParams> merge_;
};

// Motion alignment and aggregation network.
class Man {
 public:
  Man() = default;
  Man(ParamStore& store, const std::string& prefix, const ModelConfig& cfg);

  // Input conv and the shared residual trunk: in_channels x h x w -> C x h x w.
  Tensor extract_features(const Tensor& frame) const;
  OffsetPyramid compute_offsets(const Tensor& feat_cur, const Tensor& feat_nbr) const;
  Tensor dcn_align(const Tensor& feat_nbr, const OffsetPyramid& off) const;
  Tensor aggregate(std::span<const Tensor> aligned, int self_idx,
                   AggregationTrace* trace = nullptr) const;
  Tensor forward(const TemporalWindow& win) const;

  const ConvParams& dcn_params() const { return dcn_; }

 private:
  ModelConfig cfg_;
  ConvParams feat_in_;
  std::vector<ResBlock> feat_blocks_;
  Msn offset_msn_;
  std::vector<ConvParams> offset_heads_;
  ConvParams dcn_;
  ConvParams ta_ref_;
  ConvParams ta_nbr_;
  ConvParams ta_fuse_;
  Msn sa_msn_;
  ConvParams sa_head_;
};

CRS_NN_END_NAMESPACE
