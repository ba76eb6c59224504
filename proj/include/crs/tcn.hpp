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
#include <string>
#include <vector>

#include "crs/layers.hpp"
#include "crs/model_config.hpp"

CRS_NN_BEGIN_NAMESPACE

struct MultiScaleFeatures {
  Tensor full;     // C x H x W
  Tensor half;     // C x H/2 x W/2
  Tensor quarter;  // C x H/4 x W/4
};

// Best key patch per query patch on the quarter-scale grid.
struct AffinityResult {
  Tensor a;                          // 1 x h x w, cosine of the selected pair
  std::vector<std::int64_t> p;       // raster index of the selected key patch
  std::int64_t grid_h = 0;
  std::int64_t grid_w = 0;
};

struct TextureBundle {
  Tensor f;    // quarter scale
  Tensor f_l;  // half scale
  Tensor f_h;  // full scale
  Tensor a;    // 1 x H/4 x W/4
  Tensor a_l;  // 1 x H/2 x W/2
  Tensor a_h;  // 1 x H x W
  std::vector<std::int64_t> p;
};

inline constexpr double kNormEps = 1e-12;

// Unfolds with a 3x3 reflect-padded window, L2-normalizes every patch and keeps
// the best key for each query. Ties go to the lowest key index.
AffinityResult build_affinity(const Tensor& k, const Tensor& q);

class Tcn {
 public:
  Tcn() = default;
  Tcn(ParamStore& store, const std::string& prefix, const ModelConfig& cfg);

  MultiScaleFeatures mfe(const Tensor& frame) const;
  // Returns {F, F^L, F^H}.
  std::vector<Tensor> transfer_textures(const MultiScaleFeatures& v,
                                        const std::vector<std::int64_t>& p) const;
  TextureBundle forward(const Tensor& s_hat, const Tensor& s_tilde, const Tensor& t_up) const;

  const ConvParams& embed_half() const { return embed_half_; }
  const ConvParams& embed_full() const { return embed_full_; }

 private:
  ModelConfig cfg_;
  ConvParams mfe_in_;
  std::vector<ResBlock> mfe_blocks_;
  ConvParams mfe_down1_;
  ConvParams mfe_down2_;
  ConvParams embed_half_;
  ConvParams embed_full_;
};

CRS_NN_END_NAMESPACE
