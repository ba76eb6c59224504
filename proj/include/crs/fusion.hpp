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

#include <string>
#include <vector>

#include "crs/layers.hpp"
#include "crs/model_config.hpp"
#include "crs/tcn.hpp"

CRS_NN_BEGIN_NAMESPACE

struct FusionInputs {
  Tensor motion;                       // C x H/2 x W/2 aggregated motion features
  std::vector<TextureBundle> textures; // one (LDP) or two (RA, preceding intra first)
  Tensor t_up;                         // in_ch x H x W upsampled inter frame
};

class Fusion {
 public:
  Fusion() = default;
  Fusion(ParamStore& store, const std::string& prefix, const ModelConfig& cfg);

  Tensor forward(const FusionInputs& in) const;

  const ConvParams& projection() const { return proj_; }

 private:
  ModelConfig cfg_;
  ConvParams lift_;
  ConvParams half_in_;
  std::vector<ResBlock> half_blocks_;
  ConvParams half_up_;
  ConvParams full_skip_;
  ConvParams full_in_;
  std::vector<ResBlock> full_blocks_;
  ConvParams proj_;
};

CRS_NN_END_NAMESPACE
