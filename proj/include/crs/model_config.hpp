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

#include "crs/config.hpp"

CRS_NN_BEGIN_NAMESPACE

// Architecture hyper-parameters shared by the three sub-networks.
struct ModelConfig {
  std::int64_t in_channels = 1;  // 1 for luma, 2 for the combined U/V model
  std::int64_t channels = 64;
  int feature_blocks = 4;  // residual blocks of the MAN and MFE trunks
  int msn_levels = 3;
  int msn_blocks = 2;      // residual blocks per pyramid level
  int fusion_blocks = 8;   // residual blocks per fusion scale
  int window = 3;          // temporal window T = 2M + 1
  int texture_slots = 2;   // fusion inputs for intra references (RA uses both)
};

CRS_NN_END_NAMESPACE
