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

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First and second moment buffers, one per parameter, plus the step counter
// used for bias correction.
struct AdamState {
  std::int64_t step = 0;
  std::vector<std::vector<Real>> m;
  std::vector<std::vector<Real>> v;
};

// One Adam update of `params` using the gradients accumulated on each tensor
// (a tensor without a gradient contributes zeros). Throws NumericError before
// touching any parameter if a gradient is not finite.
void adam_step(std::span<Tensor> params, AdamState& state, const AdamConfig& cfg);

CRS_NN_END_NAMESPACE
