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
#include <functional>
#include <span>
#include <string>

#include "crs/tensor.hpp"

CRS_NN_BEGIN_NAMESPACE

struct GradCheckOptions {
  double eps = 1e-3;
  // Elements checked per input tensor; <= 0 checks all of them. Larger
  // tensors are sampled uniformly with a seeded generator.
  std::int64_t max_samples = 0;
  std::uint64_t seed = 0;
  // Denominator floor of the relative error, so entries where both gradients
  // vanish do not divide by zero.
  double floor = 1e-6;
};

struct GradCheckResult {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::int64_t checked = 0;
  std::string worst;  // "input i, element j: analytic a vs numeric n"
};

// Compares the reverse-mode gradient of sum(f()) with respect to each tensor
// in `inputs` against central differences (f(x + eps) - f(x - eps)) / 2eps.
// f must read the inputs through the handles it captured; they are perturbed
// in place and restored. Relative error per element is
// |a - n| / max(|a|, |n|, floor).
GradCheckResult grad_check(const std::function<Tensor()>& f, std::span<Tensor> inputs,
                           const GradCheckOptions& opts = {});

CRS_NN_END_NAMESPACE
