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

#include "crs/config.hpp"

namespace crs {

struct GradCheckEntry {
  std::string name;
  double max_rel_err = 0.0;
  std::int64_t checked = 0;
  double seconds = 0.0;
  std::string worst;
};

struct SelfCheckOptions {
  int size = 16;                   // HR edge length; LR inputs are half of it
  std::int64_t channels = 64;
  std::uint64_t seed = 1;
  std::int64_t max_samples = 12;   // finite-difference probes per checked tensor
  double eps = 1e-6;               // wider steps straddle ReLU kinks in the deep stacks
};

// Finite-difference checks of every sub-network and the end-to-end model,
// evaluated with the double-precision build of the network library.
namespace f64 {
std::vector<GradCheckEntry> run_model_gradchecks(const SelfCheckOptions& opts = {});
}

}  // namespace crs
