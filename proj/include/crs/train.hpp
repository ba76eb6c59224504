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
#include <vector>

#include "crs/adam.hpp"
#include "crs/crs_net.hpp"

CRS_NN_BEGIN_NAMESPACE

struct TrainSample {
  TemporalWindow window;
  std::vector<Tensor> intra_refs;
  Tensor target;  // HR ground truth, same scaling as the network input
};

// Mean L1 loss of the batch without touching weights.
double evaluate_loss(const CrsNet& net, std::span<const TrainSample> batch);

// One Adam step on the mean L1 loss of the batch. Returns the pre-update loss.
double train_step(const CrsNet& net, std::span<const TrainSample> batch, AdamState& state,
                  const AdamConfig& cfg = {});

CRS_NN_END_NAMESPACE
