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
#include <string>
#include <vector>

#include "crs/frame.hpp"
#include "crs/fusion.hpp"
#include "crs/man.hpp"
#include "crs/tcn.hpp"

CRS_NN_BEGIN_NAMESPACE

// Sample values enter the network scaled to [0, 1].
Tensor plane_tensor(const Plane& p);
Tensor planes_tensor(std::span<const Plane* const> planes);
Tensor luma_tensor(const Frame& f);
Tensor chroma_tensor(const Frame& f);  // 2 x H/2 x W/2, U then V
Plane tensor_plane(const Tensor& t, std::int64_t channel);

class CrsNet {
 public:
  CrsNet() = default;
  CrsNet(ParamStore& store, const std::string& prefix, const ModelConfig& cfg);

  // Window of LR tensors plus one or two HR intra references; returns O^H.
  Tensor forward(const TemporalWindow& win, std::span<const Tensor> intra_refs) const;

  const std::vector<Tensor>& parameters() const { return params_; }
  const ModelConfig& config() const { return cfg_; }
  const Man& man() const { return man_; }
  const Tcn& tcn() const { return tcn_; }
  const Fusion& fusion() const { return fusion_; }

 private:
  ModelConfig cfg_;
  Man man_;
  Tcn tcn_;
  Fusion fusion_;
  std::vector<Tensor> params_;
};

// Luma network plus an independent network for the combined U/V planes.
struct CrsModel {
  explicit CrsModel(std::uint64_t seed, const ModelConfig& base = {});

  ParamStore store;
  CrsNet luma;
  CrsNet chroma;
};

CRS_NN_END_NAMESPACE
