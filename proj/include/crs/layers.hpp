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
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "crs/ops.hpp"

CRS_NN_BEGIN_NAMESPACE

enum class Init {
  kaiming_uniform,  // U(-b, b), b = sqrt(6 / fan_in)
  residual,         // kaiming_uniform scaled by 0.1, for the last conv of a residual branch
  zeros,
};

// Named, ordered parameter registry. Every trainable tensor of a network is
// created here, which gives the weight file its name table and the optimizer
// its parameter list. Initialization draws from a seeded mt19937_64, so a
// (seed, architecture) pair always yields the same weights.
class ParamStore {
 public:
  explicit ParamStore(std::uint64_t seed = 0) : seed_(seed), rng_(seed) {}

  Tensor add(const std::string& name, Shape shape, Init init = Init::zeros,
             std::int64_t fan_in = 1);
  ConvParams conv(const std::string& name, std::int64_t in_ch, std::int64_t out_ch, int k = 3,
                  int stride = 1, Init init = Init::kaiming_uniform);

  const std::vector<std::pair<std::string, Tensor>>& entries() const { return entries_; }
  std::vector<Tensor> tensors() const;
  const Tensor* find(const std::string& name) const;
  std::uint64_t seed() const { return seed_; }
  std::int64_t parameter_count() const;
  void zero_grad();

  // Overwrites every all-zero tensor with U(-bound, bound) noise. Used by the
  // gradient self-checks, where zero-initialized heads would hide upstream
  // gradients.
  void fill_zero_tensors(std::uint64_t seed, double bound);

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
  std::vector<std::pair<std::string, Tensor>> entries_;
  std::map<std::string, std::size_t> index_;
};

// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw; identical on
// every platform, unlike std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng);

struct ResBlock {
  ConvParams conv1;
  ConvParams conv2;
};

ResBlock make_res_block(ParamStore& store, const std::string& name, std::int64_t channels);

// x + conv2(relu(conv1(x))). Both convolutions must preserve shape.
Tensor residual_block(const Tensor& x, const ConvParams& p1, const ConvParams& p2);
Tensor residual_block(const Tensor& x, const ResBlock& b);
Tensor run_blocks(Tensor x, const std::vector<ResBlock>& blocks);

CRS_NN_END_NAMESPACE
