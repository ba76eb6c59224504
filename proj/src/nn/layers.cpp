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

#include "crs/layers.hpp"

#include <algorithm>
#include <cmath>

CRS_NN_BEGIN_NAMESPACE

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Tensor ParamStore::add(const std::string& name, Shape shape, Init init, std::int64_t fan_in) {
  if (index_.count(name) != 0) throw ArgumentError("duplicate parameter name " + name);
  Tensor t(std::move(shape));
  if (init != Init::zeros) {
    double bound = std::sqrt(6.0 / static_cast<double>(std::max<std::int64_t>(fan_in, 1)));
    if (init == Init::residual) bound *= 0.1;
    for (Real& v : t.data()) v = static_cast<Real>((2.0 * unit_uniform(rng_) - 1.0) * bound);
  }
  t.set_requires_grad(true);
  index_[name] = entries_.size();
  entries_.emplace_back(name, t);
  return t;
}

ConvParams ParamStore::conv(const std::string& name, std::int64_t in_ch, std::int64_t out_ch,
                            int k, int stride, Init init) {
  ConvParams p;
  p.weight = add(name + ".weight", Shape{out_ch, in_ch, k, k}, init, in_ch * k * k);
  p.bias = add(name + ".bias", Shape{out_ch});
  p.stride = stride;
  p.padding = k / 2;
  return p;
}

std::vector<Tensor> ParamStore::tensors() const {
  std::vector<Tensor> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.second);
  return out;
}

const Tensor* ParamStore::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &entries_[it->second].second;
}

std::int64_t ParamStore::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& e : entries_) n += e.second.numel();
  return n;
}

void ParamStore::zero_grad() {
  for (auto& e : entries_) e.second.zero_grad();
}

void ParamStore::fill_zero_tensors(std::uint64_t seed, double bound) {
  std::mt19937_64 rng(seed);
  for (auto& e : entries_) {
    auto d = e.second.data();
    if (std::all_of(d.begin(), d.end(), [](Real v) { return v == Real(0); })) {
      for (Real& v : d) v = static_cast<Real>((2.0 * unit_uniform(rng) - 1.0) * bound);
    }
  }
}

ResBlock make_res_block(ParamStore& store, const std::string& name, std::int64_t channels) {
  return {store.conv(name + ".conv1", channels, channels),
          store.conv(name + ".conv2", channels, channels, 3, 1, Init::residual)};
}

namespace {
void check_shape_preserving(const ConvParams& p, std::int64_t channels, const char* which) {
  if (p.stride != 1 || p.in_channels() != channels || p.out_channels() != channels ||
      p.kernel_h() != p.kernel_w() || p.padding != p.kernel_h() / 2 || p.kernel_h() % 2 == 0) {
    throw ShapeError(std::string("residual_block: ") + which +
                     " must keep channels and spatial extents (stride 1, odd kernel, same pad)");
  }
}
}  // namespace

Tensor residual_block(const Tensor& x, const ConvParams& p1, const ConvParams& p2) {
  if (x.rank() != 3) throw ShapeError("residual_block: expected C x H x W input");
  check_shape_preserving(p1, x.dim(0), "conv1");
  check_shape_preserving(p2, x.dim(0), "conv2");
  return ops::add(x, ops::conv2d(ops::relu(ops::conv2d(x, p1)), p2));
}

Tensor residual_block(const Tensor& x, const ResBlock& b) {
  return residual_block(x, b.conv1, b.conv2);
}

Tensor run_blocks(Tensor x, const std::vector<ResBlock>& blocks) {
  for (const auto& b : blocks) x = residual_block(x, b);
  return x;
}

CRS_NN_END_NAMESPACE
