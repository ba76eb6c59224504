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

#include "crs/fusion.hpp"

CRS_NN_BEGIN_NAMESPACE

namespace {

void check_grid(const Tensor& t, std::int64_t h, std::int64_t w, const char* what) {
  if (t.rank() != 3 || t.dim(1) != h || t.dim(2) != w) {
    throw ShapeError(std::string("fuse: ") + what + " " + shape_str(t.shape()) +
                     " is not on the " + std::to_string(h) + "x" + std::to_string(w) + " grid");
  }
}

}  // namespace

Fusion::Fusion(ParamStore& store, const std::string& prefix, const ModelConfig& cfg) : cfg_(cfg) {
  const auto c = cfg.channels;
  const auto slots = cfg.texture_slots;
  const std::string p = prefix + "fusion.";
  lift_ = store.conv(p + "lift", c, 4 * c);
  half_in_ = store.conv(p + "half.in", c + slots * (2 * c + 1), c);
  for (int b = 0; b < cfg.fusion_blocks; ++b) {
    half_blocks_.push_back(make_res_block(store, p + "half.block" + std::to_string(b), c));
  }
  half_up_ = store.conv(p + "half.up", c, 4 * c);
  full_skip_ = store.conv(p + "full.skip", cfg.in_channels, c);
  full_in_ = store.conv(p + "full.in", c + slots * (c + 1) + c, c);
  for (int b = 0; b < cfg.fusion_blocks; ++b) {
    full_blocks_.push_back(make_res_block(store, p + "full.block" + std::to_string(b), c));
  }
  proj_ = store.conv(p + "proj", c, cfg.in_channels, 3, 1, Init::zeros);
}

Tensor Fusion::forward(const FusionInputs& in) const {
  const auto n = static_cast<int>(in.textures.size());
  if (n < 1 || n > cfg_.texture_slots) {
    throw ArgumentError("fuse: expected 1 to " + std::to_string(cfg_.texture_slots) +
                        " texture bundles, got " + std::to_string(n));
  }
  const std::int64_t h = in.t_up.dim(1), w = in.t_up.dim(2);
  check_grid(in.motion, h / 2, w / 2, "motion features");
  for (const auto& t : in.textures) {
    check_grid(t.f, h / 4, w / 4, "quarter texture");
    check_grid(t.f_l, h / 2, w / 2, "half texture");
    check_grid(t.f_h, h, w, "full texture");
  }
  // A single reference fills every slot so LDP and RA share weights.
  std::vector<const TextureBundle*> slots;
  for (int s = 0; s < cfg_.texture_slots; ++s) slots.push_back(&in.textures[s % n]);

  std::vector<Tensor> half{in.motion};
  for (const auto* t : slots) {
    half.push_back(ops::mul_plane(t->f_l, t->a_l));
    half.push_back(t->a_l);
    half.push_back(ops::pixel_shuffle(ops::conv2d(ops::mul_plane(t->f, t->a), lift_), 2));
  }
  Tensor x = ops::conv2d(ops::concat_channels(half), half_in_);
  x = run_blocks(x, half_blocks_);
  const Tensor up = ops::relu(ops::pixel_shuffle(ops::conv2d(x, half_up_), 2));

  std::vector<Tensor> full{up};
  for (const auto* t : slots) {
    full.push_back(ops::mul_plane(t->f_h, t->a_h));
    full.push_back(t->a_h);
  }
  full.push_back(ops::relu(ops::conv2d(in.t_up, full_skip_)));
  Tensor y = ops::conv2d(ops::concat_channels(full), full_in_);
  y = run_blocks(y, full_blocks_);
  return ops::add(ops::conv2d(y, proj_), in.t_up);
}

CRS_NN_END_NAMESPACE
