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

#include "crs/man.hpp"

#include <array>

CRS_NN_BEGIN_NAMESPACE

namespace {

constexpr int kTaps = 9;

Tensor tap_grid(std::int64_t h, std::int64_t w, int ky, int kx) {
  Tensor g(Shape{2, h, w});
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      g.at(0, y, x) = static_cast<Real>(y + ky - 1);
      g.at(1, y, x) = static_cast<Real>(x + kx - 1);
    }
  }
  return g;
}

}  // namespace

Tensor deform_conv2d(const Tensor& feat, const Tensor& offsets, const Tensor& masks,
                     const ConvParams& p) {
  if (feat.rank() != 3) throw ShapeError("deform_conv2d: feat must be C x H x W");
  const std::int64_t h = feat.dim(1), w = feat.dim(2);
  if (offsets.rank() != 3 || offsets.dim(0) != 2 * kTaps || offsets.dim(1) != h ||
      offsets.dim(2) != w) {
    throw ShapeError("deform_conv2d: offsets must be 18 x H x W, got " +
                     shape_str(offsets.shape()));
  }
  if (masks.rank() != 3 || masks.dim(0) != kTaps || masks.dim(1) != h || masks.dim(2) != w) {
    throw ShapeError("deform_conv2d: masks must be 9 x H x W, got " + shape_str(masks.shape()));
  }
  if (p.kernel_h() != 3 || p.kernel_w() != 3 || p.in_channels() != feat.dim(0)) {
    throw ShapeError("deform_conv2d: weight must be [C_out, C, 3, 3] with C = " +
                     std::to_string(feat.dim(0)));
  }
  std::vector<Tensor> taps;
  taps.reserve(kTaps);
  for (int t = 0; t < kTaps; ++t) {
    const Tensor coords =
        ops::add(tap_grid(h, w, t / 3, t % 3), ops::slice_channels(offsets, 2 * t, 2));
    taps.push_back(
        ops::mul_plane(ops::bilinear_sample(feat, coords), ops::slice_channels(masks, t, 1)));
  }
  // Channel c * 9 + t of the stack lines up with weight[:, c, t / 3, t % 3].
  const Tensor stack = ops::interleave_channels(taps);
  ConvParams pointwise;
  pointwise.weight = ops::reshape(p.weight, Shape{p.out_channels(), p.in_channels() * kTaps, 1, 1});
  pointwise.bias = p.bias;
  pointwise.stride = 1;
  pointwise.padding = 0;
  return ops::conv2d(stack, pointwise);
}

Msn::Msn(ParamStore& store, const std::string& name, std::int64_t in_ch, const ModelConfig& cfg) {
  const auto c = cfg.channels;
  head_ = store.conv(name + ".head", in_ch, c);
  for (int l = 0; l < cfg.msn_levels; ++l) {
    const std::string level = name + ".level" + std::to_string(l);
    if (l > 0) down_.push_back(store.conv(level + ".down", c, c, 3, 2));
    std::vector<ResBlock> blocks;
    for (int b = 0; b < cfg.msn_blocks; ++b) {
      blocks.push_back(make_res_block(store, level + ".block" + std::to_string(b), c));
    }
    blocks_.push_back(std::move(blocks));
  }
  for (int l = 0; l + 1 < cfg.msn_levels; ++l) {
    merge_.push_back(store.conv(name + ".level" + std::to_string(l) + ".merge", 2 * c, c));
  }
}

std::vector<Tensor> Msn::forward(const Tensor& x) const {
  const std::size_t levels = blocks_.size();
  std::vector<Tensor> feats(levels);
  feats[0] = run_blocks(ops::relu(ops::conv2d(x, head_)), blocks_[0]);
  for (std::size_t l = 1; l < levels; ++l) {
    feats[l] = run_blocks(ops::relu(ops::conv2d(feats[l - 1], down_[l - 1])), blocks_[l]);
  }
  std::vector<Tensor> out(levels);
  out[levels - 1] = feats[levels - 1];
  for (std::size_t l = levels - 1; l-- > 0;) {
    const Tensor up = ops::upsample_bilinear(out[l + 1], feats[l].dim(1), feats[l].dim(2));
    const std::array<Tensor, 2> parts{feats[l], up};
    out[l] = ops::relu(ops::conv2d(ops::concat_channels(parts), merge_[l]));
  }
  return out;
}

Man::Man(ParamStore& store, const std::string& prefix, const ModelConfig& cfg) : cfg_(cfg) {
  const auto c = cfg.channels;
  const std::string p = prefix + "man.";
  feat_in_ = store.conv(p + "feat.in", cfg.in_channels, c);
  for (int b = 0; b < cfg.feature_blocks; ++b) {
    feat_blocks_.push_back(make_res_block(store, p + "feat.block" + std::to_string(b), c));
  }
  offset_msn_ = Msn(store, p + "offset.msn", 2 * c, cfg);
  for (int l = 0; l < cfg.msn_levels; ++l) {
    offset_heads_.push_back(
        store.conv(p + "offset.head" + std::to_string(l), c, 3 * kTaps, 3, 1, Init::zeros));
  }
  dcn_ = store.conv(p + "dcn", c, c);
  ta_ref_ = store.conv(p + "ta.ref", c, c);
  ta_nbr_ = store.conv(p + "ta.nbr", c, c);
  ta_fuse_ = store.conv(p + "ta.fuse", cfg.window * c, c);
  sa_msn_ = Msn(store, p + "sa.msn", c, cfg);
  sa_head_ = store.conv(p + "sa.head", c, c);
}

Tensor Man::extract_features(const Tensor& frame) const {
  if (frame.rank() != 3 || frame.dim(0) != cfg_.in_channels) {
    throw ShapeError("extract_features: expected " + std::to_string(cfg_.in_channels) +
                     " x h x w frame, got " + shape_str(frame.shape()));
  }
  return run_blocks(ops::relu(ops::conv2d(frame, feat_in_)), feat_blocks_);
}

OffsetPyramid Man::compute_offsets(const Tensor& feat_cur, const Tensor& feat_nbr) const {
  const std::array<Tensor, 2> pair{feat_cur, feat_nbr};
  const auto levels = offset_msn_.forward(ops::concat_channels(pair));
  const std::size_t n = levels.size();
  OffsetPyramid pyr;
  pyr.offsets.resize(n);
  pyr.masks.resize(n);
  for (std::size_t l = n; l-- > 0;) {
    const Tensor head = ops::conv2d(levels[l], offset_heads_[l]);
    Tensor off = ops::slice_channels(head, 0, 2 * kTaps);
    if (l + 1 < n) {
      const Tensor coarse =
          ops::upsample_bilinear(pyr.offsets[l + 1], levels[l].dim(1), levels[l].dim(2));
      off = ops::add(off, ops::scale(coarse, Real(2)));
    }
    pyr.offsets[l] = off;
    pyr.masks[l] = ops::sigmoid(ops::slice_channels(head, 2 * kTaps, kTaps));
  }
  return pyr;
}

Tensor Man::dcn_align(const Tensor& feat_nbr, const OffsetPyramid& off) const {
  if (off.offsets.empty()) throw ShapeError("dcn_align: empty offset pyramid");
  return deform_conv2d(feat_nbr, off.offsets[0], off.masks[0], dcn_);
}

Tensor Man::aggregate(std::span<const Tensor> aligned, int self_idx,
                      AggregationTrace* trace) const {
  if (static_cast<int>(aligned.size()) != cfg_.window) {
    throw ShapeError("aggregate: expected " + std::to_string(cfg_.window) +
                     " aligned stacks, got " + std::to_string(aligned.size()));
  }
  if (self_idx < 0 || self_idx >= cfg_.window) {
    throw ArgumentError("aggregate: self index " + std::to_string(self_idx) + " out of range");
  }
  const Tensor ref_embed = ops::conv2d(aligned[self_idx], ta_ref_);
  std::vector<Tensor> branches;
  std::vector<Tensor> masks;
  for (int t = 0; t < cfg_.window; ++t) {
    if (t == self_idx) {
      branches.push_back(aligned[t]);
      masks.emplace_back();
      continue;
    }
    const Tensor embed = ops::conv2d(aligned[t], ta_nbr_);
    const Tensor mask = ops::sigmoid(ops::channel_dot(ref_embed, embed));
    branches.push_back(ops::mul_plane(aligned[t], mask));
    masks.push_back(mask);
  }
  const Tensor fused = ops::relu(ops::conv2d(ops::concat_channels(branches), ta_fuse_));
  const Tensor sa_mask = ops::sigmoid(ops::conv2d(sa_msn_.forward(fused)[0], sa_head_));
  if (trace != nullptr) {
    trace->branches = branches;
    trace->ta_masks = masks;
    trace->fused = fused;
    trace->sa_mask = sa_mask;
  }
  return ops::mul(fused, sa_mask);
}

Tensor Man::forward(const TemporalWindow& win) const {
  if (static_cast<int>(win.frames.size()) != cfg_.window) {
    throw ShapeError("man: temporal window holds " + std::to_string(win.frames.size()) +
                     " frames, expected " + std::to_string(cfg_.window));
  }
  if (win.center < 0 || win.center >= cfg_.window) {
    throw ArgumentError("man: window center " + std::to_string(win.center) + " out of range");
  }
  // Replicated edge frames share storage; extract their features once.
  std::vector<Tensor> feats(win.frames.size());
  for (std::size_t t = 0; t < win.frames.size(); ++t) {
    for (std::size_t s = 0; s < t; ++s) {
      if (win.frames[s].same_storage(win.frames[t])) feats[t] = feats[s];
    }
    if (feats[t].empty()) feats[t] = extract_features(win.frames[t]);
  }
  const Tensor& cur = feats[static_cast<std::size_t>(win.center)];
  std::vector<Tensor> aligned;
  for (const auto& f : feats) aligned.push_back(dcn_align(f, compute_offsets(cur, f)));
  return aggregate(aligned, win.center);
}

CRS_NN_END_NAMESPACE
