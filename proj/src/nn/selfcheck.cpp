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

#include "crs/config.hpp"
#include "crs/selfcheck.hpp"

#include <chrono>
#include <functional>
#include <random>

#include "crs/crs_net.hpp"
#include "crs/gradcheck.hpp"

CRS_NN_BEGIN_NAMESPACE

namespace {

Tensor random_tensor(Shape shape, std::mt19937_64& rng, double lo, double hi) {
  Tensor t(std::move(shape));
  for (Real& v : t.data()) v = static_cast<Real>(lo + (hi - lo) * unit_uniform(rng));
  return t;
}

Tensor total(std::initializer_list<Tensor> parts) {
  Tensor acc;
  for (const auto& p : parts) acc = acc.empty() ? ops::sum(p) : ops::add(acc, ops::sum(p));
  return acc;
}

}  // namespace

std::vector<GradCheckEntry> run_model_gradchecks(const SelfCheckOptions& opts) {
  if (opts.size < 16 || opts.size % 16 != 0) {
    throw ArgumentError("gradcheck: size must be a positive multiple of 16");
  }
  ModelConfig cfg;
  cfg.channels = opts.channels;
  ParamStore store(opts.seed);
  const CrsNet net(store, "y.", cfg);
  // Zero-initialized heads would pin sampling taps to the lattice and hide the fusion body.
  store.fill_zero_tensors(opts.seed + 1, 0.05);

  std::mt19937_64 rng(opts.seed + 2);
  const std::int64_t hr = opts.size, lr = opts.size / 2, c = cfg.channels;
  std::vector<Tensor> frames;
  for (int t = 0; t < cfg.window; ++t) frames.push_back(random_tensor({1, lr, lr}, rng, 0, 1));
  const Tensor intra = random_tensor({1, hr, hr}, rng, 0, 1);
  const Tensor feat_a = random_tensor({c, lr, lr}, rng, -1, 1);
  const Tensor feat_b = random_tensor({c, lr, lr}, rng, -1, 1);
  const Tensor offsets = random_tensor({18, lr, lr}, rng, -1.5, 1.5);
  const Tensor masks = random_tensor({9, lr, lr}, rng, 0.1, 0.9);
  const Tensor feat_c = random_tensor({c, lr, lr}, rng, -1, 1);
  const Tensor key = random_tensor({c, hr / 4, hr / 4}, rng, -1, 1);
  const Tensor query = random_tensor({c, hr / 4, hr / 4}, rng, -1, 1);
  MultiScaleFeatures v{random_tensor({c, hr, hr}, rng, -1, 1),
                       random_tensor({c, hr / 2, hr / 2}, rng, -1, 1),
                       random_tensor({c, hr / 4, hr / 4}, rng, -1, 1)};
  std::vector<std::int64_t> positions(static_cast<std::size_t>(hr / 4 * hr / 4));
  for (auto& p : positions) p = static_cast<std::int64_t>(rng() % positions.size());

  const Man& man = net.man();
  const Tcn& tcn = net.tcn();
  const auto& dcn = man.dcn_params();
  const auto& proj = net.fusion().projection();

  struct Case {
    std::string name;
    std::function<Tensor()> f;
    std::vector<Tensor> inputs;
  };
  std::vector<Case> cases;
  cases.push_back({"man.extract_features",
                   [&] { return man.extract_features(frames[0]); },
                   {frames[0]}});
  cases.push_back({"man.compute_offsets",
                   [&] {
                     const auto pyr = man.compute_offsets(feat_a, feat_b);
                     return total({pyr.offsets[0], pyr.masks[0], pyr.offsets.back()});
                   },
                   {feat_a, feat_b}});
  cases.push_back({"man.dcn_align",
                   [&] { return deform_conv2d(feat_a, offsets, masks, dcn); },
                   {feat_a, offsets, masks, dcn.weight}});
  cases.push_back({"man.aggregate",
                   [&] {
                     const Tensor stacks[] = {feat_a, feat_b, feat_c};
                     return man.aggregate(stacks, 1);
                   },
                   {feat_a, feat_b, feat_c}});
  cases.push_back({"man.forward",
                   [&] { return man.forward(TemporalWindow{frames, 1}); },
                   {frames[0], frames[1], frames[2]}});
  cases.push_back({"tcn.mfe",
                   [&] {
                     const auto m = tcn.mfe(intra);
                     return total({m.full, m.half, m.quarter});
                   },
                   {intra}});
  cases.push_back({"tcn.build_affinity",
                   [&] { return build_affinity(key, query).a; },
                   {key, query}});
  cases.push_back({"tcn.transfer_textures",
                   [&] {
                     const auto t = tcn.transfer_textures(v, positions);
                     return total({t[0], t[1], t[2]});
                   },
                   {v.full, v.half, v.quarter}});
  cases.push_back({"tcn.forward",
                   [&] {
                     const Tensor up = ops::bicubic_up(frames[1], 2);
                     const Tensor tilde = ops::bicubic_up(ops::bicubic_down(intra, 2), 2);
                     const auto b = tcn.forward(intra, tilde, up);
                     return total({b.f, b.f_l, b.f_h, b.a_h});
                   },
                   {intra, frames[1]}});
  cases.push_back({"fusion.forward",
                   [&] {
                     FusionInputs in;
                     in.motion = feat_a;
                     in.t_up = ops::bicubic_up(frames[1], 2);
                     in.textures.push_back(tcn.forward(intra, intra, in.t_up));
                     return net.fusion().forward(in);
                   },
                   {feat_a, frames[1], proj.weight}});
  cases.push_back({"crs_forward",
                   [&] {
                     const Tensor refs[] = {intra};
                     return net.forward(TemporalWindow{frames, 1}, refs);
                   },
                   {frames[0], frames[1], frames[2], intra, dcn.weight, proj.weight}});

  GradCheckOptions go;
  go.eps = opts.eps;
  go.max_samples = opts.max_samples;
  go.seed = opts.seed;
  std::vector<GradCheckEntry> out;
  for (auto& cs : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const GradCheckResult r = grad_check(cs.f, cs.inputs, go);
    const auto t1 = std::chrono::steady_clock::now();
    out.push_back({cs.name, r.max_rel_err, r.checked,
                   std::chrono::duration<double>(t1 - t0).count(), r.worst});
  }
  return out;
}

CRS_NN_END_NAMESPACE
