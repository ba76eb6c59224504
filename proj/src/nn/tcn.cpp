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

#include "crs/tcn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

CRS_NN_BEGIN_NAMESPACE

namespace {

using MatD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr std::int64_t kQueryBlock = 256;

MatD normalized_rows(const Tensor& m, std::vector<double>& norms) {
  const std::int64_t n = m.dim(0), d = m.dim(1);
  MatD out(n, d);
  norms.assign(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const Real* row = m.ptr() + i * d;
    double ss = 0.0;
    for (std::int64_t j = 0; j < d; ++j) ss += static_cast<double>(row[j]) * row[j];
    const double nrm = std::sqrt(ss);
    norms[i] = nrm;
    const double inv = 1.0 / std::max(nrm, kNormEps);
    for (std::int64_t j = 0; j < d; ++j) out(i, j) = row[j] * inv;
  }
  return out;
}

// d<u_hat, w> / du for u_hat = u / max(|u|, eps).
void accumulate_normalized_grad(double g, const double* u_hat, const double* w, double a,
                                double norm, std::int64_t d, Real* out) {
  if (norm > kNormEps) {
    const double s = g / norm;
    for (std::int64_t j = 0; j < d; ++j) out[j] += static_cast<Real>(s * (w[j] - a * u_hat[j]));
  } else {
    const double s = g / kNormEps;
    for (std::int64_t j = 0; j < d; ++j) out[j] += static_cast<Real>(s * w[j]);
  }
}

}  // namespace

AffinityResult build_affinity(const Tensor& k, const Tensor& q) {
  if (k.rank() != 3 || q.rank() != 3 || k.shape() != q.shape()) {
    throw ShapeError("build_affinity: key and query must share a C x h x w shape, got " +
                     shape_str(k.shape()) + " and " + shape_str(q.shape()));
  }
  const std::int64_t h = k.dim(1), w = k.dim(2);
  const Tensor ku = ops::unfold(k, 3, 1, 1, PadMode::reflect);
  const Tensor qu = ops::unfold(q, 3, 1, 1, PadMode::reflect);
  const std::int64_t n = ku.dim(0), d = ku.dim(1);

  std::vector<double> k_norm, q_norm;
  auto kn = std::make_shared<MatD>(normalized_rows(ku, k_norm));
  auto qn = std::make_shared<MatD>(normalized_rows(qu, q_norm));

  AffinityResult res;
  res.grid_h = h;
  res.grid_w = w;
  res.p.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> best(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t q0 = 0; q0 < n; q0 += kQueryBlock) {
    const std::int64_t rows = std::min(kQueryBlock, n - q0);
    const MatD sim = qn->middleRows(q0, rows) * kn->transpose();
    for (std::int64_t r = 0; r < rows; ++r) {
      std::int64_t arg = 0;
      double val = sim(r, 0);
      for (std::int64_t i = 1; i < n; ++i) {
        if (sim(r, i) > val) {
          val = sim(r, i);
          arg = i;
        }
      }
      res.p[q0 + r] = arg;
      best[q0 + r] = val;
    }
  }
  res.a = Tensor(Shape{1, h, w});
  for (std::int64_t j = 0; j < n; ++j) res.a.ptr()[j] = static_cast<Real>(best[j]);

  if (needs_grad({&ku, &qu})) {
    auto ki = ku.impl(), qi = qu.impl(), ai = res.a.impl();
    record_op(res.a, [ki, qi, ai, kn, qn, k_norm, q_norm, best, p = res.p, n, d] {
      if (ai->grad.empty()) return;
      for (std::int64_t j = 0; j < n; ++j) {
        const double g = ai->grad[j];
        if (g == 0.0) continue;
        const std::int64_t i = p[j];
        const double* q_hat = qn->data() + j * d;
        const double* k_hat = kn->data() + i * d;
        if (qi->requires_grad) {
          accumulate_normalized_grad(g, q_hat, k_hat, best[j], q_norm[j], d,
                                     qi->ensure_grad().data() + j * d);
        }
        if (ki->requires_grad) {
          accumulate_normalized_grad(g, k_hat, q_hat, best[j], k_norm[i], d,
                                     ki->ensure_grad().data() + i * d);
        }
      }
    });
  }
  return res;
}

Tcn::Tcn(ParamStore& store, const std::string& prefix, const ModelConfig& cfg) : cfg_(cfg) {
  const auto c = cfg.channels;
  const std::string p = prefix + "tcn.";
  mfe_in_ = store.conv(p + "mfe.in", cfg.in_channels, c);
  for (int b = 0; b < cfg.feature_blocks; ++b) {
    mfe_blocks_.push_back(make_res_block(store, p + "mfe.block" + std::to_string(b), c));
  }
  mfe_down1_ = store.conv(p + "mfe.down1", c, c, 3, 2);
  mfe_down2_ = store.conv(p + "mfe.down2", c, c, 3, 2);
  embed_half_ = store.conv(p + "embed.half", c, c);
  embed_full_ = store.conv(p + "embed.full", c, c);
}

MultiScaleFeatures Tcn::mfe(const Tensor& frame) const {
  if (frame.rank() != 3 || frame.dim(0) != cfg_.in_channels) {
    throw ShapeError("mfe: expected " + std::to_string(cfg_.in_channels) +
                     " x H x W input, got " + shape_str(frame.shape()));
  }
  if (frame.dim(1) % 4 != 0 || frame.dim(2) % 4 != 0) {
    throw ShapeError("mfe: H and W must be divisible by 4, got " + shape_str(frame.shape()));
  }
  MultiScaleFeatures out;
  out.full = run_blocks(ops::relu(ops::conv2d(frame, mfe_in_)), mfe_blocks_);
  out.half = ops::relu(ops::conv2d(out.full, mfe_down1_));
  out.quarter = ops::relu(ops::conv2d(out.half, mfe_down2_));
  return out;
}

std::vector<Tensor> Tcn::transfer_textures(const MultiScaleFeatures& v,
                                           const std::vector<std::int64_t>& p) const {
  const std::int64_t c = v.quarter.dim(0);
  const std::int64_t h4 = v.quarter.dim(1), w4 = v.quarter.dim(2);
  if (static_cast<std::int64_t>(p.size()) != h4 * w4) {
    throw ShapeError("transfer_textures: position map holds " + std::to_string(p.size()) +
                     " entries, the quarter grid has " + std::to_string(h4 * w4));
  }
  if (v.half.dim(1) != 2 * h4 || v.half.dim(2) != 2 * w4 || v.full.dim(1) != 4 * h4 ||
      v.full.dim(2) != 4 * w4) {
    throw ShapeError("transfer_textures: feature grids are not dyadic");
  }
  // (k, stride, pad) chosen so each unfold yields exactly the quarter-scale patch grid.
  auto transfer = [&](const Tensor& x, int k, int s, int pad) {
    const Tensor rows = ops::index_rows(ops::unfold(x, k, s, pad, PadMode::reflect), p);
    return ops::fold(rows, c, k, s, pad, x.dim(1), x.dim(2));
  };
  return {transfer(v.quarter, 3, 1, 1),
          ops::conv2d(transfer(v.half, 6, 2, 2), embed_half_),
          ops::conv2d(transfer(v.full, 12, 4, 4), embed_full_)};
}

TextureBundle Tcn::forward(const Tensor& s_hat, const Tensor& s_tilde, const Tensor& t_up) const {
  if (s_hat.shape() != s_tilde.shape() || s_hat.shape() != t_up.shape()) {
    throw ShapeError("tcn: inputs must share the HR grid");
  }
  const MultiScaleFeatures v = mfe(s_hat);
  const MultiScaleFeatures k = mfe(s_tilde);
  const MultiScaleFeatures q = mfe(t_up);
  AffinityResult aff = build_affinity(k.quarter, q.quarter);
  auto tex = transfer_textures(v, aff.p);
  TextureBundle b;
  b.f = tex[0];
  b.f_l = tex[1];
  b.f_h = tex[2];
  b.a = aff.a;
  b.a_l = ops::upsample_bilinear(aff.a, v.half.dim(1), v.half.dim(2));
  b.a_h = ops::upsample_bilinear(aff.a, v.full.dim(1), v.full.dim(2));
  b.p = std::move(aff.p);
  return b;
}

CRS_NN_END_NAMESPACE
