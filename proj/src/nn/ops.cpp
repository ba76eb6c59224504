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

#include "crs/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <string>

#include "crs/resample.hpp"

CRS_NN_BEGIN_NAMESPACE
namespace ops {

namespace {

using RowMat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;
using Impl = std::shared_ptr<detail::TensorImpl>;

void require_rank(const Tensor& t, int rank, const char* op) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) +
                     " input, got shape " + shape_str(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
  }
}

// Maps a possibly out-of-range index into [0, n) per the padding mode, or -1
// for zero padding.
inline std::int64_t pad_index(std::int64_t i, std::int64_t n, PadMode mode) {
  if (i >= 0 && i < n) return i;
  switch (mode) {
    case PadMode::zeros:
      return -1;
    case PadMode::replicate:
      return i < 0 ? 0 : n - 1;
    case PadMode::reflect: {
      if (n == 1) return 0;
      const std::int64_t period = 2 * (n - 1);
      i %= period;
      if (i < 0) i += period;
      return i < n ? i : period - i;
    }
  }
  return -1;
}

struct ConvGeometry {
  std::int64_t c, h, w, k_h, k_w, stride, pad, out_h, out_w;
  std::int64_t rows() const { return c * k_h * k_w; }
  std::int64_t cols() const { return out_h * out_w; }
};

void im2col(const Real* x, const ConvGeometry& g, PadMode mode, Real* cols) {
  const std::int64_t n = g.cols();
  for (std::int64_t c = 0; c < g.c; ++c) {
    for (std::int64_t ky = 0; ky < g.k_h; ++ky) {
      for (std::int64_t kx = 0; kx < g.k_w; ++kx) {
        Real* dst = cols + ((c * g.k_h + ky) * g.k_w + kx) * n;
        for (std::int64_t oy = 0; oy < g.out_h; ++oy) {
          const std::int64_t iy = pad_index(oy * g.stride - g.pad + ky, g.h, mode);
          Real* row = dst + oy * g.out_w;
          if (iy < 0) {
            std::fill(row, row + g.out_w, Real(0));
            continue;
          }
          const Real* src = x + (c * g.h + iy) * g.w;
          for (std::int64_t ox = 0; ox < g.out_w; ++ox) {
            const std::int64_t ix = pad_index(ox * g.stride - g.pad + kx, g.w, mode);
            row[ox] = ix < 0 ? Real(0) : src[ix];
          }
        }
      }
    }
  }
}

void col2im(const Real* cols, const ConvGeometry& g, PadMode mode, Real* dx) {
  const std::int64_t n = g.cols();
  for (std::int64_t c = 0; c < g.c; ++c) {
    for (std::int64_t ky = 0; ky < g.k_h; ++ky) {
      for (std::int64_t kx = 0; kx < g.k_w; ++kx) {
        const Real* src_row = cols + ((c * g.k_h + ky) * g.k_w + kx) * n;
        for (std::int64_t oy = 0; oy < g.out_h; ++oy) {
          const std::int64_t iy = pad_index(oy * g.stride - g.pad + ky, g.h, mode);
          if (iy < 0) continue;
          Real* dst = dx + (c * g.h + iy) * g.w;
          const Real* row = src_row + oy * g.out_w;
          for (std::int64_t ox = 0; ox < g.out_w; ++ox) {
            const std::int64_t ix = pad_index(ox * g.stride - g.pad + kx, g.w, mode);
            if (ix >= 0) dst[ix] += row[ox];
          }
        }
      }
    }
  }
}

template <class F>
Tensor unary(const Tensor& x, F f) {
  Tensor out(x.shape());
  auto in = x.data();
  auto o = out.data();
  for (std::size_t i = 0; i < in.size(); ++i) o[i] = f(in[i]);
  return out;
}

}  // namespace

Tensor conv2d(const Tensor& x, const ConvParams& p) {
  require_rank(x, 3, "conv2d");
  if (p.weight.rank() != 4) {
    throw ShapeError("conv2d: weight must be [C_out, C_in, k_h, k_w], got " +
                     shape_str(p.weight.shape()));
  }
  if (x.dim(0) != p.in_channels()) {
    throw ShapeError("conv2d: channel axis mismatch, input has " + std::to_string(x.dim(0)) +
                     " channels but weight expects " + std::to_string(p.in_channels()));
  }
  if (!p.bias.empty() && p.bias.numel() != p.out_channels()) {
    throw ShapeError("conv2d: bias length " + std::to_string(p.bias.numel()) +
                     " does not match output channels " + std::to_string(p.out_channels()));
  }
  if (p.stride <= 0 || p.padding < 0) {
    throw ArgumentError("conv2d: stride must be positive and padding non-negative");
  }
  ConvGeometry g{x.dim(0), x.dim(1), x.dim(2), p.kernel_h(), p.kernel_w(),
                 p.stride, p.padding, 0, 0};
  const std::int64_t span_h = g.h + 2 * g.pad - g.k_h;
  const std::int64_t span_w = g.w + 2 * g.pad - g.k_w;
  if (span_h < 0) throw ShapeError("conv2d: height axis smaller than the kernel");
  if (span_w < 0) throw ShapeError("conv2d: width axis smaller than the kernel");
  g.out_h = span_h / g.stride + 1;
  g.out_w = span_w / g.stride + 1;
  const std::int64_t c_out = p.out_channels();
  const bool direct = g.k_h == 1 && g.k_w == 1 && g.stride == 1 && g.pad == 0;

  std::vector<Real> cols;
  const Real* col_ptr = x.ptr();
  if (!direct) {
    cols.resize(static_cast<std::size_t>(g.rows() * g.cols()));
    im2col(x.ptr(), g, p.pad_mode, cols.data());
    col_ptr = cols.data();
  }
  Tensor out(Shape{c_out, g.out_h, g.out_w});
  ConstMapMat w(p.weight.ptr(), c_out, g.rows());
  ConstMapMat cm(col_ptr, g.rows(), g.cols());
  MapMat om(out.ptr(), c_out, g.cols());
  om.noalias() = w * cm;
  if (!p.bias.empty()) {
    for (std::int64_t co = 0; co < c_out; ++co) om.row(co).array() += p.bias.ptr()[co];
  }

  if (needs_grad({&x, &p.weight, &p.bias})) {
    cols.clear();
    cols.shrink_to_fit();
    Impl xi = x.impl(), wi = p.weight.impl(), bi = p.bias.impl(), oi = out.impl();
    const PadMode mode = p.pad_mode;
    record_op(out, [xi, wi, bi, oi, g, c_out, mode, direct] {
      if (oi->grad.empty()) return;
      ConstMapMat gy(oi->grad.data(), c_out, g.cols());
      if (wi->requires_grad || xi->requires_grad) {
        std::vector<Real> cols;
        const Real* col_ptr = xi->value.data();
        if (wi->requires_grad) {
          if (!direct) {
            cols.resize(static_cast<std::size_t>(g.rows() * g.cols()));
            im2col(xi->value.data(), g, mode, cols.data());
            col_ptr = cols.data();
          }
          MapMat gw(wi->ensure_grad().data(), c_out, g.rows());
          gw.noalias() += gy * ConstMapMat(col_ptr, g.rows(), g.cols()).transpose();
        }
        if (xi->requires_grad) {
          ConstMapMat w(wi->value.data(), c_out, g.rows());
          if (direct) {
            MapMat gx(xi->ensure_grad().data(), g.rows(), g.cols());
            gx.noalias() += w.transpose() * gy;
          } else {
            cols.resize(static_cast<std::size_t>(g.rows() * g.cols()));
            MapMat gc(cols.data(), g.rows(), g.cols());
            gc.noalias() = w.transpose() * gy;
            col2im(cols.data(), g, mode, xi->ensure_grad().data());
          }
        }
      }
      if (bi->requires_grad && !bi->value.empty()) {
        auto& gb = bi->ensure_grad();
        for (std::int64_t co = 0; co < c_out; ++co) gb[co] += gy.row(co).sum();
      }
    });
  }
  return out;
}

Tensor relu(const Tensor& x) {
  Tensor out = unary(x, [](Real v) { return v > Real(0) ? v : Real(0); });
  if (needs_grad({&x})) {
    Impl xi = x.impl(), oi = out.impl();
    record_op(out, [xi, oi] {
      if (oi->grad.empty() || !xi->requires_grad) return;
      auto& gx = xi->ensure_grad();
      for (std::size_t i = 0; i < gx.size(); ++i) {
        if (xi->value[i] > Real(0)) gx[i] += oi->grad[i];
      }
    });
  }
  return out;
}

Tensor sigmoid(const Tensor& x) {
  Tensor out = unary(x, [](Real v) { return Real(1) / (Real(1) + std::exp(-v)); });
  if (needs_grad({&x})) {
    Impl xi = x.impl(), oi = out.impl();
    record_op(out, [xi, oi] {
      if (oi->grad.empty() || !xi->requires_grad) return;
      auto& gx = xi->ensure_grad();
      for (std::size_t i = 0; i < gx.size(); ++i) {
        const Real s = oi->value[i];
        gx[i] += oi->grad[i] * s * (Real(1) - s);
      }
    });
  }
  return out;
}

namespace {

// Elementwise binary op with per-side scaling of the incoming gradient.
template <class F, class DA, class DB>
Tensor binary(const Tensor& a, const Tensor& b, const char* name, F f, DA da, DB db) {
  require_same_shape(a, b, name);
  Tensor out(a.shape());
  auto av = a.data();
  auto bv = b.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = f(av[i], bv[i]);
  if (needs_grad({&a, &b})) {
    Impl ai = a.impl(), bi = b.impl(), oi = out.impl();
    record_op(out, [ai, bi, oi, da, db] {
      if (oi->grad.empty()) return;
      const auto& g = oi->grad;
      if (ai->requires_grad) {
        auto& ga = ai->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * da(ai->value[i], bi->value[i]);
      }
      if (bi->requires_grad) {
        auto& gb = bi->ensure_grad();
        for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * db(ai->value[i], bi->value[i]);
      }
    });
  }
  return out;
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "add", [](Real x, Real y) { return x + y; }, [](Real, Real) { return Real(1); },
      [](Real, Real) { return Real(1); });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "sub", [](Real x, Real y) { return x - y; }, [](Real, Real) { return Real(1); },
      [](Real, Real) { return Real(-1); });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary(
      a, b, "mul", [](Real x, Real y) { return x * y; }, [](Real, Real y) { return y; },
      [](Real x, Real) { return x; });
}

Tensor scale(const Tensor& x, Real s) {
  Tensor out = unary(x, [s](Real v) { return v * s; });
  if (needs_grad({&x})) {
    Impl xi = x.impl(), oi = out.impl();
    record_op(out, [xi, oi, s] {
      if (oi->grad.empty() || !xi->requires_grad) return;
      auto& gx = xi->ensure_grad();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += oi->grad[i] * s;
    });
  }
  return out;
}

Tensor mul_plane(const Tensor& x, const Tensor& plane) {
  require_rank(x, 3, "mul_plane");
  require_rank(plane, 3, "mul_plane");
  if (plane.dim(0) != 1 || plane.dim(1) != x.dim(1) || plane.dim(2) != x.dim(2)) {
    throw ShapeError("mul_plane: plane " + shape_str(plane.shape()) +
                     " does not broadcast over " + shape_str(x.shape()));
  }
  const std::int64_t c = x.dim(0), hw = x.dim(1) * x.dim(2);
  Tensor out(x.shape());
  for (std::int64_t k = 0; k < c; ++k) {
    for (std::int64_t i = 0; i < hw; ++i) out.ptr()[k * hw + i] = x.ptr()[k * hw + i] * plane.ptr()[i];
  }
  if (needs_grad({&x, &plane})) {
    Impl xi = x.impl(), pi = plane.impl(), oi = out.impl();
    record_op(out, [xi, pi, oi, c, hw] {
      if (oi->grad.empty()) return;
      const auto& g = oi->grad;
      if (xi->requires_grad) {
        auto& gx = xi->ensure_grad();
        for (std::int64_t k = 0; k < c; ++k) {
          for (std::int64_t i = 0; i < hw; ++i) gx[k * hw + i] += g[k * hw + i] * pi->value[i];
        }
      }
      if (pi->requires_grad) {
        auto& gp = pi->ensure_grad();
        for (std::int64_t k = 0; k < c; ++k) {
          for (std::int64_t i = 0; i < hw; ++i) gp[i] += g[k * hw + i] * xi->value[k * hw + i];
        }
      }
    });
  }
  return out;
}

Tensor channel_dot(const Tensor& a, const Tensor& b) {
  require_rank(a, 3, "channel_dot");
  require_same_shape(a, b, "channel_dot");
  const std::int64_t c = a.dim(0), hw = a.dim(1) * a.dim(2);
  Tensor out(Shape{1, a.dim(1), a.dim(2)});
  for (std::int64_t k = 0; k < c; ++k) {
    for (std::int64_t i = 0; i < hw; ++i) out.ptr()[i] += a.ptr()[k * hw + i] * b.ptr()[k * hw + i];
  }
  if (needs_grad({&a, &b})) {
    Impl ai = a.impl(), bi = b.impl(), oi = out.impl();
    record_op(out, [ai, bi, oi, c, hw] {
      if (oi->grad.empty()) return;
      const auto& g = oi->grad;
      if (ai->requires_grad) {
        auto& ga = ai->ensure_grad();
        for (std::int64_t k = 0; k < c; ++k) {
          for (std::int64_t i = 0; i < hw; ++i) ga[k * hw + i] += g[i] * bi->value[k * hw + i];
        }
      }
      if (bi->requires_grad) {
        auto& gb = bi->ensure_grad();
        for (std::int64_t k = 0; k < c; ++k) {
          for (std::int64_t i = 0; i < hw; ++i) gb[k * hw + i] += g[i] * ai->value[k * hw + i];
        }
      }
    });
  }
  return out;
}

Tensor concat_channels(std::span<const Tensor> xs) {
  if (xs.empty()) throw ShapeError("concat_channels: empty input list");
  std::int64_t channels = 0;
  for (const auto& t : xs) {
    require_rank(t, 3, "concat_channels");
    if (t.dim(1) != xs[0].dim(1)) throw ShapeError("concat_channels: height axis mismatch");
    if (t.dim(2) != xs[0].dim(2)) throw ShapeError("concat_channels: width axis mismatch");
    channels += t.dim(0);
  }
  Tensor out(Shape{channels, xs[0].dim(1), xs[0].dim(2)});
  std::int64_t offset = 0;
  for (const auto& t : xs) {
    std::copy(t.data().begin(), t.data().end(), out.data().begin() + offset);
    offset += t.numel();
  }
  if (needs_grad(xs)) {
    std::vector<Impl> inputs;
    for (const auto& t : xs) inputs.push_back(t.impl());
    Impl oi = out.impl();
    record_op(out, [inputs, oi] {
      if (oi->grad.empty()) return;
      std::size_t offset = 0;
      for (const auto& in : inputs) {
        if (in->requires_grad) {
          auto& g = in->ensure_grad();
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += oi->grad[offset + i];
        }
        offset += in->value.size();
      }
    });
  }
  return out;
}

Tensor slice_channels(const Tensor& x, std::int64_t begin, std::int64_t count) {
  require_rank(x, 3, "slice_channels");
  if (begin < 0 || count < 0 || begin + count > x.dim(0)) {
    throw ShapeError("slice_channels: channel range [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") outside " + shape_str(x.shape()));
  }
  const std::int64_t hw = x.dim(1) * x.dim(2);
  Tensor out(Shape{count, x.dim(1), x.dim(2)});
  std::copy(x.data().begin() + begin * hw, x.data().begin() + (begin + count) * hw,
            out.data().begin());
  if (needs_grad({&x})) {
    Impl xi = x.impl(), oi = out.impl();
    record_op(out, [xi, oi, begin, hw] {
      if (oi->grad.empty() || !xi->requires_grad) return;
      auto& gx = xi->ensure_grad();
      for (std::size_t i = 0; i < oi->grad.size(); ++i) gx[begin * hw + i] += oi->grad[i];
    });
  }
  return out;
}

Tensor interleave_channels(std::span<const Tensor> xs) {
  if (xs.empty()) throw ShapeError("interleave_channels: empty input list");
  for (const auto& t : xs) {
    require_rank(t, 3, "interleave_channels");
    require_same_shape(t, xs[0], "interleave_channels");
  }
  const auto n = static_cast<std::int64_t>(xs.size());
  const std::int64_t c = xs[0].dim(0), hw = xs[0].dim(1) * xs[0].dim(2);
  Tensor out(Shape{c * n, xs[0].dim(1), xs[0].dim(2)});
  for (std::int64_t t = 0; t < n; ++t) {
    for (std::int64_t k = 0; k < c; ++k) {
      std::copy_n(xs[t].ptr() + k * hw, hw, out.ptr() + (k * n + t) * hw);
    }
  }
  if (needs_grad(xs)) {
    std::vector<Impl> inputs;
    for (const auto& t : xs) inputs.push_back(t.impl());
    Impl oi = out.impl();
    record_op(out, [inputs, oi, n, c, hw] {
      if (oi->grad.empty()) return;
      for (std::int64_t t = 0; t < n; ++t) {
        if (!inputs[t]->requires_grad) continue;
        auto& g = inputs[t]->ensure_grad();
        for (std::int64_t k = 0; k < c; ++k) {
          const Real* src = oi->grad.data() + (k * n + t) * hw;
          for (std::int64_t i = 0; i < hw; ++i) g[k * hw + i] += src[i];
        }
      }
    });
  }
  return out;
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_numel(shape) != x.numel()) {
    throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " + shape_str(shape));
  }
  Tensor out(std::move(shape), std::vector<Real>(x.data().begin(), x.data().end()));
  if (needs_grad({&x})) {
    Impl xi = x.impl(), oi = out.impl();
    record_op(out, [xi, oi] {
      if (oi->grad.empty() || !xi->requires_grad) return;
      auto& gx = xi->ensure_grad();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += oi->grad[i];
    });
  }
  return out;
}

Tensor pixel_shuffle(const Tensor& x, int r) {
  require_rank(x, 3, "pixel_shuffle");
  if (r <= 0 || x.dim(0) % (r * r) != 0) {
    throw ShapeError("pixel_shuffle: channel axis " + std::to_string(x.dim(0)) +
                     " not divisible by r^2 = " + std::to_string(r * r));
  }
  const std::int64_t c = x.dim(0) / (r * r), h = x.dim(1), w = x.dim(2);
  Tensor out(Shape{c, h * r, w * r});
  // out[k, y*r+i, x*r+j] = in[k*r*r + i*r + j, y, x]
  std::vector<std::int64_t> src(static_cast<std::size_t>(out.numel()));
  for (std::int64_t k = 0; k < c; ++k)
    for (std::int64_t i = 0; i < r; ++i)
      for (std::int64_t j = 0; j < r; ++j)
        for (std::int64_t yy = 0; yy < h; ++yy)
          for (std::int64_t xx = 0; xx < w; ++xx) {
            const std::int64_t o = (k * h * r + yy * r + i) * w * r + xx * r + j;
            src[o] = ((k * r * r + i * r + j) * h + yy) * w + xx;
          }
  for (std::size_t o = 0; o < src.size(); ++o) out.ptr()[o] = x.ptr()[src[o]];
  if (needs_grad({&x})) {
    Impl xi = x.impl(), oi = out.impl();
    record_op(out, [xi, oi, src = std::move(src)] {
      if (oi->grad.empty() || !xi->requires_grad) return;
      auto& gx = xi->ensure_grad();
      for (std::size_t o = 0; o < src.size(); ++o) gx[src[o]] += oi->grad[o];
    });
  }
  return out;
}

namespace {

struct LinearTap {
  std::int64_t i0, i1;
  Real w1;  // weight of i1; i0 gets 1 - w1
};

std::vector<LinearTap> linear_taps(std::int64_t in, std::int64_t out) {
  std::vector<LinearTap> taps(static_cast<std::size_t>(out));
  const double ratio = static_cast<double>(in) / static_cast<double>(out);
  for (std::int64_t o = 0; o < out; ++o) {
    double s = std::min(static_cast<double>(o) * ratio, static_cast<double>(in - 1));
    const auto i0 = static_cast<std::int64_t>(std::floor(s));
    const std::int64_t i1 = std::min(i0 + 1, in - 1);
    taps[o] = {i0, i1, static_cast<Real>(s - static_cast<double>(i0))};
  }
  return taps;
}

}  // namespace

Tensor upsample_bilinear(const Tensor& x, std::int64_t out_h, std::int64_t out_w) {
  require_rank(x, 3, "upsample_bilinear");
  if (out_h <= 0 || out_w <= 0) throw ShapeError("upsample_bilinear: empty output grid");
  const std::int64_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  const auto ty = linear_taps(h, out_h);
  const auto tx = linear_taps(w, out_w);
  Tensor out(Shape{c, out_h, out_w});
  for (std::int64_t k = 0; k < c; ++k) {
    const Real* src = x.ptr() + k * h * w;
    Real* dst = out.ptr() + k * out_h * out_w;
    for (std::int64_t oy = 0; oy < out_h; ++oy) {
      const auto& a = ty[oy];
      for (std::int64_t ox = 0; ox < out_w; ++ox) {
        const auto& b = tx[ox];
        const Real top = src[a.i0 * w + b.i0] * (1 - b.w1) + src[a.i0 * w + b.i1] * b.w1;
        const Real bot = src[a.i1 * w + b.i0] * (1 - b.w1) + src[a.i1 * w + b.i1] * b.w1;
        dst[oy * out_w + ox] = top * (1 - a.w1) + bot * a.w1;
      }
    }
  }
  if (needs_grad({&x})) {
    Impl xi = x.impl(), oi = out.impl();
    record_op(out, [xi, oi, ty, tx, c, h, w, out_h, out_w] {
      if (oi->grad.empty() || !xi->requires_grad) return;
      auto& gx = xi->ensure_grad();
      for (std::int64_t k = 0; k < c; ++k) {
        Real* dst = gx.data() + k * h * w;
        const Real* g = oi->grad.data() + k * out_h * out_w;
        for (std::int64_t oy = 0; oy < out_h; ++oy) {
          const auto& a = ty[oy];
          for (std::int64_t ox = 0; ox < out_w; ++ox) {
            const auto& b = tx[ox];
            const Real v = g[oy * out_w + ox];
            dst[a.i0 * w + b.i0] += v * (1 - a.w1) * (1 - b.w1);
            dst[a.i0 * w + b.i1] += v * (1 - a.w1) * b.w1;
            dst[a.i1 * w + b.i0] += v * a.w1 * (1 - b.w1);
            dst[a.i1 * w + b.i1] += v * a.w1 * b.w1;
          }
        }
      }
    });
  }
  return out;
}

Tensor bilinear_sample(const Tensor& feat, const Tensor& coords) {
  require_rank(feat, 3, "bilinear_sample");
  require_rank(coords, 3, "bilinear_sample");
  if (coords.dim(0) != 2) {
    throw ShapeError("bilinear_sample: coords must be 2 x Ho x Wo, got " +
                     shape_str(coords.shape()));
  }
  const std::int64_t c = feat.dim(0), h = feat.dim(1), w = feat.dim(2);
  const std::int64_t n = coords.dim(1) * coords.dim(2);
  Tensor out(Shape{c, coords.dim(1), coords.dim(2)});

  struct Site {
    std::int64_t y0, y1, x0, x1;
    Real wy, wx;
    bool in_y, in_x;  // coordinate strictly inside the clamp range
  };
  std::vector<Site> sites(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    const Real cy = coords.ptr()[i];
    const Real cx = coords.ptr()[n + i];
    const Real y = std::clamp(cy, Real(0), static_cast<Real>(h - 1));
    const Real x = std::clamp(cx, Real(0), static_cast<Real>(w - 1));
    Site s;
    s.y0 = std::min(static_cast<std::int64_t>(std::floor(y)), h - 1);
    s.x0 = std::min(static_cast<std::int64_t>(std::floor(x)), w - 1);
    s.y1 = std::min(s.y0 + 1, h - 1);
    s.x1 = std::min(s.x0 + 1, w - 1);
    s.wy = y - static_cast<Real>(s.y0);
    s.wx = x - static_cast<Real>(s.x0);
    s.in_y = cy >= Real(0) && cy <= static_cast<Real>(h - 1);
    s.in_x = cx >= Real(0) && cx <= static_cast<Real>(w - 1);
    sites[i] = s;
  }
  for (std::int64_t k = 0; k < c; ++k) {
    const Real* f = feat.ptr() + k * h * w;
    Real* o = out.ptr() + k * n;
    for (std::int64_t i = 0; i < n; ++i) {
      const Site& s = sites[i];
      const Real top = f[s.y0 * w + s.x0] * (1 - s.wx) + f[s.y0 * w + s.x1] * s.wx;
      const Real bot = f[s.y1 * w + s.x0] * (1 - s.wx) + f[s.y1 * w + s.x1] * s.wx;
      o[i] = top * (1 - s.wy) + bot * s.wy;
    }
  }
  if (needs_grad({&feat, &coords})) {
    Impl fi = feat.impl(), ci = coords.impl(), oi = out.impl();
    record_op(out, [fi, ci, oi, sites = std::move(sites), c, h, w, n] {
      if (oi->grad.empty()) return;
      const auto& g = oi->grad;
      if (fi->requires_grad) {
        auto& gf = fi->ensure_grad();
        for (std::int64_t k = 0; k < c; ++k) {
          Real* d = gf.data() + k * h * w;
          for (std::int64_t i = 0; i < n; ++i) {
            const Site& s = sites[i];
            const Real v = g[k * n + i];
            d[s.y0 * w + s.x0] += v * (1 - s.wy) * (1 - s.wx);
            d[s.y0 * w + s.x1] += v * (1 - s.wy) * s.wx;
            d[s.y1 * w + s.x0] += v * s.wy * (1 - s.wx);
            d[s.y1 * w + s.x1] += v * s.wy * s.wx;
          }
        }
      }
      if (ci->requires_grad) {
        auto& gc = ci->ensure_grad();
        for (std::int64_t k = 0; k < c; ++k) {
          const Real* f = fi->value.data() + k * h * w;
          for (std::int64_t i = 0; i < n; ++i) {
            const Site& s = sites[i];
            const Real v = g[k * n + i];
            const Real f00 = f[s.y0 * w + s.x0], f01 = f[s.y0 * w + s.x1];
            const Real f10 = f[s.y1 * w + s.x0], f11 = f[s.y1 * w + s.x1];
            if (s.in_y) gc[i] += v * ((1 - s.wx) * (f10 - f00) + s.wx * (f11 - f01));
            if (s.in_x) gc[n + i] += v * ((1 - s.wy) * (f01 - f00) + s.wy * (f11 - f10));
          }
        }
      }
    });
  }
  return out;
}

namespace {

struct PatchGrid {
  std::int64_t c, h, w, k, stride, pad, grid_h, grid_w;
  std::int64_t patches() const { return grid_h * grid_w; }
  std::int64_t length() const { return c * k * k; }
};

PatchGrid patch_grid(std::int64_t c, std::int64_t h, std::int64_t w, int k, int stride, int pad,
                     const char* op) {
  if (k <= 0) throw ArgumentError(std::string(op) + ": kernel size must be positive");
  if (stride <= 0) throw ArgumentError(std::string(op) + ": stride must be positive");
  if (pad < 0) throw ArgumentError(std::string(op) + ": padding must be non-negative");
  const std::int64_t span_h = h + 2 * pad - k, span_w = w + 2 * pad - k;
  if (span_h < 0) throw ShapeError(std::string(op) + ": height axis smaller than the window");
  if (span_w < 0) throw ShapeError(std::string(op) + ": width axis smaller than the window");
  return {c, h, w, k, stride, pad, span_h / stride + 1, span_w / stride + 1};
}

// Source pixel offset within one channel for every (patch, ky, kx), or -1.
std::vector<std::int64_t> window_sources(const PatchGrid& g, PadMode mode) {
  std::vector<std::int64_t> src(static_cast<std::size_t>(g.patches() * g.k * g.k));
  std::size_t n = 0;
  for (std::int64_t py = 0; py < g.grid_h; ++py)
    for (std::int64_t px = 0; px < g.grid_w; ++px)
      for (std::int64_t ky = 0; ky < g.k; ++ky)
        for (std::int64_t kx = 0; kx < g.k; ++kx) {
          const std::int64_t iy = pad_index(py * g.stride - g.pad + ky, g.h, mode);
          const std::int64_t ix = pad_index(px * g.stride - g.pad + kx, g.w, mode);
          src[n++] = (iy < 0 || ix < 0) ? -1 : iy * g.w + ix;
        }
  return src;
}

}  // namespace

Tensor unfold(const Tensor& x, int k, int stride, int pad, PadMode mode) {
  require_rank(x, 3, "unfold");
  const PatchGrid g = patch_grid(x.dim(0), x.dim(1), x.dim(2), k, stride, pad, "unfold");
  if (mode == PadMode::reflect && (pad >= g.h || pad >= g.w)) {
    throw ShapeError("unfold: reflect padding " + std::to_string(pad) +
                     " needs extents larger than the pad");
  }
  const auto src = window_sources(g, mode);
  const std::int64_t kk = g.k * g.k, hw = g.h * g.w, len = g.length();
  Tensor out(Shape{g.patches(), len});
  for (std::int64_t p = 0; p < g.patches(); ++p) {
    Real* row = out.ptr() + p * len;
    const std::int64_t* s = src.data() + p * kk;
    for (std::int64_t ch = 0; ch < g.c; ++ch) {
      const Real* plane = x.ptr() + ch * hw;
      for (std::int64_t t = 0; t < kk; ++t) row[ch * kk + t] = s[t] < 0 ? Real(0) : plane[s[t]];
    }
  }
  if (needs_grad({&x})) {
    Impl xi = x.impl(), oi = out.impl();
    record_op(out, [xi, oi, g, src, kk, hw, len] {
      if (oi->grad.empty() || !xi->requires_grad) return;
      auto& gx = xi->ensure_grad();
      for (std::int64_t p = 0; p < g.patches(); ++p) {
        const Real* row = oi->grad.data() + p * len;
        const std::int64_t* s = src.data() + p * kk;
        for (std::int64_t ch = 0; ch < g.c; ++ch) {
          Real* plane = gx.data() + ch * hw;
          for (std::int64_t t = 0; t < kk; ++t) {
            if (s[t] >= 0) plane[s[t]] += row[ch * kk + t];
          }
        }
      }
    });
  }
  return out;
}

Tensor fold(const Tensor& patches, std::int64_t channels, int k, int stride, int pad,
            std::int64_t out_h, std::int64_t out_w) {
  require_rank(patches, 2, "fold");
  const PatchGrid g = patch_grid(channels, out_h, out_w, k, stride, pad, "fold");
  if (patches.dim(0) != g.patches()) {
    throw ShapeError("fold: " + std::to_string(patches.dim(0)) + " patches do not form the " +
                     std::to_string(g.grid_h) + "x" + std::to_string(g.grid_w) +
                     " window grid of a " + std::to_string(out_h) + "x" + std::to_string(out_w) +
                     " output");
  }
  if (patches.dim(1) != g.length()) {
    throw ShapeError("fold: patch length " + std::to_string(patches.dim(1)) + " != C*k*k = " +
                     std::to_string(g.length()));
  }
  if (stride > k) throw ArgumentError("fold: stride larger than the window leaves gaps");
  // Zero padding marks canvas cells outside the output so they are dropped.
  const auto src = window_sources(g, PadMode::zeros);
  const std::int64_t kk = g.k * g.k, hw = g.h * g.w, len = g.length();
  std::vector<Real> inv_count(static_cast<std::size_t>(hw), Real(0));
  for (auto s : src) {
    if (s >= 0) inv_count[s] += Real(1);
  }
  for (auto& v : inv_count) {
    if (v == Real(0)) throw ShapeError("fold: output pixel not covered by any window");
    v = Real(1) / v;
  }
  Tensor out(Shape{channels, out_h, out_w});
  for (std::int64_t p = 0; p < g.patches(); ++p) {
    const Real* row = patches.ptr() + p * len;
    const std::int64_t* s = src.data() + p * kk;
    for (std::int64_t ch = 0; ch < channels; ++ch) {
      Real* plane = out.ptr() + ch * hw;
      for (std::int64_t t = 0; t < kk; ++t) {
        if (s[t] >= 0) plane[s[t]] += row[ch * kk + t];
      }
    }
  }
  for (std::int64_t ch = 0; ch < channels; ++ch) {
    Real* plane = out.ptr() + ch * hw;
    for (std::int64_t i = 0; i < hw; ++i) plane[i] *= inv_count[i];
  }
  if (needs_grad({&patches})) {
    Impl pi = patches.impl(), oi = out.impl();
    record_op(out, [pi, oi, g, src, inv_count = std::move(inv_count), kk, hw, len] {
      if (oi->grad.empty() || !pi->requires_grad) return;
      auto& gp = pi->ensure_grad();
      for (std::int64_t p = 0; p < g.patches(); ++p) {
        Real* row = gp.data() + p * len;
        const std::int64_t* s = src.data() + p * kk;
        for (std::int64_t ch = 0; ch < g.c; ++ch) {
          const Real* plane = oi->grad.data() + ch * hw;
          for (std::int64_t t = 0; t < kk; ++t) {
            if (s[t] >= 0) row[ch * kk + t] += plane[s[t]] * inv_count[s[t]];
          }
        }
      }
    });
  }
  return out;
}

Tensor index_rows(const Tensor& m, std::span<const std::int64_t> rows) {
  require_rank(m, 2, "index_rows");
  const std::int64_t n = m.dim(0), d = m.dim(1);
  std::vector<std::int64_t> idx(rows.begin(), rows.end());
  for (auto r : idx) {
    if (r < 0 || r >= n) {
      throw ShapeError("index_rows: row " + std::to_string(r) + " outside [0, " +
                       std::to_string(n) + ")");
    }
  }
  Tensor out(Shape{static_cast<std::int64_t>(idx.size()), d});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    std::copy_n(m.ptr() + idx[i] * d, d, out.ptr() + static_cast<std::int64_t>(i) * d);
  }
  if (needs_grad({&m})) {
    Impl mi = m.impl(), oi = out.impl();
    record_op(out, [mi, oi, idx = std::move(idx), d] {
      if (oi->grad.empty() || !mi->requires_grad) return;
      auto& gm = mi->ensure_grad();
      for (std::size_t i = 0; i < idx.size(); ++i) {
        for (std::int64_t j = 0; j < d; ++j) {
          gm[idx[i] * d + j] += oi->grad[static_cast<std::int64_t>(i) * d + j];
        }
      }
    });
  }
  return out;
}

Tensor sum(const Tensor& x) {
  Real s = 0;
  for (Real v : x.data()) s += v;
  Tensor out = Tensor::scalar(s);
  if (needs_grad({&x})) {
    Impl xi = x.impl(), oi = out.impl();
    record_op(out, [xi, oi] {
      if (oi->grad.empty() || !xi->requires_grad) return;
      auto& gx = xi->ensure_grad();
      for (auto& v : gx) v += oi->grad[0];
    });
  }
  return out;
}

Tensor l1_loss(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "l1_loss");
  if (a.numel() == 0) throw ShapeError("l1_loss: empty tensors");
  Real s = 0;
  for (std::int64_t i = 0; i < a.numel(); ++i) s += std::abs(a.ptr()[i] - b.ptr()[i]);
  const Real inv_n = Real(1) / static_cast<Real>(a.numel());
  Tensor out = Tensor::scalar(s * inv_n);
  if (needs_grad({&a, &b})) {
    Impl ai = a.impl(), bi = b.impl(), oi = out.impl();
    record_op(out, [ai, bi, oi, inv_n] {
      if (oi->grad.empty()) return;
      const Real g = oi->grad[0] * inv_n;
      auto sign = [](Real v) { return Real((v > 0) - (v < 0)); };
      if (ai->requires_grad) {
        auto& ga = ai->ensure_grad();
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g * sign(ai->value[i] - bi->value[i]);
      }
      if (bi->requires_grad) {
        auto& gb = bi->ensure_grad();
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g * sign(ai->value[i] - bi->value[i]);
      }
    });
  }
  return out;
}

namespace {

// Applies `taps` along one spatial axis (1 = rows/y, 2 = columns/x).
Tensor resample_axis(const Tensor& x, const FilterTaps& taps, int axis) {
  const std::int64_t c = x.dim(0), h = x.dim(1), w = x.dim(2);
  const std::int64_t oh = axis == 1 ? taps.out_len : h;
  const std::int64_t ow = axis == 2 ? taps.out_len : w;
  Tensor out(Shape{c, oh, ow});
  const int nt = taps.taps;
  for (std::int64_t k = 0; k < c; ++k) {
    const Real* src = x.ptr() + k * h * w;
    Real* dst = out.ptr() + k * oh * ow;
    for (std::int64_t y = 0; y < oh; ++y) {
      for (std::int64_t xx = 0; xx < ow; ++xx) {
        const std::int64_t o = axis == 1 ? y : xx;
        const std::size_t base = static_cast<std::size_t>(o) * nt;
        Real acc = 0;
        for (int t = 0; t < nt; ++t) {
          const std::int64_t j = taps.index[base + t];
          const Real v = axis == 1 ? src[j * w + xx] : src[y * w + j];
          acc += static_cast<Real>(taps.weight[base + t]) * v;
        }
        dst[y * ow + xx] = acc;
      }
    }
  }
  if (needs_grad({&x})) {
    Impl xi = x.impl(), oi = out.impl();
    record_op(out, [xi, oi, taps, axis, c, h, w, oh, ow, nt] {
      if (oi->grad.empty() || !xi->requires_grad) return;
      auto& gx = xi->ensure_grad();
      for (std::int64_t k = 0; k < c; ++k) {
        Real* dst = gx.data() + k * h * w;
        const Real* g = oi->grad.data() + k * oh * ow;
        for (std::int64_t y = 0; y < oh; ++y) {
          for (std::int64_t xx = 0; xx < ow; ++xx) {
            const std::int64_t o = axis == 1 ? y : xx;
            const std::size_t base = static_cast<std::size_t>(o) * nt;
            const Real v = g[y * ow + xx];
            for (int t = 0; t < nt; ++t) {
              const std::int64_t j = taps.index[base + t];
              Real& d = axis == 1 ? dst[j * w + xx] : dst[y * w + j];
              d += static_cast<Real>(taps.weight[base + t]) * v;
            }
          }
        }
      }
    });
  }
  return out;
}

}  // namespace

Tensor bicubic_down(const Tensor& x, int d) {
  require_rank(x, 3, "bicubic_down");
  const auto tx = bicubic_down_taps(static_cast<int>(x.dim(2)), d);
  const auto ty = bicubic_down_taps(static_cast<int>(x.dim(1)), d);
  return resample_axis(resample_axis(x, tx, 2), ty, 1);
}

Tensor bicubic_up(const Tensor& x, int d) {
  require_rank(x, 3, "bicubic_up");
  const auto tx = bicubic_up_taps(static_cast<int>(x.dim(2)), d);
  const auto ty = bicubic_up_taps(static_cast<int>(x.dim(1)), d);
  return resample_axis(resample_axis(x, tx, 2), ty, 1);
}

}  // namespace ops
CRS_NN_END_NAMESPACE
