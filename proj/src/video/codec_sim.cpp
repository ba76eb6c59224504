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

#include "crs/codec_sim.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "crs/error.hpp"

namespace crs {

namespace {

const std::array<double, 64>& dct_basis() {
  static const std::array<double, 64> basis = [] {
    std::array<double, 64> b{};
    const double pi = std::acos(-1.0);
    for (int k = 0; k < 8; ++k) {
      const double s = k == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      for (int n = 0; n < 8; ++n) b[k * 8 + n] = s * std::cos(pi * (2 * n + 1) * k / 16.0);
    }
    return b;
  }();
  return basis;
}

void check_blocks(const Plane& p) {
  if (p.width % kBlock != 0 || p.height % kBlock != 0) {
    throw ShapeError("codec: plane " + std::to_string(p.width) + "x" + std::to_string(p.height) +
                     " is not a whole number of 8x8 blocks");
  }
}

// Transform-codes `residual` (row-major, plane-sized) in place and returns the bits.
double code_residual(std::vector<double>& residual, int width, int height, double step) {
  double bits = 0.0;
  std::array<double, 64> blk{}, coef{};
  std::array<int, 64> lv{};
  for (int by = 0; by < height; by += kBlock) {
    for (int bx = 0; bx < width; bx += kBlock) {
      for (int y = 0; y < kBlock; ++y)
        for (int x = 0; x < kBlock; ++x)
          blk[y * 8 + x] = residual[static_cast<std::size_t>(by + y) * width + bx + x];
      dct8x8(blk.data(), coef.data());
      for (int i = 0; i < 64; ++i) {
        lv[i] = quantize(coef[i], step);
        coef[i] = lv[i] * step;
      }
      bits += block_bits(lv.data(), 64);
      idct8x8(coef.data(), blk.data());
      for (int y = 0; y < kBlock; ++y)
        for (int x = 0; x < kBlock; ++x)
          residual[static_cast<std::size_t>(by + y) * width + bx + x] = blk[y * 8 + x];
    }
  }
  return bits;
}

double code_plane(const Plane& src, const Plane* pred, Plane& recon, double step) {
  check_blocks(src);
  const double shift = pred == nullptr ? 128.0 : 0.0;
  std::vector<double> r(src.samples.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = src.samples[i] - (pred == nullptr ? shift : pred->samples[i]);
  }
  const double bits = code_residual(r, src.width, src.height, step);
  recon = Plane(src.width, src.height);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double base = pred == nullptr ? shift : pred->samples[i];
    recon.samples[i] = round_sample(base + r[i]);
  }
  return bits;
}

void check_same_size(const Frame& a, const Frame& b, const char* op) {
  if (a.width != b.width || a.height != b.height) {
    throw ShapeError(std::string(op) + ": frame sizes differ (" + std::to_string(a.width) + "x" +
                     std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                     std::to_string(b.height) + ")");
  }
}

int golomb_bits(int v) {
  const unsigned k = v > 0 ? 2u * static_cast<unsigned>(v) - 1u : 2u * static_cast<unsigned>(-v);
  int len = 0;
  while ((k + 1) >> (len + 1)) ++len;
  return 2 * len + 1;
}

int floor_half(int v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); }

}  // namespace

QpModel::QpModel(int q) : qp(q) {
  if (q < kQpMin || q > kQpMax) {
    throw ArgumentError("qp " + std::to_string(q) + " outside [0, 51]");
  }
}

double QpModel::step() const { return std::pow(2.0, (qp - 4) / 6.0); }

void dct8x8(const double* in, double* out) {
  const auto& b = dct_basis();
  double tmp[64];
  for (int y = 0; y < 8; ++y)
    for (int k = 0; k < 8; ++k) {
      double s = 0.0;
      for (int n = 0; n < 8; ++n) s += b[k * 8 + n] * in[y * 8 + n];
      tmp[y * 8 + k] = s;
    }
  for (int k = 0; k < 8; ++k)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int n = 0; n < 8; ++n) s += b[k * 8 + n] * tmp[n * 8 + x];
      out[k * 8 + x] = s;
    }
}

void idct8x8(const double* in, double* out) {
  const auto& b = dct_basis();
  double tmp[64];
  for (int y = 0; y < 8; ++y)
    for (int n = 0; n < 8; ++n) {
      double s = 0.0;
      for (int k = 0; k < 8; ++k) s += b[k * 8 + n] * in[y * 8 + k];
      tmp[y * 8 + n] = s;
    }
  for (int n = 0; n < 8; ++n)
    for (int x = 0; x < 8; ++x) {
      double s = 0.0;
      for (int k = 0; k < 8; ++k) s += b[k * 8 + n] * tmp[k * 8 + x];
      out[n * 8 + x] = s;
    }
}

int quantize(double coeff, double step) {
  const double q = std::floor(std::abs(coeff) / step + 0.5);
  return static_cast<int>(coeff < 0 ? -q : q);
}

double block_bits(const int* levels, int n) {
  int nnz = 0;
  double mag = 0.0;
  for (int i = 0; i < n; ++i) {
    if (levels[i] == 0) continue;
    ++nnz;
    mag += 1.0 + 2.0 * std::log2(1.0 + std::abs(levels[i]));
  }
  return 1.0 + std::log2(1.0 + nnz) + mag;
}

CodedFrame simulate_intra(const Frame& s, const QpModel& qp) {
  CodedFrame out;
  out.recon = Frame(s.width, s.height);
  out.recon.tier = s.tier;
  for (int i = 0; i < 3; ++i) {
    out.bits += code_plane(s.plane(i), nullptr, out.recon.plane(i), qp.step());
  }
  return out;
}

MotionField estimate_motion(const Plane& cur, const Plane& ref, int search) {
  if (cur.width != ref.width || cur.height != ref.height) {
    throw ShapeError("estimate_motion: plane sizes differ");
  }
  if (search < 0) throw ArgumentError("estimate_motion: negative search radius");
  check_blocks(cur);
  MotionField mf;
  mf.blocks_x = cur.width / kBlock;
  mf.blocks_y = cur.height / kBlock;
  for (int by = 0; by < mf.blocks_y; ++by) {
    for (int bx = 0; bx < mf.blocks_x; ++bx) {
      const int y0 = by * kBlock, x0 = bx * kBlock;
      MotionVector best;
      long best_sad = std::numeric_limits<long>::max();
      int best_len = 0;
      for (int dy = -search; dy <= search; ++dy) {
        if (y0 + dy < 0 || y0 + dy + kBlock > ref.height) continue;
        for (int dx = -search; dx <= search; ++dx) {
          if (x0 + dx < 0 || x0 + dx + kBlock > ref.width) continue;
          long sad = 0;
          for (int y = 0; y < kBlock; ++y)
            for (int x = 0; x < kBlock; ++x)
              sad += std::abs(cur.at(x0 + x, y0 + y) - ref.at(x0 + x + dx, y0 + y + dy));
          const int len = std::abs(dy) + std::abs(dx);
          if (sad < best_sad || (sad == best_sad && len < best_len)) {
            best_sad = sad;
            best_len = len;
            best = {dy, dx};
          }
        }
      }
      mf.vectors.push_back(best);
    }
  }
  return mf;
}

MotionField estimate_motion(const Frame& cur, const Frame& ref, int search) {
  check_same_size(cur, ref, "estimate_motion");
  return estimate_motion(cur.y, ref.y, search);
}

Frame motion_compensate(const Frame& ref, const MotionField& mf) {
  if (mf.blocks_x * kBlock != ref.width || mf.blocks_y * kBlock != ref.height) {
    throw ShapeError("motion_compensate: motion field does not tile the reference");
  }
  Frame pred(ref.width, ref.height);
  pred.tier = ref.tier;
  for (int by = 0; by < mf.blocks_y; ++by) {
    for (int bx = 0; bx < mf.blocks_x; ++bx) {
      const MotionVector mv = mf.at(bx, by);
      const int y0 = by * kBlock, x0 = bx * kBlock;
      for (int y = 0; y < kBlock; ++y)
        for (int x = 0; x < kBlock; ++x)
          pred.y.at(x0 + x, y0 + y) = ref.y.at(x0 + x + mv.dx, y0 + y + mv.dy);
      // Chroma blocks are 4x4 with vectors halved toward negative infinity.
      const int cy = floor_half(mv.dy), cx = floor_half(mv.dx);
      const int c0y = y0 / 2, c0x = x0 / 2;
      for (int y = 0; y < kBlock / 2; ++y)
        for (int x = 0; x < kBlock / 2; ++x) {
          pred.u.at(c0x + x, c0y + y) = ref.u.at(c0x + x + cx, c0y + y + cy);
          pred.v.at(c0x + x, c0y + y) = ref.v.at(c0x + x + cx, c0y + y + cy);
        }
    }
  }
  return pred;
}

double motion_bits(const MotionField& mf) {
  double bits = 0.0;
  for (const auto& mv : mf.vectors) bits += golomb_bits(mv.dy) + golomb_bits(mv.dx);
  return bits;
}

CodedFrame simulate_inter(const Frame& t, const Frame& ref, const QpModel& qp, int search) {
  check_same_size(t, ref, "simulate_inter");
  const MotionField mf = estimate_motion(t, ref, search);
  const Frame pred = motion_compensate(ref, mf);
  CodedFrame out;
  out.recon = Frame(t.width, t.height);
  out.recon.tier = t.tier;
  out.bits = motion_bits(mf);
  for (int i = 0; i < 3; ++i) {
    out.bits += code_plane(t.plane(i), &pred.plane(i), out.recon.plane(i), qp.step());
  }
  return out;
}

}  // namespace crs
