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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "crs/adam.hpp"
#include "crs/layers.hpp"
#include "crs/ops.hpp"

namespace crs {
namespace {

Tensor random_tensor(Shape s, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  Tensor t(std::move(s));
  for (Real& v : t.data()) v = static_cast<Real>(lo + (hi - lo) * unit_uniform(rng));
  return t;
}

ConvParams random_conv(std::int64_t cin, std::int64_t cout, int k, int stride, int pad,
                       std::mt19937_64& rng) {
  ConvParams p;
  p.weight = random_tensor({cout, cin, k, k}, rng, -0.5, 0.5);
  p.bias = random_tensor({cout}, rng, -0.5, 0.5);
  p.stride = stride;
  p.padding = pad;
  return p;
}

// Direct quadruple loop in double.
std::vector<double> naive_conv(const Tensor& x, const ConvParams& p) {
  const auto c = x.dim(0), h = x.dim(1), w = x.dim(2), k = p.kernel_h();
  const auto oh = (h + 2 * p.padding - k) / p.stride + 1, ow = (w + 2 * p.padding - k) / p.stride + 1;
  std::vector<double> out;
  for (std::int64_t o = 0; o < p.out_channels(); ++o)
    for (std::int64_t y = 0; y < oh; ++y)
      for (std::int64_t xx = 0; xx < ow; ++xx) {
        double s = p.bias.ptr()[o];
        for (std::int64_t i = 0; i < c; ++i)
          for (std::int64_t ky = 0; ky < k; ++ky)
            for (std::int64_t kx = 0; kx < k; ++kx) {
              const auto sy = y * p.stride - p.padding + ky, sx = xx * p.stride - p.padding + kx;
              if (sy < 0 || sy >= h || sx < 0 || sx >= w) continue;
              s += static_cast<double>(p.weight.ptr()[((o * c + i) * k + ky) * k + kx]) * x.at(i, sy, sx);
            }
        out.push_back(s);
      }
  return out;
}

TEST(Conv2d, IdentityKernel) {
  std::mt19937_64 rng(1);
  const Tensor x = random_tensor({3, 5, 7}, rng);
  ConvParams p;
  p.weight = Tensor(Shape{3, 3, 1, 1});
  for (int i = 0; i < 3; ++i) p.weight.ptr()[i * 3 + i] = 1;
  p.bias = Tensor(Shape{3});
  p.padding = 0;
  const Tensor y = ops::conv2d(x, p);
  ASSERT_EQ(y.shape(), x.shape());
  for (std::int64_t i = 0; i < x.numel(); ++i) EXPECT_EQ(y.ptr()[i], x.ptr()[i]);
}

TEST(Conv2d, OnesKernelOnConstant) {
  const Tensor x(Shape{1, 4, 4}, Real(5));
  ConvParams p;
  p.weight = Tensor(Shape{1, 1, 3, 3}, Real(1));
  p.bias = Tensor(Shape{1});
  const Tensor y = ops::conv2d(x, p);
  EXPECT_EQ(y.at(0, 1, 1), 45);
  EXPECT_EQ(y.at(0, 2, 2), 45);
  EXPECT_EQ(y.at(0, 0, 0), 20);
  EXPECT_EQ(y.at(0, 3, 3), 20);
  EXPECT_EQ(y.at(0, 0, 3), 20);
  EXPECT_EQ(y.at(0, 0, 1), 30);
}

TEST(Conv2d, StrideTwoShape) {
  std::mt19937_64 rng(2);
  const Tensor x = random_tensor({4, 8, 8}, rng);
  const Tensor y = ops::conv2d(x, random_conv(4, 6, 3, 2, 1, rng));
  EXPECT_EQ(y.shape(), (Shape{6, 4, 4}));
}

TEST(Conv2d, MatchesNaiveOracle) {
  std::mt19937_64 rng(3);
  struct Case { std::int64_t c, h, w, cout; int k, s, p; };
  for (const Case cs : {Case{1, 5, 6, 2, 3, 1, 1}, Case{3, 9, 7, 4, 3, 2, 1}, Case{8, 32, 32, 8, 3, 1, 1},
                        Case{8, 32, 32, 5, 1, 1, 0}, Case{2, 11, 13, 3, 5, 2, 2}}) {
    const Tensor x = random_tensor({cs.c, cs.h, cs.w}, rng);
    const ConvParams p = random_conv(cs.c, cs.cout, cs.k, cs.s, cs.p, rng);
    const Tensor y = ops::conv2d(x, p);
    const auto ref = naive_conv(x, p);
    ASSERT_EQ(static_cast<std::size_t>(y.numel()), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y.ptr()[i], ref[i], 1e-5);
  }
}

TEST(Conv2d, ChannelMismatchNamesAxis) {
  std::mt19937_64 rng(4);
  const Tensor x = random_tensor({3, 4, 4}, rng);
  try {
    ops::conv2d(x, random_conv(2, 2, 3, 1, 1, rng));
    FAIL() << "expected ShapeError";
  } catch (const ShapeError& e) {
    EXPECT_NE(std::string(e.what()).find("channel"), std::string::npos);
  }
}

TEST(Conv2d, ReplicatePadding) {
  const Tensor x(Shape{1, 3, 3}, std::vector<Real>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  ConvParams p;
  p.weight = Tensor(Shape{1, 1, 3, 3});
  p.weight.ptr()[0] = 1;  // picks the up-left neighbour
  p.bias = Tensor(Shape{1});
  p.pad_mode = PadMode::replicate;
  const Tensor y = ops::conv2d(x, p);
  EXPECT_EQ(y.at(0, 0, 0), 1);
  EXPECT_EQ(y.at(0, 1, 1), 1);
  EXPECT_EQ(y.at(0, 2, 0), 4);
}

TEST(ResidualBlock, ZeroWeightsIsIdentity) {
  std::mt19937_64 rng(5);
  const Tensor x = random_tensor({64, 16, 16}, rng);
  ParamStore store;
  auto p1 = store.conv("a", 64, 64, 3, 1, Init::zeros);
  auto p2 = store.conv("b", 64, 64, 3, 1, Init::zeros);
  const Tensor y = residual_block(x, p1, p2);
  ASSERT_EQ(y.shape(), (Shape{64, 16, 16}));
  for (std::int64_t i = 0; i < x.numel(); ++i) EXPECT_EQ(y.ptr()[i], x.ptr()[i]);
}

TEST(ResidualBlock, GradientOfSumIsOnesAtZeroWeights) {
  std::mt19937_64 rng(6);
  Tensor x = random_tensor({4, 6, 6}, rng);
  x.set_requires_grad(true);
  ParamStore store;
  auto p1 = store.conv("a", 4, 4, 3, 1, Init::zeros);
  auto p2 = store.conv("b", 4, 4, 3, 1, Init::zeros);
  GradTape tape;
  Tensor s;
  {
    GradTape::Recording rec(tape);
    s = ops::sum(residual_block(x, p1, p2));
  }
  tape.backward(s);
  for (Real g : x.grad()) EXPECT_EQ(g, 1);
}

TEST(ResidualBlock, SkipIsLiteralAddition) {
  std::mt19937_64 rng(7);
  const Tensor x = random_tensor({8, 10, 10}, rng);
  ParamStore store(7);
  const ResBlock b = make_res_block(store, "blk", 8);
  const Tensor y = residual_block(x, b);
  const Tensor branch = ops::conv2d(ops::relu(ops::conv2d(x, b.conv1)), b.conv2);
  const Tensor sum = ops::add(x, branch);
  for (std::int64_t i = 0; i < x.numel(); ++i) EXPECT_EQ(y.ptr()[i], sum.ptr()[i]);
}

TEST(ResidualBlock, RejectsStride) {
  ParamStore store;
  auto p1 = store.conv("a", 4, 4, 3, 2);
  auto p2 = store.conv("b", 4, 4, 3, 1);
  EXPECT_THROW(residual_block(Tensor(Shape{4, 8, 8}), p1, p2), ShapeError);
}

TEST(BilinearSample, LatticeMidpointAndClamp) {
  Tensor f(Shape{1, 2, 2}, std::vector<Real>{2, 6, 10, 14});
  Tensor c(Shape{2, 1, 4}, std::vector<Real>{1, 0, 0, -3.7f, 0, 0.5f, 1, -3.7f});
  const Tensor y = ops::bilinear_sample(f, c);
  EXPECT_EQ(y.at(0, 0, 0), 10);
  EXPECT_EQ(y.at(0, 0, 1), 4);
  EXPECT_EQ(y.at(0, 0, 2), 6);
  EXPECT_EQ(y.at(0, 0, 3), 2);
}

TEST(BilinearSample, BadCoordsShape) {
  EXPECT_THROW(ops::bilinear_sample(Tensor(Shape{1, 2, 2}), Tensor(Shape{3, 2, 2})), ShapeError);
}

TEST(Unfold, DegenerateWindow) {
  std::mt19937_64 rng(8);
  const Tensor x = random_tensor({3, 4, 5}, rng);
  const Tensor u = ops::unfold(x, 1, 1);
  ASSERT_EQ(u.shape(), (Shape{20, 3}));
  for (int p = 0; p < 20; ++p)
    for (int ch = 0; ch < 3; ++ch) EXPECT_EQ(u.ptr()[p * 3 + ch], x.at(ch, p / 5, p % 5));
}

TEST(Unfold, RampWindow) {
  Tensor x(Shape{1, 4, 4});
  for (int i = 0; i < 16; ++i) x.ptr()[i] = static_cast<Real>(i);
  const Tensor u = ops::unfold(x, 3, 1, 1);
  ASSERT_EQ(u.shape(), (Shape{16, 9}));
  const Real expect[9] = {0, 1, 2, 4, 5, 6, 8, 9, 10};
  for (int t = 0; t < 9; ++t) EXPECT_EQ(u.ptr()[5 * 9 + t], expect[t]);
}

TEST(Unfold, RejectsBadArguments) {
  const Tensor x(Shape{1, 4, 4});
  EXPECT_THROW(ops::unfold(x, 0, 1), ArgumentError);
  EXPECT_THROW(ops::unfold(x, 3, 0), ArgumentError);
}

TEST(Fold, InvertsUnfoldForTransferTriples) {
  std::mt19937_64 rng(9);
  struct Triple { int k, s, pad; std::int64_t h; };
  for (const Triple t : {Triple{3, 1, 1, 8}, Triple{6, 2, 2, 16}, Triple{12, 4, 4, 32}}) {
    const Tensor x = random_tensor({5, t.h, t.h}, rng);
    const Tensor y = ops::fold(ops::unfold(x, t.k, t.s, t.pad, PadMode::reflect), 5, t.k, t.s, t.pad, t.h, t.h);
    for (std::int64_t i = 0; i < x.numel(); ++i) EXPECT_NEAR(y.ptr()[i], x.ptr()[i], 1e-6);
  }
}

TEST(Fold, PartitionIsExactRearrangement) {
  std::mt19937_64 rng(10);
  const Tensor x = random_tensor({2, 6, 6}, rng);
  const Tensor y = ops::fold(ops::unfold(x, 3, 3), 2, 3, 3, 0, 6, 6);
  for (std::int64_t i = 0; i < x.numel(); ++i) EXPECT_EQ(y.ptr()[i], x.ptr()[i]);
}

TEST(Fold, SinglePatch) {
  Tensor p(Shape{1, 9});
  for (int i = 0; i < 9; ++i) p.ptr()[i] = static_cast<Real>(i * i);
  const Tensor y = ops::fold(p, 1, 3, 1, 0, 3, 3);
  for (int i = 0; i < 9; ++i) EXPECT_EQ(y.ptr()[i], p.ptr()[i]);
}

TEST(Fold, RejectsInconsistentGrid) {
  EXPECT_THROW(ops::fold(Tensor(Shape{5, 9}), 1, 3, 1, 1, 4, 4), ShapeError);
}

TEST(Tape, BackwardVisitsEachNodeOnce) {
  Tensor x(Shape{3}, std::vector<Real>{1, 2, 3});
  x.set_requires_grad(true);
  GradTape tape;
  Tensor s;
  {
    GradTape::Recording rec(tape);
    const Tensor y = ops::mul(x, x);
    s = ops::sum(ops::add(y, y));
  }
  EXPECT_EQ(tape.size(), 3u);
  tape.backward(s);
  ASSERT_EQ(x.grad().size(), 3u);
  EXPECT_EQ(x.grad()[0], 4);
  EXPECT_EQ(x.grad()[2], 12);
}

TEST(Adam, ZeroGradientLeavesParams) {
  Tensor p(Shape{4}, std::vector<Real>{1, -2, 3, 0.5f});
  p.set_grad(std::vector<Real>(4, 0));
  AdamState st;
  std::vector<Tensor> ps{p};
  adam_step(ps, st, {});
  EXPECT_EQ(st.step, 1);
  EXPECT_EQ(p.ptr()[1], -2);
  p.set_grad({1, 1, 1, 1});
  adam_step(ps, st, {});
  const std::vector<Real> m_before = st.m[0];
  p.set_grad(std::vector<Real>(4, 0));
  adam_step(ps, st, {});
  EXPECT_LT(st.m[0][0], m_before[0]);
}

TEST(Adam, FirstStepIsSignedLr) {
  Tensor p(Shape{3}, std::vector<Real>{0, 0, 0});
  p.set_grad({0.3f, -2.0f, 1e-2f});
  AdamState st;
  std::vector<Tensor> ps{p};
  AdamConfig cfg;
  adam_step(ps, st, cfg);
  EXPECT_NEAR(p.ptr()[0], -1e-4, 1e-9);
  EXPECT_NEAR(p.ptr()[1], 1e-4, 1e-9);
  EXPECT_NEAR(p.ptr()[2], -1e-4, 1e-9);
}

TEST(Adam, ZeroLearningRate) {
  Tensor p(Shape{2}, std::vector<Real>{1, 2});
  p.set_grad({5, -5});
  AdamState st;
  std::vector<Tensor> ps{p};
  AdamConfig cfg;
  cfg.lr = 0;
  adam_step(ps, st, cfg);
  EXPECT_EQ(p.ptr()[0], 1);
  EXPECT_EQ(p.ptr()[1], 2);
}

TEST(Adam, NanGradientAborts) {
  Tensor p(Shape{2}, std::vector<Real>{1, 2});
  p.set_grad({NAN, 0});
  AdamState st;
  std::vector<Tensor> ps{p};
  EXPECT_THROW(adam_step(ps, st, {}), NumericError);
  EXPECT_EQ(p.ptr()[0], 1);
}

}  // namespace
}  // namespace crs
