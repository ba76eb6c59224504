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

#include <algorithm>
#include <cmath>

#include "crs/error.hpp"
#include "crs/rd.hpp"

namespace crs {
namespace {

RdCurve curve(std::vector<double> kbps, std::vector<double> db) {
  std::vector<RdPoint> pts;
  for (std::size_t i = 0; i < kbps.size(); ++i) pts.push_back({kbps[i], db[i]});
  return RdCurve(std::move(pts));
}

const RdCurve kAnchor = curve({100, 180, 320, 600}, {30.1, 32.6, 35.0, 37.3});

TEST(Psnr, FormulaValues) {
  Plane a(8, 8, 100), b(8, 8, 100);
  EXPECT_DOUBLE_EQ(psnr(a, b), kPsnrCap);
  for (int i = 0; i < 64; i += 2) b.samples[i] = 101, b.samples[i + 1] = 99;
  EXPECT_NEAR(psnr(a, b), 48.1308, 5e-5);
  Plane c(8, 8, 116);
  EXPECT_NEAR(psnr(a, c), 20 * std::log10(255.0 / 16.0), 1e-12);
  EXPECT_NEAR(psnr(a, c), 24.0484, 5e-5);
  EXPECT_THROW(psnr(a, Plane(4, 8)), ShapeError);
}

TEST(Psnr, PlaneSelection) {
  Frame a(16, 16, 50, 128), b = a;
  b.u.samples.assign(b.u.samples.size(), 129);
  EXPECT_DOUBLE_EQ(psnr(a, b, PlaneSel::y), kPsnrCap);
  EXPECT_NEAR(psnr(a, b, PlaneSel::u), 48.1308, 5e-5);
  EXPECT_DOUBLE_EQ(psnr(a, b, PlaneSel::v), kPsnrCap);
}

TEST(RdCurveTest, Validation) {
  EXPECT_THROW(curve({1, 2, 3}, {30, 31, 32}), ArgumentError);
  EXPECT_THROW(curve({1, 2, 2, 3}, {30, 31, 32, 33}), ArgumentError);
  EXPECT_THROW(curve({1, 2, 3, 4}, {30, 32, 31, 33}), ArgumentError);
  EXPECT_THROW(curve({0, 2, 3, 4}, {30, 31, 32, 33}), ArgumentError);
}

// Cubic through four points, evaluated by Lagrange's formula.
double lagrange(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  double s = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double l = 1;
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (j != i) l *= (x - xs[j]) / (xs[i] - xs[j]);
    s += ys[i] * l;
  }
  return s;
}

double trapezoid(const std::vector<double>& xa, const std::vector<double>& ya, const std::vector<double>& xb,
                 const std::vector<double>& yb) {
  const double lo = std::max(*std::min_element(xa.begin(), xa.end()), *std::min_element(xb.begin(), xb.end()));
  const double hi = std::min(*std::max_element(xa.begin(), xa.end()), *std::max_element(xb.begin(), xb.end()));
  const int n = 200000;
  const double h = (hi - lo) / n;
  double acc = 0;
  for (int i = 0; i <= n; ++i) {
    const double x = lo + i * h;
    const double d = lagrange(xb, yb, x) - lagrange(xa, ya, x);
    acc += (i == 0 || i == n) ? d / 2 : d;
  }
  return acc * h / (hi - lo);
}

struct Cols {
  std::vector<double> db, lr;
};

Cols cols(const RdCurve& c) {
  Cols r;
  for (const auto& p : c.points()) r.db.push_back(p.psnr), r.lr.push_back(std::log10(p.kbps));
  return r;
}

double oracle_bd_rate(const RdCurve& a, const RdCurve& t) {
  const Cols ca = cols(a), ct = cols(t);
  return (std::pow(10.0, trapezoid(ca.db, ca.lr, ct.db, ct.lr)) - 1) * 100;
}

double oracle_bd_psnr(const RdCurve& a, const RdCurve& t) {
  const Cols ca = cols(a), ct = cols(t);
  return trapezoid(ca.lr, ca.db, ct.lr, ct.db);
}

TEST(BdRate, IdenticalCurvesGiveZero) {
  EXPECT_NEAR(bd_rate(kAnchor, kAnchor), 0.0, 5e-4);
  EXPECT_NEAR(bd_psnr(kAnchor, kAnchor), 0.0, 1e-9);
}

TEST(BdRate, UniformRateReduction) {
  std::vector<RdPoint> pts = kAnchor.points();
  for (auto& p : pts) p.kbps *= 0.9;
  EXPECT_NEAR(bd_rate(kAnchor, RdCurve(pts)), -10.0, 0.01);
}

TEST(BdPsnr, ConstantShiftIsExact) {
  std::vector<RdPoint> pts = kAnchor.points();
  for (auto& p : pts) p.psnr += 1.0;
  EXPECT_NEAR(bd_psnr(kAnchor, RdCurve(pts)), 1.0, 1e-9);
}

TEST(BdRate, MatchesTrapezoidOracle) {
  const std::vector<RdCurve> tests = {
      curve({90, 150, 290, 520}, {30.4, 32.9, 35.5, 37.6}),
      curve({120, 200, 330, 700}, {29.8, 32.0, 34.7, 37.9}),
      curve({80, 170, 300, 650}, {30.6, 33.1, 35.2, 37.0}),
  };
  for (const auto& t : tests) {
    EXPECT_NEAR(bd_rate(kAnchor, t), oracle_bd_rate(kAnchor, t), 0.05);
    EXPECT_NEAR(bd_psnr(kAnchor, t), oracle_bd_psnr(kAnchor, t), 0.005);
  }
}

TEST(BdRate, AntisymmetricSign) {
  const RdCurve t = curve({90, 150, 290, 520}, {30.4, 32.9, 35.5, 37.6});
  const double ab = bd_rate(kAnchor, t), ba = bd_rate(t, kAnchor);
  EXPECT_LT(ab * ba, 0);
  EXPECT_NEAR((1 + ab / 100) * (1 + ba / 100), 1.0, 1e-9);
}

TEST(BdRate, ScaleInvariant) {
  const RdCurve t = curve({90, 150, 290, 520}, {30.4, 32.9, 35.5, 37.6});
  std::vector<RdPoint> a = kAnchor.points(), b = t.points();
  for (auto& p : a) p.kbps *= 7.3;
  for (auto& p : b) p.kbps *= 7.3;
  EXPECT_NEAR(bd_rate(RdCurve(a), RdCurve(b)), bd_rate(kAnchor, t), 1e-9);
}

TEST(BdRate, NoOverlapThrows) {
  const RdCurve hi = curve({100, 200, 300, 400}, {40, 41, 42, 43});
  EXPECT_THROW(bd_rate(kAnchor, hi), ArgumentError);
}

TEST(Polyfit, ExactCubicRecovered) {
  const std::vector<double> x{-1, 0, 1, 2, 3};
  std::vector<double> y;
  for (double v : x) y.push_back(1 - 2 * v + 0.5 * v * v + 0.25 * v * v * v);
  const auto c = polyfit3(x, y);
  for (double v : {-0.5, 0.7, 2.5}) EXPECT_NEAR(polyval(c, v), 1 - 2 * v + 0.5 * v * v + 0.25 * v * v * v, 1e-10);
}

TEST(AllocateQp, StandardSchedule) {
  const int intra[] = {32, 37, 42, 47}, inter[] = {27, 32, 37, 42};
  for (int i = 0; i < 4; ++i) {
    const QpSchedule s = allocate_qp(intra[i]);
    EXPECT_EQ(s.qp_inter, inter[i]);
    EXPECT_EQ(s.delta, 5);
    EXPECT_EQ(s.qp_intra, intra[i]);
  }
  EXPECT_EQ(allocate_qp(3).qp_inter, 0);
  EXPECT_THROW(allocate_qp(52), ArgumentError);
  EXPECT_THROW(allocate_qp(-1), ArgumentError);
}

}  // namespace
}  // namespace crs
