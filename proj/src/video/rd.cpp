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

#include "crs/rd.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "crs/error.hpp"

namespace crs {

double mse(const Plane& a, const Plane& b) {
  if (a.width != b.width || a.height != b.height) {
    throw ShapeError("psnr: plane sizes differ (" + std::to_string(a.width) + "x" +
                     std::to_string(a.height) + " vs " + std::to_string(b.width) + "x" +
                     std::to_string(b.height) + ")");
  }
  if (a.samples.empty()) throw ShapeError("psnr: empty planes");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    const double d = static_cast<double>(a.samples[i]) - b.samples[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.samples.size());
}

double psnr_from_mse(double m) {
  if (m <= 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / m));
}

double psnr(const Plane& a, const Plane& b) { return psnr_from_mse(mse(a, b)); }

double psnr(const Frame& a, const Frame& b, PlaneSel plane) {
  switch (plane) {
    case PlaneSel::y: return psnr(a.y, b.y);
    case PlaneSel::u: return psnr(a.u, b.u);
    case PlaneSel::v: return psnr(a.v, b.v);
  }
  throw ArgumentError("psnr: unknown plane");
}

RdCurve::RdCurve(std::vector<RdPoint> points) : points_(std::move(points)) {
  if (points_.size() < 4) {
    throw ArgumentError("RD curve needs at least 4 points, got " + std::to_string(points_.size()));
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].kbps > 0.0) || !std::isfinite(points_[i].psnr)) {
      throw ArgumentError("RD curve point " + std::to_string(i) + " has a non-positive rate");
    }
    if (i > 0 && !(points_[i].kbps > points_[i - 1].kbps)) {
      throw ArgumentError("RD curve rates must increase strictly (point " + std::to_string(i) + ")");
    }
    if (i > 0 && !(points_[i].psnr > points_[i - 1].psnr)) {
      throw ArgumentError("RD curve PSNR must increase with rate (point " + std::to_string(i) + ")");
    }
  }
}

std::vector<double> polyfit3(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd v(n, 4);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double p = 1.0;
    for (int k = 0; k < 4; ++k, p *= x[i]) v(i, k) = p;
    rhs(i) = y[i];
  }
  const Eigen::VectorXd c = v.colPivHouseholderQr().solve(rhs);
  return {c(0), c(1), c(2), c(3)};
}

double polyval(const std::vector<double>& c, double x) {
  double r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

namespace {

double integral(const std::vector<double>& c, double lo, double hi) {
  auto prim = [&](double x) {
    double r = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k] / static_cast<double>(k + 1);
    return r * x;
  };
  return prim(hi) - prim(lo);
}

struct Axes {
  std::vector<double> log_rate;
  std::vector<double> psnr;
};

Axes axes(const RdCurve& c) {
  if (c.points().size() < 4) throw ArgumentError("BD metrics need curves with at least 4 points");
  Axes a;
  for (const auto& p : c.points()) {
    a.log_rate.push_back(std::log10(p.kbps));
    a.psnr.push_back(p.psnr);
  }
  return a;
}

// Mean of (g - f) over the overlap of the two abscissa ranges.
double mean_gap(const std::vector<double>& xa, const std::vector<double>& ya,
                const std::vector<double>& xb, const std::vector<double>& yb, const char* what) {
  const double lo = std::max(*std::min_element(xa.begin(), xa.end()),
                             *std::min_element(xb.begin(), xb.end()));
  const double hi = std::min(*std::max_element(xa.begin(), xa.end()),
                             *std::max_element(xb.begin(), xb.end()));
  if (!(hi > lo)) throw ArgumentError(std::string(what) + ": curves do not overlap");
  const auto fa = polyfit3(xa, ya);
  const auto fb = polyfit3(xb, yb);
  return (integral(fb, lo, hi) - integral(fa, lo, hi)) / (hi - lo);
}

}  // namespace

double bd_rate(const RdCurve& anchor, const RdCurve& test) {
  const Axes a = axes(anchor), t = axes(test);
  const double gap = mean_gap(a.psnr, a.log_rate, t.psnr, t.log_rate, "bd_rate");
  return (std::pow(10.0, gap) - 1.0) * 100.0;
}

double bd_psnr(const RdCurve& anchor, const RdCurve& test) {
  const Axes a = axes(anchor), t = axes(test);
  return mean_gap(a.log_rate, a.psnr, t.log_rate, t.psnr, "bd_psnr");
}

QpSchedule allocate_qp(int qp_intra) {
  if (qp_intra < kQpMin || qp_intra > kQpMax) {
    throw ArgumentError("qp " + std::to_string(qp_intra) + " outside [" + std::to_string(kQpMin) +
                        ", " + std::to_string(kQpMax) + "]");
  }
  return {qp_intra, kQpDelta, std::max(kQpMin, qp_intra - kQpDelta)};
}

}  // namespace crs
