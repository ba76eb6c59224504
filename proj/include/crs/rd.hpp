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

#pragma once

#include <vector>

#include "crs/frame.hpp"

namespace crs {

inline constexpr double kPsnrCap = 99.0;
inline constexpr int kQpDelta = 5;
inline constexpr int kQpMin = 0;
inline constexpr int kQpMax = 51;

enum class PlaneSel { y, u, v };

double mse(const Plane& a, const Plane& b);
double psnr_from_mse(double mse);
double psnr(const Plane& a, const Plane& b);
double psnr(const Frame& a, const Frame& b, PlaneSel plane);

struct RdPoint {
  double kbps = 0.0;
  double psnr = 0.0;
};

// At least four points with strictly increasing rate and PSNR.
class RdCurve {
 public:
  RdCurve() = default;
  explicit RdCurve(std::vector<RdPoint> points);
  const std::vector<RdPoint>& points() const { return points_; }

 private:
  std::vector<RdPoint> points_;
};

// Cubic least-squares fit, coefficients lowest order first.
std::vector<double> polyfit3(const std::vector<double>& x, const std::vector<double>& y);
double polyval(const std::vector<double>& c, double x);

// Average bitrate difference at equal quality, in percent (negative = saving).
double bd_rate(const RdCurve& anchor, const RdCurve& test);
// Average PSNR difference at equal rate, in dB.
double bd_psnr(const RdCurve& anchor, const RdCurve& test);

struct QpSchedule {
  int qp_intra = 32;
  int delta = kQpDelta;
  int qp_inter = 27;
};

QpSchedule allocate_qp(int qp_intra);

}  // namespace crs
