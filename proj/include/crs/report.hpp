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

#include <optional>
#include <string>
#include <vector>

#include "crs/codec_sim.hpp"
#include "crs/rd.hpp"

namespace crs {

struct FrameMetrics {
  int frame = 0;
  std::string role;  // "intra", "inter" or "" when no codec runs are attached
  int qp = 0;
  double bits = 0.0;
  double psnr_y = 0.0;
  double psnr_u = 0.0;
  double psnr_v = 0.0;
};

struct BdComparison {
  std::string anchor_label;
  std::string test_label;
  std::vector<RdPoint> anchor;
  std::vector<RdPoint> test;
  double bd_rate = 0.0;
  double bd_psnr = 0.0;
};

struct RdReport {
  std::vector<FrameMetrics> frames;
  double mean_psnr_y = 0.0;
  double mean_psnr_u = 0.0;
  double mean_psnr_v = 0.0;
  double total_bits = 0.0;
  double kbps = 0.0;
  std::optional<BdComparison> bd;
};

// PSNR is measured on the original (unpadded) picture area.
RdReport evaluate(const Sequence& original, const Sequence& recon,
                  const std::vector<CodecRun>& runs = {});

BdComparison compare_curves(const std::string& anchor_label, const RdCurve& anchor,
                            const std::string& test_label, const RdCurve& test);

std::string report_json(const RdReport& r);
RdReport parse_report(const std::string& text, const std::string& where);

// {"label": "...", "points": [{"kbps": r, "psnr": p}, ...]}
struct LabeledCurve {
  std::string label;
  RdCurve curve;
};
LabeledCurve load_curve(const std::string& path);
std::string curve_json(const std::string& label, const RdCurve& c);

}  // namespace crs
