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

#include "crs/report.hpp"

#include <fstream>
#include <sstream>

#include "crs/error.hpp"
#include "crs/yuv_io.hpp"
#include "json.hpp"

namespace crs {

using json = nlohmann::ordered_json;

namespace {

json points_json(const std::vector<RdPoint>& pts) {
  json a = json::array();
  for (const auto& p : pts) a.push_back({{"kbps", p.kbps}, {"psnr", p.psnr}});
  return a;
}

std::vector<RdPoint> points_from(const json& a) {
  std::vector<RdPoint> pts;
  for (const auto& p : a) pts.push_back({p.at("kbps").get<double>(), p.at("psnr").get<double>()});
  return pts;
}

}  // namespace

RdReport evaluate(const Sequence& original, const Sequence& recon,
                  const std::vector<CodecRun>& runs) {
  if (original.size() != recon.size()) {
    throw ArgumentError("evaluate: original has " + std::to_string(original.size()) +
                        " frames, reconstruction has " + std::to_string(recon.size()));
  }
  if (original.size() == 0) throw ArgumentError("evaluate: no frames");
  if (!runs.empty() && static_cast<int>(runs.size()) != original.size()) {
    throw ArgumentError("evaluate: " + std::to_string(runs.size()) + " codec runs for " +
                        std::to_string(original.size()) + " frames");
  }
  const int w = original.orig_width > 0 ? original.orig_width : original.width;
  const int h = original.orig_height > 0 ? original.orig_height : original.height;
  RdReport r;
  for (int i = 0; i < original.size(); ++i) {
    const Frame a = crop_frame(original.frames[i], w, h);
    const Frame b = crop_frame(recon.frames[i], w, h);
    FrameMetrics m;
    m.frame = i;
    if (!runs.empty()) {
      m.role = to_string(runs[i].role);
      m.qp = runs[i].qp;
      m.bits = runs[i].bits;
    }
    m.psnr_y = psnr(a, b, PlaneSel::y);
    m.psnr_u = psnr(a, b, PlaneSel::u);
    m.psnr_v = psnr(a, b, PlaneSel::v);
    r.mean_psnr_y += m.psnr_y;
    r.mean_psnr_u += m.psnr_u;
    r.mean_psnr_v += m.psnr_v;
    r.total_bits += m.bits;
    r.frames.push_back(std::move(m));
  }
  const double n = original.size();
  r.mean_psnr_y /= n;
  r.mean_psnr_u /= n;
  r.mean_psnr_v /= n;
  r.kbps = r.total_bits * original.fps / n / 1000.0;
  return r;
}

BdComparison compare_curves(const std::string& anchor_label, const RdCurve& anchor,
                            const std::string& test_label, const RdCurve& test) {
  return {anchor_label, test_label, anchor.points(), test.points(), bd_rate(anchor, test),
          bd_psnr(anchor, test)};
}

std::string report_json(const RdReport& r) {
  json j;
  json frames = json::array();
  for (const auto& m : r.frames) {
    frames.push_back({{"frame", m.frame},
                      {"role", m.role},
                      {"qp", m.qp},
                      {"bits", m.bits},
                      {"psnr_y", m.psnr_y},
                      {"psnr_u", m.psnr_u},
                      {"psnr_v", m.psnr_v}});
  }
  j["frames"] = std::move(frames);
  j["mean_psnr_y"] = r.mean_psnr_y;
  j["mean_psnr_u"] = r.mean_psnr_u;
  j["mean_psnr_v"] = r.mean_psnr_v;
  j["total_bits"] = r.total_bits;
  j["kbps"] = r.kbps;
  if (r.bd) {
    j["comparison"] = {{"anchor_label", r.bd->anchor_label},
                       {"test_label", r.bd->test_label},
                       {"anchor", points_json(r.bd->anchor)},
                       {"test", points_json(r.bd->test)},
                       {"bd_rate", r.bd->bd_rate},
                       {"bd_psnr", r.bd->bd_psnr}};
  }
  return j.dump(2) + "\n";
}

RdReport parse_report(const std::string& text, const std::string& where) {
  try {
    const json j = json::parse(text);
    RdReport r;
    for (const auto& m : j.at("frames")) {
      r.frames.push_back({m.at("frame").get<int>(), m.at("role").get<std::string>(),
                          m.at("qp").get<int>(), m.at("bits").get<double>(),
                          m.at("psnr_y").get<double>(), m.at("psnr_u").get<double>(),
                          m.at("psnr_v").get<double>()});
    }
    r.mean_psnr_y = j.at("mean_psnr_y").get<double>();
    r.mean_psnr_u = j.at("mean_psnr_u").get<double>();
    r.mean_psnr_v = j.at("mean_psnr_v").get<double>();
    r.total_bits = j.at("total_bits").get<double>();
    r.kbps = j.at("kbps").get<double>();
    if (j.contains("comparison")) {
      const auto& c = j.at("comparison");
      r.bd = BdComparison{c.at("anchor_label").get<std::string>(),
                          c.at("test_label").get<std::string>(),
                          points_from(c.at("anchor")),
                          points_from(c.at("test")),
                          c.at("bd_rate").get<double>(),
                          c.at("bd_psnr").get<double>()};
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(where, e.what());
  }
}

LabeledCurve load_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open RD curve " + path);
  try {
    const json j = json::parse(in);
    return {j.value("label", path), RdCurve(points_from(j.at("points")))};
  } catch (const json::exception& e) {
    throw ParseError(path, e.what());
  }
}

std::string curve_json(const std::string& label, const RdCurve& c) {
  json j;
  j["label"] = label;
  j["points"] = points_json(c.points());
  return j.dump(2) + "\n";
}

}  // namespace crs
