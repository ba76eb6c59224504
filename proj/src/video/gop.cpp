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

#include "crs/gop.hpp"

#include <algorithm>

#include "crs/error.hpp"

namespace crs {

GopMode parse_gop_mode(const std::string& s) {
  if (s == "ldp") return GopMode::ldp;
  if (s == "ra") return GopMode::ra;
  throw ArgumentError("unknown GoP mode '" + s + "' (expected ldp or ra)");
}

std::string to_string(GopMode m) { return m == GopMode::ldp ? "ldp" : "ra"; }
std::string to_string(FrameRole r) { return r == FrameRole::intra ? "intra" : "inter"; }

std::vector<GopStructure> structure_gop(int frame_count, int gop_len, GopMode mode,
                                        int qp_intra) {
  if (gop_len < 2) throw ArgumentError("GoP length must be at least 2, got " + std::to_string(gop_len));
  if (frame_count <= 0) throw ArgumentError("sequence has no frames");
  const QpSchedule qp = allocate_qp(qp_intra);
  std::vector<GopStructure> gops;
  for (int start = 0; start < frame_count; start += gop_len) {
    GopStructure g;
    g.start = start;
    g.length = std::min(gop_len, frame_count - start);
    g.mode = mode;
    g.qp = qp;
    std::vector<int> refs{start};
    if (mode == GopMode::ra && start + gop_len < frame_count) refs.push_back(start + gop_len);
    for (int i = start; i < g.end(); ++i) {
      GopFrame f;
      f.index = i;
      f.role = i == start ? FrameRole::intra : FrameRole::inter;
      f.qp = i == start ? qp.qp_intra : qp.qp_inter;
      f.intra_refs = refs;
      g.frames.push_back(f);
    }
    gops.push_back(std::move(g));
  }
  return gops;
}

}  // namespace crs
