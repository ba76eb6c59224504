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

#include <string>
#include <vector>

#include "crs/rd.hpp"

namespace crs {

enum class GopMode { ldp, ra };
enum class FrameRole { intra, inter };

GopMode parse_gop_mode(const std::string& s);
std::string to_string(GopMode m);
std::string to_string(FrameRole r);

struct GopFrame {
  int index = 0;
  FrameRole role = FrameRole::inter;
  int qp = 0;
  std::vector<int> intra_refs;  // HR intra frames feeding texture compensation
};

struct GopStructure {
  int start = 0;
  int length = 0;  // frames actually present in this GoP
  GopMode mode = GopMode::ldp;
  QpSchedule qp;
  std::vector<GopFrame> frames;

  int end() const { return start + length; }
  const GopFrame& intra() const { return frames.front(); }
  // The succeeding GoP's intra, when RA can use it.
  bool has_next_intra() const { return frames.front().intra_refs.size() > 1; }
};

std::vector<GopStructure> structure_gop(int frame_count, int gop_len, GopMode mode, int qp_intra);

}  // namespace crs
