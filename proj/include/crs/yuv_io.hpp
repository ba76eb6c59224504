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

#include "crs/frame.hpp"

namespace crs {

// Working dimensions are padded to this multiple so that every plane at both
// resolution tiers splits into whole 8x8 transform blocks.
inline constexpr int kAlign = 32;

int aligned_size(int n, int align = kAlign);

Frame pad_frame(const Frame& f, int width, int height);  // symmetric reflection
Frame crop_frame(const Frame& f, int width, int height);

std::size_t frame_bytes(int width, int height);

// count <= 0 reads every frame in the file.
Sequence load_yuv(const std::string& path, int width, int height, int count = 0,
                  int align = kAlign);

// Frames are written as stored; no cropping.
void write_frames(const std::string& path, const std::vector<Frame>& frames);
std::vector<Frame> read_frames(const std::string& path, int width, int height, int count);

// Crops every frame to the sequence's original dimensions.
void write_yuv(const std::string& path, const Sequence& seq);

}  // namespace crs
